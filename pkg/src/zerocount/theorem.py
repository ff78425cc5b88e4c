"""Assembly of the explicit N_K(T) envelope and validation against zero tables.

With the lemma-level constants for s(s-1), the gamma factor and the zeta
factor, N_K(T) lies in [E_l, E_u], which gives

    |N_K(T) - (T/pi) log(d_K (T/2 pi e)^n_K) - center|
        <= kappa (log d_K + n_K log T) + C n_K + r

Every derived constant is rounded outward at the third decimal.  Derived
constants are returned as :class:`decimal.Decimal` so that equality with
the published figures is exact.
"""

from __future__ import annotations

import bisect
import math
import os
from dataclasses import asdict, dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal
from importlib import resources
from pathlib import Path

from .core import DomainError, FieldSignature, Params, round_up

__all__ = [
    "LemmaConstants",
    "TheoremConstants",
    "derive_constants",
    "BoundEnvelope",
    "assemble_envelope",
    "bound_NK",
    "corollary_riemann",
    "ZeroTable",
    "load_zero_table",
    "count_zeros",
    "ValidationRow",
    "ValidationReport",
    "validate",
    "ZEROS_ENV",
]

ZEROS_ENV = "ZEROCOUNT_ZEROS"
_Q = Decimal("0.001")


def _dec(x) -> Decimal:
    return x if isinstance(x, Decimal) else Decimal(repr(float(x)))


@dataclass(frozen=True)
class LemmaConstants:
    """Per-lemma constants feeding the assembly (published values by default)."""

    s_upper: Decimal = Decimal("2.381")
    s_lower: Decimal = Decimal("1.458")
    gamma_upper: Decimal = Decimal("0.258")
    gamma_lower: Decimal = Decimal("-0.25")
    zeta: Decimal = Decimal("5.633")
    # per-degree constants of the combined E_u / E_l bounds as published
    assembled_upper: Decimal | None = Decimal("5.899")
    assembled_lower: Decimal | None = Decimal("5.891")

    @property
    def raw_upper(self) -> Decimal:
        return self.gamma_upper + self.zeta

    @property
    def raw_lower(self) -> Decimal:
        return -self.gamma_lower + self.zeta

    @property
    def upper_per_degree(self) -> Decimal:
        return self.assembled_upper if self.assembled_upper is not None else self.raw_upper

    @property
    def lower_per_degree(self) -> Decimal:
        return self.assembled_lower if self.assembled_lower is not None else self.raw_lower


@dataclass(frozen=True)
class TheoremConstants:
    kappa: Decimal
    per_degree: Decimal
    center: Decimal
    radius: Decimal
    rational_radius: Decimal
    riemann_kappa: Decimal
    riemann_radius: Decimal
    raw: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        out = {k: str(v) for k, v in asdict(self).items() if k != "raw"}
        out["raw"] = self.raw
        return out


def derive_constants(params: Params, lemmas: LemmaConstants | None = None) -> TheoremConstants:
    """Outward-rounded theorem constants from the lemma constants."""
    lemmas = lemmas or LemmaConstants()
    k_raw = _dec(params.da1) / 4
    kappa = k_raw.quantize(_Q, rounding=ROUND_CEILING)
    # E_u and E_l differ in their per-degree constant; the symmetric form
    # takes the larger one.
    per_upper = lemmas.upper_per_degree
    per = max(per_upper, lemmas.lower_per_degree)
    log2pi = _dec(math.log(2 * math.pi))
    per_degree = (per - kappa * log2pi).quantize(_Q, rounding=ROUND_CEILING)
    mid = (lemmas.s_upper + lemmas.s_lower) / 2
    center = mid.quantize(_Q, rounding=ROUND_FLOOR)
    radius = max(lemmas.s_upper - center, center - lemmas.s_lower).quantize(_Q, rounding=ROUND_CEILING)
    rational = per_degree + radius
    r_kappa = (kappa / 2).quantize(_Q, rounding=ROUND_CEILING)
    r_radius = ((rational + center) / 2).quantize(_Q, rounding=ROUND_CEILING)
    raw = {
        "d_a1_over_4": float(k_raw),
        "raw_upper_per_degree": str(lemmas.raw_upper),
        "raw_lower_per_degree": str(lemmas.raw_lower),
        "assembled_upper_per_degree": str(lemmas.upper_per_degree),
        "assembled_lower_per_degree": str(lemmas.lower_per_degree),
        "unexplained_upper_excess": str(lemmas.upper_per_degree - lemmas.raw_upper),
        "per_degree_minus_kappa_log2pi": float(per - kappa * log2pi),
        "per_degree_minus_exact_log2pi": float(per - k_raw * log2pi),
        "center_unrounded": str(mid),
    }
    return TheoremConstants(kappa, per_degree, center, radius, rational, r_kappa, r_radius, raw)


@dataclass(frozen=True)
class BoundEnvelope:
    T: float
    main_term: float
    center: float
    radius: float

    @property
    def lower(self) -> float:
        return self.main_term + self.center - self.radius

    @property
    def upper(self) -> float:
        return self.main_term + self.center + self.radius


def _check(T: float) -> None:
    if not T >= 1:
        raise DomainError(f"T must be >= 1, got {T}")


def _main(T: float, sig: FieldSignature) -> float:
    return T / math.pi * (sig.log_dK + sig.n_K * math.log(T / (2 * math.pi * math.e)))


def assemble_envelope(
    T: float, sig: FieldSignature, params: Params, lemmas: LemmaConstants | None = None
) -> BoundEnvelope:
    """Envelope in the exact-coefficient form: d a1/4 and log(T/2 pi) kept unrounded."""
    _check(T)
    lemmas = lemmas or LemmaConstants()
    c = derive_constants(params, lemmas)
    per = float(max(lemmas.upper_per_degree, lemmas.lower_per_degree))
    log_part = params.da1 / 4 * (sig.log_dK + sig.n_K * math.log(T / (2 * math.pi)))
    radius = log_part + per * sig.n_K + float(c.radius)
    return BoundEnvelope(T, _main(T, sig), float(c.center), radius)


def bound_NK(T: float, sig: FieldSignature, params: Params | None = None) -> tuple[float, float]:
    """Interval for N_K(T) from the rounded closed form."""
    _check(T)
    c = derive_constants(params or Params(0.722, 1.07, 0.93, 0.365))
    radius = float(c.kappa) * (sig.log_dK + sig.n_K * math.log(T)) + float(c.per_degree) * sig.n_K + float(c.radius)
    m = _main(T, sig) + float(c.center)
    return m - radius, m + radius


def corollary_riemann(T: float, params: Params | None = None) -> tuple[float, float]:
    """Interval for N(T) = N_Q(T)/2 with the center shift absorbed in the radius."""
    _check(T)
    c = derive_constants(params or Params(0.722, 1.07, 0.93, 0.365))
    main = T / (2 * math.pi) * math.log(T / (2 * math.pi * math.e))
    radius = float(c.riemann_kappa) * math.log(T) + float(c.riemann_radius)
    return main - radius, main + radius


# -- zero tables --------------------------------------------------------------


@dataclass(frozen=True)
class ZeroTable:
    ordinates: tuple[float, ...]
    source: str = ""

    def __post_init__(self):
        o = self.ordinates
        if any(x <= 0 for x in o):
            raise ValueError("ordinates must be positive")
        if any(b <= a for a, b in zip(o, o[1:])):
            raise ValueError("ordinates must be strictly ascending")

    def __len__(self) -> int:
        return len(self.ordinates)


def _parse(lines, source: str) -> ZeroTable:
    vals = []
    for lineno, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError:
            raise ValueError(f"{source}:{lineno}: cannot parse {text!r}") from None
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{source}:{lineno}: ordinate must be positive and finite")
        if vals and v <= vals[-1]:
            raise ValueError(f"{source}:{lineno}: {v} is not above the previous ordinate {vals[-1]}")
        vals.append(v)
    return ZeroTable(tuple(vals), source)


def load_zero_table(path: str | os.PathLike | None = None) -> ZeroTable:
    """Read a zero table; defaults to $ZEROCOUNT_ZEROS, then the bundled 100 zeros."""
    path = path or os.environ.get(ZEROS_ENV)
    if path:
        p = Path(path)
        return _parse(p.read_text().splitlines(), str(p))
    res = resources.files("zerocount").joinpath("data/zeros_100.txt")
    return _parse(res.read_text().splitlines(), "bundled:zeros_100.txt")


def count_zeros(table: ZeroTable, T: float, tol: float = 1e-9) -> float:
    """#{gamma < T} plus half of those equal to T within tol."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    o = table.ordinates
    below = bisect.bisect_left(o, T - tol)
    at = bisect.bisect_right(o, T + tol) - below
    return below + 0.5 * at


@dataclass(frozen=True)
class ValidationRow:
    T: float
    count: float
    main: float
    lower: float
    upper: float
    strip_count: float
    strip_lower: float
    strip_upper: float

    @property
    def margin(self) -> float:
        return min(self.count - self.lower, self.upper - self.count)

    @property
    def ok(self) -> bool:
        return self.lower <= self.count <= self.upper and self.strip_lower <= self.strip_count <= self.strip_upper


@dataclass
class ValidationReport:
    rows: list[ValidationRow]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def min_margin(self) -> float:
        return min((r.margin for r in self.rows), default=float("nan"))

    @property
    def failures(self) -> list[ValidationRow]:
        return [r for r in self.rows if not r.ok]


def validate(table: ZeroTable, T_grid, params: Params | None = None) -> ValidationReport:
    """Check N(T) and N_Q(T) = 2 N(T) against their envelopes on T_grid."""
    T_grid = [float(T) for T in T_grid]
    if T_grid and (not table.ordinates or max(T_grid) >= table.ordinates[-1]):
        raise ValueError("T grid extends beyond the zero table")
    q = FieldSignature.rationals()
    rows = []
    for T in T_grid:
        n = count_zeros(table, T)
        lo, hi = corollary_riemann(T, params)
        slo, shi = bound_NK(T, q, params)
        main = T / (2 * math.pi) * math.log(T / (2 * math.pi * math.e))
        rows.append(ValidationRow(T, n, main, lo, hi, 2 * n, slo, shi))
    return ValidationReport(rows)
