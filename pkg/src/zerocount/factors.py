"""E_u / E_l estimates for the factors s(s-1), d_K^(s/2) and the gamma factor.

For a factor F of the completed zeta function, with s1 = 1/2 + d + iT and
s2 = 1/2 + 2d + iT,

    E1(F) = (2/pi) (2 Im log F(s1) - Im log F(s2))
    E2(F) = (d a1/2) Re (F'/F)(s1) + (d^2 a2/2) Re (F'/F)'(s1)
    E3(F) = (a3/2) Im (F'/F)'(s1)

and E_u = E1 + E2 + E3, E_l = E1 - E2 + E3.  All operators are additive
over products, so each factor is handled separately.

The gamma factor splits into gamma_1(s) = pi^(-s/2) Gamma(s/2) per real
place and gamma_2(s) = (2 pi)^(-s) 2 Gamma(s) per complex place.  Its
residual (E minus the explicit main and log terms) is evaluated from the
certified approximations in :mod:`zerocount.specfun`, widened by their
remainder radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun as sf
from .core import DomainError, EnvelopeTerm, FieldSignature, Params

__all__ = [
    "e_s_squared",
    "e_s_squared_derivative_signs",
    "e_discriminant",
    "GammaResidual",
    "gamma_residual",
    "gamma_residual_exact",
    "e_gamma1",
    "e_gamma2",
    "e_gamma_K",
    "e_gamma_K_lemma",
    "residual_limit",
    "residual_tail_deviation",
    "RangeScan",
    "scan_gamma_residuals",
    "PUBLISHED_GAMMA_RANGES",
]

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2 * math.pi)

# (sup of upper residual, inf of lower residual) claimed for each factor.
PUBLISHED_GAMMA_RANGES = {1: (0.049, -0.25), 2: (0.515, 0.0)}


def _check_T(T: float) -> None:
    if not T >= 1:
        raise DomainError(f"T must be >= 1, got {T}")


def _sign(kind: str) -> int:
    if kind not in ("upper", "lower"):
        raise ValueError(f"kind must be 'upper' or 'lower', got {kind!r}")
    return 1 if kind == "upper" else -1


# -- s(s-1) -------------------------------------------------------------------


def _e_s_squared(T, params: Params, sg: int):
    d, a1, a2, a3 = params.as_tuple()
    T = np.asarray(T, dtype=float)
    e1 = 4 / math.pi * (np.arctan(T / (d + 0.5)) + np.arctan(T / (d - 0.5)))
    e1 = e1 - 2 / math.pi * (np.arctan(T / (2 * d + 0.5)) + np.arctan(T / (2 * d - 0.5)))
    p1 = p2 = p3 = 0.0
    for x in (d + 0.5, d - 0.5):
        q = x * x + T * T
        p1 = p1 + x / q
        p2 = p2 + (x * x - T * T) / q**2
        p3 = p3 + 2 * x * T / q**2
    e2 = d * a1 / 2 * p1 - d * d * a2 / 2 * p2
    e3 = a3 / 2 * p3
    return e1 + sg * e2 + e3


def e_s_squared(T: float, params: Params) -> EnvelopeTerm:
    _check_T(T)
    return EnvelopeTerm(float(_e_s_squared(T, params, 1)), float(_e_s_squared(T, params, -1)))


def e_s_squared_derivative_signs(T_grid, params: Params) -> dict[str, tuple[int, int]]:
    """(#positive, #negative) central-difference slopes for each component.

    Slopes below the rounding noise of the difference quotient count as zero.
    """
    T = np.asarray(T_grid, dtype=float)
    h = 1e-4 * np.maximum(1.0, T)
    out = {}
    for kind, sg in (("upper", 1), ("lower", -1)):
        hi, lo = _e_s_squared(T + h, params, sg), _e_s_squared(T - h, params, sg)
        slope = (hi - lo) / (2 * h)
        noise = 64 * np.finfo(float).eps * np.maximum(np.abs(hi), np.abs(lo)) / h
        slope = np.where(np.abs(slope) <= noise, 0.0, slope)
        out[kind] = (int(np.sum(slope > 0)), int(np.sum(slope < 0)))
    return out


# -- discriminant -------------------------------------------------------------


def e_discriminant(T: float, log_dK: float, params: Params) -> EnvelopeTerm:
    _check_T(T)
    if log_dK < 0:
        raise DomainError("log_dK must be nonnegative")
    k = params.da1 / 4
    return EnvelopeTerm((T / math.pi + k) * log_dK, (T / math.pi - k) * log_dK)


# -- gamma factor -------------------------------------------------------------


def _points(factor: int, T: float, d: float) -> tuple[complex, complex]:
    if factor == 1:
        return complex(0.25 + d / 2, T / 2), complex(0.25 + d, T / 2)
    if factor == 2:
        return complex(0.5 + d, T), complex(0.5 + 2 * d, T)
    raise ValueError(f"gamma factor must be 1 or 2, got {factor}")


def _main(factor: int, T: float, params: Params, sg: int) -> float:
    return factor * (T / math.pi * math.log(T / (2 * math.pi * math.e)) + sg * params.da1 / 4 * math.log(T / (2 * math.pi)))


def _assemble(factor, T, params, sg, im_lg_p, im_lg_q, re_psi_p, re_psi1_p, im_psi1_p) -> float:
    d, a1, a2, a3 = params.as_tuple()
    if factor == 1:
        # chain rule through s/2: F'/F = -log(pi)/2 + psi/2, (F'/F)' = psi_1/4
        e1 = -T / math.pi * LOG_PI + 4 / math.pi * im_lg_p - 2 / math.pi * im_lg_q
        e2 = d * a1 / 2 * (-LOG_PI / 2 + re_psi_p / 2) + d * d * a2 / 2 * (re_psi1_p / 4)
        e3 = a3 / 2 * (im_psi1_p / 4)
    else:
        e1 = -2 * T / math.pi * LOG_2PI + 4 / math.pi * im_lg_p - 2 / math.pi * im_lg_q
        e2 = d * a1 / 2 * (-LOG_2PI + re_psi_p) + d * d * a2 / 2 * re_psi1_p
        e3 = a3 / 2 * im_psi1_p
    return e1 + sg * e2 + e3 - _main(factor, T, params, sg)


@dataclass(frozen=True)
class GammaResidual:
    """Residual centre and the certified half width around it."""

    center: float
    radius: float

    @property
    def upper(self) -> float:
        return self.center + self.radius

    @property
    def lower(self) -> float:
        return self.center - self.radius


def gamma_residual(factor: int, T: float, params: Params, kind: str = "upper") -> GammaResidual:
    """E(gamma_factor) minus its main and log terms, from the certified formulas."""
    _check_T(T)
    sg = _sign(kind)
    p, q = _points(factor, T, params.d)
    lg_p, lg_q = sf.im_log_gamma(p), sf.im_log_gamma(q)
    psi = sf.re_digamma(p)
    re1, im1 = sf.trigamma(p)
    center = _assemble(factor, T, params, sg, lg_p.value, lg_q.value, psi.value, re1.value, im1.value)
    d, a1, a2, a3 = params.as_tuple()
    w = 1.0 if factor == 2 else 0.5
    # psi_1 weights pick up the (1/2)^2 chain factor for gamma_1
    w2 = 1.0 if factor == 2 else 0.25
    radius = (
        4 / math.pi * lg_p.remainder_radius
        + 2 / math.pi * lg_q.remainder_radius
        + d * a1 / 2 * w * psi.remainder_radius
        + (d * d * a2 / 2 + a3 / 2) * w2 * re1.remainder_radius
    )
    return GammaResidual(center, radius)


def gamma_residual_exact(factor: int, T: float, params: Params, kind: str = "upper", precision: float = 1e-9) -> float:
    """Same residual with Gamma, psi, psi_1 from the reference oracle."""
    _check_T(T)
    sg = _sign(kind)
    p, q = _points(factor, T, params.d)
    lg_p = sf.reference_log_gamma(p, precision).imag
    lg_q = sf.reference_log_gamma(q, precision).imag
    psi = sf.reference_digamma(p, precision).real
    psi1 = sf.reference_trigamma(p, precision)
    return _assemble(factor, T, params, sg, lg_p, lg_q, psi, psi1.real, psi1.imag)


def _e_gamma(factor: int, T: float, params: Params) -> EnvelopeTerm:
    up = gamma_residual(factor, T, params, "upper")
    lo = gamma_residual(factor, T, params, "lower")
    return EnvelopeTerm(_main(factor, T, params, 1) + up.upper, _main(factor, T, params, -1) + lo.lower)


def e_gamma1(T: float, params: Params) -> EnvelopeTerm:
    """Certified [E_l, E_u] for pi^(-s/2) Gamma(s/2)."""
    return _e_gamma(1, T, params)


def e_gamma2(T: float, params: Params) -> EnvelopeTerm:
    """Certified [E_l, E_u] for (2 pi)^(-s) 2 Gamma(s)."""
    return _e_gamma(2, T, params)


def e_gamma_K(T: float, sig: FieldSignature, params: Params) -> EnvelopeTerm:
    """r1 copies of gamma_1 plus r2 copies of gamma_2 (E is additive)."""
    _check_T(T)
    total = EnvelopeTerm(0.0, 0.0)
    if sig.r1:
        total = total + e_gamma1(T, params).scaled(sig.r1)
    if sig.r2:
        total = total + e_gamma2(T, params).scaled(sig.r2)
    return total


def e_gamma_K_lemma(
    T: float, sig: FieldSignature, params: Params, upper_const: float = 0.258, lower_const: float = -0.25
) -> EnvelopeTerm:
    """Closed bound n_K (T/pi) log(T/2 pi e) +- (n_K d a1/4) log(T/2 pi) + const n_K."""
    _check_T(T)
    n = sig.n_K
    main = n * T / math.pi * math.log(T / (2 * math.pi * math.e))
    log_term = n * params.da1 / 4 * math.log(T / (2 * math.pi))
    return EnvelopeTerm(main + log_term + upper_const * n, main - log_term + lower_const * n)


# -- tail beyond the scan grid ------------------------------------------------


def residual_limit(factor: int, params: Params) -> float:
    """Limit of the residual as T -> oo; only the arctan terms survive."""
    p, q = _points(factor, 1.0, params.d)
    return 2 * (p.real - 0.5) - (q.real - 0.5)


def residual_tail_deviation(factor: int, T1: float, params: Params) -> float:
    """Bound on |residual(T) +- radius(T) - limit| valid for every T >= T1.

    Each approximation differs from its large-|s| skeleton
    (tau log tau - tau + (sigma - 1/2) pi/2 for Im log Gamma, log tau for
    Re psi, 0 for psi_1) by terms that decrease in tau = Im(s); those
    skeletons cancel against the main terms exactly.
    """
    _check_T(T1)
    d, a1, a2, a3 = params.as_tuple()
    p, q = _points(factor, T1, d)

    def dev_lg(s):
        sg, tau = s.real, s.imag
        return sg * sg / (2 * tau) + abs(sg - 0.5) * sg / tau + 1 / (12 * tau)

    def dev_psi(s):
        sg, tau = s.real, s.imag
        return (sg * sg / 2 + sg / 2 + 1 / 12) / tau**2

    def dev_psi1(s):
        sg, tau = s.real, s.imag
        return max(sg / tau**2 + 1 / (2 * tau**2), 1 / tau + sg / tau**3)

    w = 1.0 if factor == 2 else 0.5
    w2 = 1.0 if factor == 2 else 0.25
    dev = 4 / math.pi * dev_lg(p) + 2 / math.pi * dev_lg(q)
    dev += d * a1 / 2 * w * dev_psi(p) + (d * d * a2 / 2 + a3 / 2) * w2 * dev_psi1(p)
    return dev + gamma_residual(factor, T1, params).radius


# -- range scans --------------------------------------------------------------


@dataclass
class RangeScan:
    factor: int
    T: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    upper_center: np.ndarray = field(repr=False, default=None)
    lower_center: np.ndarray = field(repr=False, default=None)
    tail_from: float = float("nan")
    tail_sup: float = float("nan")
    tail_inf: float = float("nan")

    @property
    def sup(self) -> float:
        return float(self.upper.max())

    @property
    def inf(self) -> float:
        return float(self.lower.min())

    @property
    def argsup(self) -> float:
        return float(self.T[int(self.upper.argmax())])

    @property
    def arginf(self) -> float:
        return float(self.T[int(self.lower.argmin())])

    def summary(self) -> dict:
        published_sup, published_inf = PUBLISHED_GAMMA_RANGES[self.factor]
        return {
            "factor": self.factor,
            "sup": self.sup,
            "sup_at": self.argsup,
            "published_sup": published_sup,
            "sup_ok": self.sup <= published_sup,
            "inf": self.inf,
            "inf_at": self.arginf,
            "published_inf": published_inf,
            "inf_ok": self.inf >= published_inf,
            "tail_from": self.tail_from,
            "tail_sup": self.tail_sup,
            "tail_inf": self.tail_inf,
        }


def scan_gamma_residuals(
    factor: int, params: Params, t_min: float = 1.0, t_max: float = 1000.0, steps: int = 10_000
) -> RangeScan:
    """Certified upper/lower residuals on a log grid, plus a tail enclosure beyond t_max."""
    Ts = np.geomspace(t_min, t_max, steps)
    up = [gamma_residual(factor, T, params, "upper") for T in Ts]
    lo = [gamma_residual(factor, T, params, "lower") for T in Ts]
    lim = residual_limit(factor, params)
    dev = residual_tail_deviation(factor, t_max, params)
    return RangeScan(
        factor=factor,
        T=Ts,
        upper=np.array([r.upper for r in up]),
        lower=np.array([r.lower for r in lo]),
        upper_center=np.array([r.center for r in up]),
        lower_center=np.array([r.center for r in lo]),
        tail_from=t_max,
        tail_sup=lim + dev,
        tail_inf=lim - dev,
    )
