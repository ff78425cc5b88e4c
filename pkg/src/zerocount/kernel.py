"""The arctan kernel f(b, t, d), its pole majorant, and admissibility checks.

For |b| <= 1/2 and t != 0 we need

    H(b, t) = f(b, t, d) - (pi/4) [d a1 P1 + d^2 a2 P2 + a3 P3] <= 0

where P1, P2, P3 are the first order, real second order and imaginary
second order pole pairs at (d + b) + it and (d - b) + it.  H is harmonic on
each half strip, so by the maximum principle it is enough to check the
boundary: the two edges b = +-1/2 (equal by symmetry), the t -> 0 limits, and
the edges t = +-t0, where t0 comes from an explicit Taylor remainder bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .core import SLACK, DomainError, Params

__all__ = [
    "eval_f",
    "eval_majorant",
    "majorant_lower",
    "eval_H",
    "h",
    "h_prime",
    "zero_limits",
    "asymptotic_coefficient",
    "compute_t0",
    "h_prime_polynomial",
    "find_h_prime_roots",
    "Lemma21Certificate",
    "verify_lemma21",
    "SearchBox",
    "SearchResult",
    "search_params",
]

# Arctan pole offsets as multiples of (d, b) and their weights in f.
_F_TERMS = ((2.0, 1.0, 1.0), (2.0, 1.0, -1.0), (-1.0, 2.0, 1.0), (-1.0, 2.0, -1.0))


def _as_arrays(b, t):
    b = np.asarray(b, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise DomainError("kernel is undefined at t = 0")
    return b, t


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def eval_f(b, t, d: float):
    """2 atan((b+d)/t) + 2 atan((d-b)/t) - atan((b+2d)/t) - atan((2d-b)/t)."""
    b, t = _as_arrays(b, t)
    out = sum(c * np.arctan((k * d + sb * b) / t) for c, k, sb in _F_TERMS)
    return _unwrap(out)


def _pole_blocks(b, t, d):
    out = []
    for x in (d + b, d - b):
        q = x * x + t * t
        out.append((x / q, (x * x - t * t) / (q * q), 2 * x * t / (q * q)))
    p1 = out[0][0] + out[1][0]
    p2 = out[0][1] + out[1][1]
    p3 = out[0][2] + out[1][2]
    return p1, p2, p3


def eval_majorant(b, t, params: Params):
    b, t = _as_arrays(b, t)
    d = params.d
    p1, p2, p3 = _pole_blocks(b, t, d)
    out = math.pi / 4 * (d * params.a1 * p1 + d * d * params.a2 * p2 + params.a3 * p3)
    return _unwrap(out)


def majorant_lower(b, t, params: Params):
    """Lower bound for f: the upper majorant reflected through t -> -t."""
    b, t = _as_arrays(b, t)
    return _unwrap(-np.asarray(eval_majorant(b, -t, params)))


def eval_H(b, t, params: Params):
    b, t = _as_arrays(b, t)
    return _unwrap(np.asarray(eval_f(b, t, params.d)) - np.asarray(eval_majorant(b, t, params)))


def h(t, params: Params):
    """H on the edge b = 1/2."""
    return eval_H(0.5, t, params)


def h_prime(t, params: Params):
    """Derivative of :func:`h`; smooth through t = 0."""
    t = np.asarray(t, dtype=float)
    d, a1, a2, a3 = params.as_tuple()
    out = np.zeros_like(t)
    for c, k, sb in _F_TERMS:
        x = k * d + sb * 0.5
        out = out - c * x / (x * x + t * t)
    maj = np.zeros_like(t)
    for x in (d + 0.5, d - 0.5):
        q = x * x + t * t
        dp1 = -2 * x * t / q**2
        dp2 = -2 * t * (3 * x * x - t * t) / q**3
        dp3 = 2 * x * (x * x - 3 * t * t) / q**3
        maj = maj + d * a1 * dp1 + d * d * a2 * dp2 + a3 * dp3
    return _unwrap(out - math.pi / 4 * maj)


def zero_limits(b, params: Params) -> tuple[np.ndarray, np.ndarray]:
    """Limits of H(b, t) as t -> 0+ and t -> 0-."""
    b = np.asarray(b, dtype=float)
    d = params.d
    inv = 1 / (d + b) + 1 / (d - b)
    inv2 = 1 / (d + b) ** 2 + 1 / (d - b) ** 2
    bracket = math.pi / 4 * (d * params.a1 * inv + d * d * params.a2 * inv2)
    return math.pi - bracket, -math.pi - bracket


def asymptotic_coefficient(params: Params) -> float:
    """L with t^2 H(b, t) -> L as |t| -> oo, for every b."""
    return math.pi / 2 * params.d**2 * (params.a2 - params.a1)


def _tail_constant(params: Params) -> float:
    """K with |H(b, t) - L/t^2| <= K/|t|^3 for |b| <= 1/2, |t| >= 1.

    Uses atan(y) = y - y^3/3 + R with |R| <= |y|^5/5 (valid for all real y)
    and expands each pole term around t = oo.
    """
    d, a1, a2, a3 = params.as_tuple()
    ys = [(abs(c), k * d + 0.5) for c, k, _ in _F_TERMS]
    arctan_part = sum(c * y**3 / 3 + c * y**5 / 5 for c, y in ys)
    y = d + 0.5
    poles = 2 * (d * a1 * y**3 + d * d * a2 * (3 * y**2 + y**4) + a3 * 2 * y)
    return arctan_part + math.pi / 4 * poles


def compute_t0(params: Params) -> float:
    """Cutoff beyond which H <= L/(2 t^2) < 0, i.e. the t^-2 term wins by 2x."""
    L = asymptotic_coefficient(params)
    if not L < 0:
        raise DomainError("no negative t^-2 term: requires a1 > a2")
    return max(1.0, 2 * _tail_constant(params) / abs(L))


# ---------------------------------------------------------------------------
# exact polynomial for h'


def _q(x: float) -> sympy.Rational:
    f = Fraction(repr(float(x)))
    return sympy.Rational(f.numerator, f.denominator)


# 40 digits of pi, far below double rounding of any coefficient.
_PI_Q = sympy.Rational(str(sympy.pi.evalf(40)))


def h_prime_polynomial(params: Params) -> sympy.Poly:
    """Numerator of h'(t) over QQ after clearing the (positive) denominators."""
    t = sympy.Symbol("t")
    d, a1, a2, a3 = (_q(v) for v in params.as_tuple())
    half = sympy.Rational(1, 2)
    expr = 0
    for c, k, sb in _F_TERMS:
        x = int(k) * d + int(sb) * half
        expr -= int(c) * x / (x**2 + t**2)
    maj = 0
    for x in (d + half, d - half):
        q = x**2 + t**2
        maj += d * a1 * (-2 * x * t) / q**2
        maj += d**2 * a2 * (-2 * t * (3 * x**2 - t**2)) / q**3
        maj += a3 * 2 * x * (x**2 - 3 * t**2) / q**3
    expr -= _PI_Q / 4 * maj
    num, den = sympy.fraction(sympy.together(expr))
    poly = sympy.Poly(sympy.expand(num), t, domain="QQ")
    den_poly = sympy.Poly(sympy.expand(den), t, domain="QQ")
    # the denominator is a product of x^2 + t^2 factors times a positive
    # constant, so sign(numerator) == sign(h') everywhere
    if den_poly.LC() < 0:
        poly = -poly
    return poly


def _expected_degree(params: Params) -> int:
    # The t^14 coefficient cancels identically; the t^13 one is pi d^2 (a1 - a2).
    return 13 if params.a1 != params.a2 else 12


def _bisect(fn, lo: float, hi: float, flo: float, tol: float = 1e-14, max_iter: int = 200) -> float:
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            return 0.5 * (lo + hi)
    raise ArithmeticError(f"bisection stalled on [{lo}, {hi}]")


def _root_bound(poly: sympy.Poly) -> float:
    coeffs = [abs(float(c)) for c in poly.all_coeffs()]
    lead = coeffs[0]
    return 1 + max(coeffs[1:]) / lead


def _bracketing_grid(R: float, n: int, jitter: float = 0.0) -> np.ndarray:
    # dense near the origin, sinh-stretched outward
    u = np.linspace(-1.0, 1.0, 2 * n + 1)
    scale = math.asinh(R / 1e-3)
    return 1e-3 * np.sinh(u * scale) * (1 + jitter)


def find_h_prime_roots(params: Params, n_grid: int = 4000, jitter: float = 0.0) -> list[float]:
    """All real roots of h', ascending.

    The numerator of h' is built exactly over QQ; its real root count comes
    from a Sturm sequence (sympy ``count_roots``).  Roots are bracketed by
    sign changes on a grid spanning the Cauchy root bound and refined by
    bisection on h' itself, which has the same sign as the numerator.
    """
    poly = h_prime_polynomial(params)
    deg = poly.degree()
    if deg != _expected_degree(params):
        raise ArithmeticError(f"h' numerator has degree {deg}, expected {_expected_degree(params)}")
    n_exact = int(poly.count_roots())
    R = _root_bound(poly)
    fn = lambda x: float(h_prime(x, params))  # noqa: E731
    roots: list[float] = []
    n = n_grid
    for _ in range(6):
        grid = _bracketing_grid(R, n, jitter)
        vals = np.asarray(h_prime(grid, params))
        roots = []
        for i in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0):
            if vals[i] == 0:
                roots.append(float(grid[i]))
            elif vals[i + 1] != 0:
                roots.append(_bisect(fn, float(grid[i]), float(grid[i + 1]), float(vals[i])))
        roots = sorted(set(roots))
        if len(roots) == n_exact:
            return roots
        n *= 4
    raise ArithmeticError(f"bracketed {len(roots)} roots, Sturm count is {n_exact}")


# ---------------------------------------------------------------------------
# certificate


@dataclass
class Lemma21Certificate:
    params: Params
    roots: list[float] = field(default_factory=list)
    maxima: list[tuple[float, float]] = field(default_factory=list)
    t0: float = float("nan")
    boundary_margin: float = float("nan")
    verdict: bool = False
    reasons: list[str] = field(default_factory=list)
    interior_max: float | None = None

    @property
    def first_failure(self) -> str | None:
        return self.reasons[0] if self.reasons else None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["params"] = dict(zip(("d", "a1", "a2", "a3"), self.params.as_tuple()))
        out["maxima"] = [{"t": t, "h": v} for t, v in self.maxima]
        out["first_failure"] = self.first_failure
        return out


def _t_grid(t0: float, n: int, t_min: float = 1e-4) -> np.ndarray:
    pos = np.union1d(np.geomspace(t_min, t0, n), np.linspace(t_min, t0, n))
    return np.concatenate([-pos[::-1], pos])


def verify_lemma21(
    params: Params,
    t0_override: float | None = None,
    grid_b: int = 201,
    grid_t: int = 4000,
    interior: tuple[int, int] | None = None,
    slack: float = SLACK,
) -> Lemma21Certificate:
    """Boundary check of H <= 0 on [-1/2, 1/2] x ([-t0, 0) u (0, t0]).

    ``interior=(nb, nt)`` additionally samples H on an nb x nt grid of the
    whole rectangle, which the maximum principle makes redundant but which
    is a cheap independent sanity check.
    """
    cert = Lemma21Certificate(params=params)
    reasons = cert.reasons

    if not params.a1 > params.a2:
        reasons.append(f"asymptotic: t^2 H -> {asymptotic_coefficient(params):.6g} is not negative (a1 <= a2)")
        return cert
    t0 = compute_t0(params) if t0_override is None else float(t0_override)
    cert.t0 = t0

    margins = []
    bs = np.linspace(-0.5, 0.5, grid_b)
    upper, lower = zero_limits(bs, params)
    margins.append(float(upper.max()))
    if upper.max() > slack:
        i = int(upper.argmax())
        reasons.append(f"t->0+ limit {upper[i]:.6g} > 0 at b={bs[i]:.4f} (needs a1 + a2 >= 2)")
    if not lower.max() < 0:
        reasons.append(f"t->0- limit {lower.max():.6g} is not negative")

    try:
        cert.roots = find_h_prime_roots(params)
    except ArithmeticError as exc:
        reasons.append(f"roots: {exc}")
    for r in cert.roots:
        left, right = h_prime(r - 1e-6, params), h_prime(r + 1e-6, params)
        if left > 0 > right and r != 0:
            cert.maxima.append((r, float(h(r, params))))
    for r, v in cert.maxima:
        margins.append(v)
        if v > slack:
            reasons.append(f"local maximum h({r:.6f}) = {v:.3g} > 0")

    ts = _t_grid(t0, grid_t)
    for b_edge in (0.5, -0.5):
        vals = np.asarray(eval_H(b_edge, ts, params))
        i = int(vals.argmax())
        margins.append(float(vals[i]))
        if vals[i] > slack:
            reasons.append(f"edge b={b_edge:+.1f}: H({ts[i]:.6g}) = {vals[i]:.3g} > 0")

    for t_edge in (t0, -t0):
        vals = np.asarray(eval_H(bs, t_edge, params))
        i = int(vals.argmax())
        margins.append(float(vals[i]))
        if vals[i] > slack:
            reasons.append(f"edge t={t_edge:+.4g}: H at b={bs[i]:.4f} is {vals[i]:.3g} > 0")

    if interior is not None:
        nb, nt = interior
        B, Tt = np.meshgrid(np.linspace(-0.5, 0.5, nb), _t_grid(t0, nt // 2), indexing="ij")
        vals = np.asarray(eval_H(B, Tt, params))
        cert.interior_max = float(vals.max())
        if cert.interior_max > slack:
            k = np.unravel_index(int(vals.argmax()), vals.shape)
            reasons.append(f"interior: H({B[k]:.4f}, {Tt[k]:.6g}) = {cert.interior_max:.3g} > 0")

    cert.boundary_margin = max(margins)
    cert.verdict = not reasons
    return cert


# ---------------------------------------------------------------------------
# parameter search


@dataclass(frozen=True)
class SearchBox:
    lo: tuple[float, float, float, float] = (0.5 + 1e-6, 1e-6, 1e-6, 1e-6)
    hi: tuple[float, float, float, float] = (2.0, 4.0, 4.0, 4.0)

    def __post_init__(self):
        if len(self.lo) != 4 or len(self.hi) != 4:
            raise ValueError("box needs four lower and four upper bounds")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError("box lower bound exceeds upper bound")
        if not self.lo[0] > 0.5:
            raise ValueError("box must keep d > 1/2")
        if any(l < 0 for l in self.lo[1:]):
            raise ValueError("box must keep a1, a2, a3 >= 0")

    @classmethod
    def parse(cls, text: str) -> "SearchBox":
        """``"dlo:dhi,a1lo:a1hi,a2lo:a2hi,a3lo:a3hi"``; a bare value fixes a coordinate."""
        lo, hi = [], []
        for part in text.split(","):
            a, _, b = part.partition(":")
            lo.append(float(a))
            hi.append(float(b) if b else float(a))
        return cls(tuple(lo), tuple(hi))

    def clip(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def contains(self, x) -> bool:
        return all(l <= v <= h for v, l, h in zip(x, self.lo, self.hi))


@dataclass
class SearchResult:
    params: Params
    certificate: Lemma21Certificate
    evaluations: int
    grid_feasible: int


def _screen(x, n_t: int = 1500) -> bool:
    """Cheap necessary test for admissibility, vectorised."""
    d, a1, a2, a3 = x
    if not (d > 0.5 and a1 > a2 and a1 + a2 >= 2 - 1e-12):
        return False
    p = Params(d, a1, a2, a3)
    t0 = compute_t0(p)
    ts = _t_grid(t0, n_t)
    if np.max(h(ts, p)) > 0:
        return False
    bs = np.linspace(-0.5, 0.5, 41)
    return bool(np.max(eval_H(bs, t0, p)) <= 0 and np.max(eval_H(bs, -t0, p)) <= 0)


def _key(x) -> tuple[float, float]:
    return (x[0] * x[1], x[0])


def search_params(
    box: SearchBox | None = None,
    grid: int = 5,
    start: Params | None = None,
    step0: float = 0.05,
    min_step: float = 1e-4,
    max_iter: int = 2000,
) -> SearchResult:
    """Minimise d*a1 over admissible parameters in ``box``.

    A coarse grid seeds a compass-type pattern search polling all 80 moves
    in {-1, 0, 1}^4 scaled by the current step.  Candidates pass a
    vectorised screen; the final point must pass :func:`verify_lemma21`,
    otherwise the next best screened point is tried.  Ties go to smaller d.
    """
    box = box or SearchBox()
    lo, hi = np.array(box.lo), np.array(box.hi)
    evals = 0
    feasible: list[tuple] = []

    axes = [np.linspace(l, h_, grid) if h_ > l else np.array([l]) for l, h_ in zip(lo, hi)]
    for x in itertools.product(*axes):
        evals += 1
        if _screen(x):
            feasible.append(tuple(float(v) for v in x))
    grid_feasible = len(feasible)
    if start is not None and box.contains(start.as_tuple()):
        evals += 1
        if _screen(start.as_tuple()):
            feasible.append(start.as_tuple())
    if not feasible:
        raise ValueError("no admissible point found in the search box")

    x = min(feasible, key=_key)
    span = np.where(hi > lo, hi - lo, 0.0)
    step = step0
    moves = [np.array(m, dtype=float) for m in itertools.product((-1, 0, 1), repeat=4) if any(m)]
    it = 0
    while step >= min_step and it < max_iter:
        it += 1
        best = x
        for m in moves:
            y = tuple(float(v) for v in box.clip(np.array(x) + step * m * span))
            if y == x or not _key(y) < _key(best):
                continue
            evals += 1
            if _screen(y):
                best = y
        if best != x:
            feasible.append(best)
            x = best
        else:
            step /= 2

    for cand in sorted(set(feasible), key=_key):
        cert = verify_lemma21(Params(*cand))
        evals += 1
        if cert.verdict:
            return SearchResult(Params(*cand), cert, evals, grid_feasible)
    raise ValueError("no screened candidate survived full verification")
