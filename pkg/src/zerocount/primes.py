"""Euler product bound for the zeta factor.

Per prime ideal of norm alpha and phase phi = T log alpha, the E_u
contribution is q1(alpha, phi) = f1 + f2, with sigma1 = 1/2 + d,
sigma2 = 1/2 + 2d and x = alpha^sigma1:

    f1 = (4/pi) atan(sin phi / (x - cos phi))
         - (2/pi) atan(sin phi / (alpha^sigma2 - cos phi))
         + (d a1/2) log(alpha) (1 - x cos phi) / D
    f2 = (log alpha)^2 x [(d^2 a2/2)((1 + x^2) cos phi - 2x) + (a3/2)(1 - x^2) sin phi] / D^2

where D = 1 - 2x cos phi + x^2.  The sum over rational primes of
max_phi q1 is split into an explicit head (p <= M) and a tail bounded by
c * sum_{p > M} (log p)^2 x/(1 - x)^2, which in turn is
c * [D(sigma1) - head part] with D = (zeta'/zeta)' evaluated at sigma1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import SLACK, EnvelopeTerm, FieldSignature, Params

__all__ = [
    "sieve",
    "primes_upto",
    "von_mangoldt",
    "f1",
    "f2",
    "q1",
    "q2",
    "golden_max",
    "max_over_phase",
    "c_constant",
    "pole_weight",
    "ReductionReport",
    "verify_prime_power_reduction",
    "head_sum",
    "tail_bound",
    "zeta_moments",
    "zeta_log_derivative2",
    "lambda_series",
    "prime_series",
    "PrimeSumReport",
    "prime_sum_report",
    "e_zeta_K",
]

GOLDEN = (math.sqrt(5) - 1) / 2


# -- arithmetic ---------------------------------------------------------------


def sieve(n: int) -> np.ndarray:
    """Boolean primality table for 0..n."""
    is_p = np.ones(max(n + 1, 2), dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return is_p[: n + 1]


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(sieve(n)).astype(np.int64)


def von_mangoldt(n: int) -> np.ndarray:
    """Lambda(k) for k = 0..n."""
    lam = np.zeros(n + 1)
    for p in primes_upto(n):
        pk, lp = int(p), math.log(int(p))
        while pk <= n:
            lam[pk] = lp
            pk *= int(p)
    return lam


# -- phase functions ----------------------------------------------------------


def _parts(alpha, phi, params: Params):
    alpha = np.asarray(alpha, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(alpha < 2):
        raise ValueError("alpha must be >= 2")
    d, a1, a2, a3 = params.as_tuple()
    la = np.log(alpha)
    x = alpha ** (0.5 + d)
    y = alpha ** (0.5 + 2 * d)
    c, s = np.cos(phi), np.sin(phi)
    D = 1 - 2 * x * c + x * x
    p1 = 4 / math.pi * np.arctan(s / (x - c)) - 2 / math.pi * np.arctan(s / (y - c))
    p1 = p1 + d * a1 / 2 * la * (1 - x * c) / D
    p2 = la * la * x * (d * d * a2 / 2 * ((1 + x * x) * c - 2 * x) + a3 / 2 * (1 - x * x) * s) / D**2
    return p1, p2


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def f1(alpha, phi, params: Params):
    return _out(_parts(alpha, phi, params)[0])


def f2(alpha, phi, params: Params):
    return _out(_parts(alpha, phi, params)[1])


def q1(alpha, phi, params: Params):
    a, b = _parts(alpha, phi, params)
    return _out(a + b)


def q2(alpha, phi, params: Params):
    """E_l analogue of q1: its odd part in phi minus its even part."""
    return _out(-np.asarray(q1(alpha, -np.asarray(phi, dtype=float), params)))


# -- phase maximisation -------------------------------------------------------


def golden_max(fn, lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section search for a maximum of a unimodal fn on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    e = a + GOLDEN * (b - a)
    fc, fe = fn(c), fn(e)
    while b - a > tol:
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, e, fe
            e = a + GOLDEN * (b - a)
            fe = fn(e)
    x = 0.5 * (a + b)
    return x, fn(x)


def max_over_phase(alpha: float, params: Params, which: str = "q1", seeds: int = 64, tol: float = 1e-10):
    """Global max over one period: refine every discrete local max of the seed grid."""
    fns = {"q1": q1, "f1": f1, "f2": f2, "q2": q2}
    if which not in fns:
        raise ValueError(f"unknown phase function {which!r}")
    g = fns[which]
    fn = lambda p: float(g(alpha, p, params))  # noqa: E731
    h = 2 * math.pi / seeds
    grid = np.arange(seeds) * h
    vals = np.asarray(g(alpha, grid, params))
    best_phi, best = float(grid[int(vals.argmax())]), float(vals.max())
    for i in range(seeds):
        if vals[i] >= vals[i - 1] and vals[i] >= vals[(i + 1) % seeds]:
            phi, v = golden_max(fn, grid[i] - h, grid[i] + h, tol)
            if v > best:
                best_phi, best = phi, v
    return best_phi % (2 * math.pi), best


# -- constants and reduction --------------------------------------------------


def c_constant(params: Params) -> float:
    """max over unit w of (d^2 a2/2) Re w + (a3/2) Im w."""
    return math.hypot(params.d**2 * params.a2 / 2, params.a3 / 2)


def pole_weight(alpha, exponent: float):
    """(log alpha)^2 alpha^e / (1 - alpha^e)^2."""
    alpha = np.asarray(alpha, dtype=float)
    x = alpha**exponent
    return _out(np.log(alpha) ** 2 * x / (1 - x) ** 2)


@dataclass
class ReductionReport:
    ok: bool = True
    violations: list[str] = field(default_factory=list)
    checked: int = 0
    tail_from: float = float("nan")

    def fail(self, msg: str) -> None:
        self.ok = False
        self.violations.append(msg)


def _crossover_tail(A: float, params: Params) -> bool:
    """For alpha >= A the alpha >= 7 crossover follows from monotone bounds.

    q1(alpha, 0) >= log(alpha)/(x - 1) [(d^2 a2/2) log alpha - d a1/2] and
    2c (log alpha)^2 y/(y - 1)^2 <= 4c (log alpha)^2 / y with y = x^2, so it
    suffices that (d^2 a2/2) - (d a1/2)/log alpha >= 4c log(alpha)/x.  The
    left side grows and the right side decays for alpha >= e^(1/sigma1).
    """
    d, a1, a2, _ = params.as_tuple()
    s1 = 0.5 + d
    if A < math.exp(1 / s1) or A ** (2 * s1) < 3.5:
        return False
    lhs = d * d * a2 / 2 - d * a1 / 2 / math.log(A)
    rhs = 4 * c_constant(params) * math.log(A) / A**s1
    return lhs >= rhs


def verify_prime_power_reduction(
    alpha_grid=None, m_max: int = 10, params: Params | None = None, int_max: int = 10_000
) -> ReductionReport:
    """(1/m) max q1(alpha^m) <= max q1(alpha) and the two crossover inequalities."""
    params = params or Params(0.722, 1.07, 0.93, 0.365)
    if alpha_grid is None:
        alpha_grid = np.arange(2.0, 100.0 + 1e-9, 0.5)
    rep = ReductionReport()
    s1 = 0.5 + params.d
    c = c_constant(params)
    for a in alpha_grid:
        base = max_over_phase(float(a), params)[1]
        for m in range(2, m_max + 1):
            lhs = max_over_phase(float(a) ** m, params)[1] / m
            rep.checked += 1
            if lhs > base + SLACK:
                rep.fail(f"reduction fails at alpha={a}, m={m}: {lhs:.6g} > {base:.6g}")

    bound = lambda a: 2 * c * np.asarray(pole_weight(a, 2 * s1))  # noqa: E731
    small = np.linspace(2.0, 6.0, 4001)
    diff = bound(small) - np.asarray(q1(small, math.pi / 2, params))
    rep.checked += small.size
    if diff.max() > SLACK:
        i = int(diff.argmax())
        rep.fail(f"crossover on [2, 6] fails at alpha={small[i]:.4f}")
    ints = np.arange(7, int_max + 1, dtype=float)
    diff = bound(ints) - np.asarray(q1(ints, 0.0, params))
    rep.checked += ints.size
    if diff.max() > SLACK:
        i = int(diff.argmax())
        rep.fail(f"crossover for alpha >= 7 fails at alpha={ints[i]:.0f}")
    rep.tail_from = float(int_max)
    if not _crossover_tail(float(int_max), params):
        rep.fail(f"monotone tail argument does not close at alpha={int_max}")
    return rep


# -- sums ---------------------------------------------------------------------


def head_sum(M: int, params: Params, rows: list | None = None) -> float:
    """sum_{p <= M} max_phi q1(p, phi); optionally collects (p, phi*, max) rows."""
    total = []
    for p in primes_upto(M):
        phi, v = max_over_phase(float(p), params)
        total.append(v)
        if rows is not None:
            rows.append((int(p), phi, v))
    return math.fsum(total)


def _log_poly_derivatives(k: int, sigma: float, order: int) -> list[np.ndarray]:
    """P_j with d^j/dx^j [(log x)^k x^-sigma] = x^(-sigma-j) P_j(log x)."""
    P = np.zeros(k + 1)
    P[k] = 1.0  # coefficients in ascending powers of L
    out = [P]
    for j in range(order):
        dP = np.array([i * P[i] for i in range(1, len(P))] + [0.0])
        P = dP - (sigma + j) * P
        out.append(P)
    return out


def _zeta_even(m: int) -> float:
    return math.fsum(n ** (-2.0 * m) for n in range(1, 60))


def zeta_moments(sigma: float, N: int = 200, m: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """S_k = sum_n (log n)^k n^-sigma for k = 0, 1, 2, with error radii.

    Euler-Maclaurin at N with the exact incomplete-gamma integral tail; the
    remainder is bounded by 2 zeta(2m)/(2 pi)^(2m) |g^(2m-1)(N)|, valid once
    g^(2m) keeps one sign on [N, oo), which is checked via the real roots
    of its log-polynomial.
    """
    if not sigma > 1:
        raise ValueError("sigma must exceed 1")
    from .specfun import _bernoulli

    L = math.log(N)
    vals, errs = [], []
    n = np.arange(1, N, dtype=float)
    for k in range(3):
        head = math.fsum(np.log(n) ** k * n**-sigma)
        z = (sigma - 1) * L
        integral = math.factorial(k) * math.exp(-z) * sum(z**j / math.factorial(j) for j in range(k + 1))
        integral /= (sigma - 1) ** (k + 1)
        polys = _log_poly_derivatives(k, sigma, 2 * m)
        g = lambda j: N ** (-sigma - j) * np.polynomial.polynomial.polyval(L, polys[j])  # noqa: E731
        corr = sum(float(_bernoulli(2 * j)) / math.factorial(2 * j) * g(2 * j - 1) for j in range(1, m + 1))
        roots = np.polynomial.polynomial.polyroots(polys[2 * m]) if k else np.array([])
        real = [r.real for r in np.atleast_1d(roots) if abs(r.imag) < 1e-12]
        if real and max(real) >= L:
            raise ArithmeticError(f"g^(2m) changes sign beyond N={N}; increase N")
        rem = 2 * _zeta_even(2 * m) / (2 * math.pi) ** (2 * m) * abs(g(2 * m - 1))
        value = head + integral + g(0) / 2 - corr
        vals.append(value)
        errs.append(rem + 16 * np.finfo(float).eps * (abs(head) + abs(integral)))
    return np.array(vals, dtype=float), np.array(errs, dtype=float)


def zeta_log_derivative2(sigma: float, tolerance: float = 1e-10, N: int = 200) -> tuple[float, float]:
    """(value, radius) of (zeta''/zeta - (zeta'/zeta)^2)(sigma) = sum Lambda(n) log n n^-sigma.

    Computed as S2/S0 - (S1/S0)^2 from :func:`zeta_moments`; the radius is an
    interval enclosure of the propagated Euler-Maclaurin error.
    """
    S, r = zeta_moments(sigma, N)
    lo0, hi0 = S[0] - r[0], S[0] + r[0]
    lo1, hi1 = S[1] - r[1], S[1] + r[1]
    lo2, hi2 = S[2] - r[2], S[2] + r[2]
    upper = hi2 / lo0 - (lo1 / hi0) ** 2
    lower = lo2 / hi0 - (hi1 / lo0) ** 2
    value = S[2] / S[0] - (S[1] / S[0]) ** 2
    radius = max(upper - value, value - lower)
    if radius > tolerance:
        raise ArithmeticError(f"radius {radius:.3g} above tolerance {tolerance:.3g}")
    return float(value), float(radius)


def lambda_series(sigma: float, N: int) -> tuple[float, float]:
    """Direct sum_{n <= N} Lambda(n) log n n^-sigma and an integral tail bound.

    Uses Lambda(n) <= log n, so the tail is at most the exact integral of
    (log x)^2 x^-sigma from N - 1.  Only practical well away from sigma = 1.
    """
    lam = von_mangoldt(N)
    n = np.arange(2, N + 1, dtype=float)
    s = math.fsum(lam[2:] * np.log(n) * n**-sigma)
    z = (sigma - 1) * math.log(N - 1)
    tail = 2 * math.exp(-z) * (1 + z + z * z / 2) / (sigma - 1) ** 3
    return s, tail


def prime_series(sigma: float, P: int) -> float:
    """sum_{p <= P} (log p)^2 p^sigma / (1 - p^sigma)^2 (prime-only form)."""
    return math.fsum(np.asarray(pole_weight(primes_upto(P).astype(float), sigma), dtype=float).ravel())


def tail_bound(M: int, params: Params) -> float:
    """c D(sigma1) - c sum_{p <= M} pole weights, with D taken at its upper end."""
    s1 = 0.5 + params.d
    value, radius = zeta_log_derivative2(s1)
    return c_constant(params) * (value + radius - prime_series(s1, M))


@dataclass
class PrimeSumReport:
    cutoff: int
    head: float
    tail: float
    rows: list = field(default_factory=list)
    c: float = float("nan")
    D: float = float("nan")

    @property
    def total_per_degree(self) -> float:
        return self.head + self.tail

    def to_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "head": self.head,
            "tail": self.tail,
            "total_per_degree": self.total_per_degree,
            "c": self.c,
            "D": self.D,
            "rows": [{"p": p, "phi": phi, "max_q1": v} for p, phi, v in self.rows],
        }


def prime_sum_report(M: int = 79, params: Params | None = None) -> PrimeSumReport:
    params = params or Params(0.722, 1.07, 0.93, 0.365)
    rows: list = []
    head = head_sum(M, params, rows)
    tail = tail_bound(M, params)
    D = zeta_log_derivative2(0.5 + params.d)[0]
    return PrimeSumReport(M, head, tail, rows, c_constant(params), D)


def e_zeta_K(sig: FieldSignature, params: Params, M: int = 79) -> EnvelopeTerm:
    """T independent: upper n_K (head + tail), lower its negative."""
    if sig.n_K == 0:
        return EnvelopeTerm(0.0, 0.0)
    per = head_sum(M, params) + tail_bound(M, params)
    return EnvelopeTerm(sig.n_K * per, -sig.n_K * per)
