"""Certified approximations of Im log Gamma, Re psi and psi_1 for Re(s) > 0.

Each approximation truncates Binet's first formula after the leading
correction and carries an explicit bound on what was dropped::

    Im log Gamma(s) = (t/2) log|s|^2 + (sigma - 1/2) arg(s) - t - t/(12|s|^2) + R1
    Re psi(s)       = (1/2) log|s|^2 - sigma/(2|s|^2) - (sigma^2 - t^2)/(12|s|^4) + R2
    Re psi_1(s)     = sigma/|s|^2 + (sigma^2 - t^2)/(2|s|^4) + R3
    Im psi_1(s)     = -t/|s|^2 - sigma t/|s|^4 + R4

    |R1| <= 1/(360|s|^3) + 1/(1022 sigma |s|^3)
    |R2| <= 1/(120 sigma |s|^3)
    |R3|, |R4| <= 1/(6|s|^3) + 1/(23 sigma |s|^3)

The bounds rest on sup-norm estimates for the third derivatives of the
Binet kernels, which :func:`binet_kernel_checks` re-verifies numerically.

``reference_log_gamma`` and friends are an independent oracle (upward
recurrence plus a Stirling series) used to check the approximations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .core import SLACK, DomainError

__all__ = [
    "SpecFunResult",
    "im_log_gamma",
    "re_digamma",
    "trigamma",
    "log_gamma_remainder",
    "digamma_remainder",
    "trigamma_remainder",
    "reference_log_gamma",
    "reference_digamma",
    "reference_trigamma",
    "binet_kernel",
    "binet_kernel_checks",
    "grid_points",
    "certify_grid",
]


class SpecFunResult(NamedTuple):
    value: float
    remainder_radius: float

    def contains(self, x: float, slack: float = SLACK) -> bool:
        rounding = 8 * np.finfo(float).eps * max(1.0, abs(self.value))
        return abs(x - self.value) <= self.remainder_radius * (1 + slack) + rounding

    @property
    def lower(self) -> float:
        return self.value - self.remainder_radius

    @property
    def upper(self) -> float:
        return self.value + self.remainder_radius


def _split(s: complex) -> tuple[float, float]:
    s = complex(s)
    sigma, t = s.real, s.imag
    if not (math.isfinite(sigma) and math.isfinite(t)):
        raise DomainError(f"non-finite argument {s}")
    if sigma <= 0:
        raise DomainError(f"Re(s) must be positive, got {sigma}")
    return sigma, t


# -- remainder radii ---------------------------------------------------------

def log_gamma_remainder(s: complex) -> float:
    sigma, t = _split(s)
    m3 = math.hypot(sigma, t) ** 3
    return 1.0 / (360.0 * m3) + 1.0 / (1022.0 * sigma * m3)


def digamma_remainder(s: complex) -> float:
    sigma, t = _split(s)
    return 1.0 / (120.0 * sigma * math.hypot(sigma, t) ** 3)


def trigamma_remainder(s: complex) -> float:
    sigma, t = _split(s)
    m3 = math.hypot(sigma, t) ** 3
    return 1.0 / (6.0 * m3) + 1.0 / (23.0 * sigma * m3)


# -- approximations ----------------------------------------------------------

def im_log_gamma(s: complex) -> SpecFunResult:
    """Im log Gamma(s) on the branch continuous from the positive real axis."""
    sigma, t = _split(s)
    m2 = sigma * sigma + t * t
    value = 0.5 * t * math.log(m2) + (sigma - 0.5) * math.atan2(t, sigma) - t - t / (12.0 * m2)
    return SpecFunResult(value, log_gamma_remainder(s))


def re_digamma(s: complex) -> SpecFunResult:
    sigma, t = _split(s)
    m2 = sigma * sigma + t * t
    value = 0.5 * math.log(m2) - sigma / (2.0 * m2) - (sigma * sigma - t * t) / (12.0 * m2 * m2)
    return SpecFunResult(value, digamma_remainder(s))


def trigamma(s: complex) -> tuple[SpecFunResult, SpecFunResult]:
    """``(Re psi_1(s), Im psi_1(s))`` with a shared remainder radius."""
    sigma, t = _split(s)
    m2 = sigma * sigma + t * t
    radius = trigamma_remainder(s)
    re = sigma / m2 + (sigma * sigma - t * t) / (2.0 * m2 * m2)
    # Im(1/s) = -t/|s|^2; the leading term is negative for t > 0.
    im = -t / m2 - sigma * t / (m2 * m2)
    return SpecFunResult(re, radius), SpecFunResult(im, radius)


# -- reference oracle --------------------------------------------------------

SHIFT_MODULUS = 20.0
MAX_TERMS = 15


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2 (Akiyama-Tanigawa)."""
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0] if n != 1 else Fraction(-1, 2)


def _shift(s: complex) -> tuple[complex, int]:
    """Smallest n >= 0 with |s + n| >= SHIFT_MODULUS."""
    sigma, t = s.real, s.imag
    if abs(s) >= SHIFT_MODULUS:
        return s, 0
    need = math.sqrt(max(SHIFT_MODULUS**2 - t * t, 0.0)) - sigma
    n = max(0, math.ceil(need))
    while abs(s + n) < SHIFT_MODULUS:
        n += 1
    return s + n, n


def _sector_factor(z: complex, power: int) -> float:
    # sec(arg(z)/2)^power widens the real-axis error bound to Re z > 0.
    return (1.0 / math.cos(cmath.phase(z) / 2)) ** power


def _csum(terms: list[complex]) -> complex:
    return complex(math.fsum(w.real for w in terms), math.fsum(w.imag for w in terms))


def _stirling(z: complex, order: int, target: float) -> tuple[list[complex], float]:
    """Terms of the asymptotic series for log Gamma (order 0), psi (1) or psi_1 (2)."""
    if order == 0:
        terms = [(z - 0.5) * cmath.log(z), -z, complex(0.5 * math.log(2 * math.pi))]
    elif order == 1:
        terms = [cmath.log(z), -1 / (2 * z)]
    else:
        terms = [1 / z, 1 / (2 * z * z)]
    for k in range(1, MAX_TERMS + 2):
        b = float(_bernoulli(2 * k))
        if order == 0:
            term = b / (2 * k * (2 * k - 1) * z ** (2 * k - 1))
            bound_power = 2 * k + 2
        elif order == 1:
            term = -b / (2 * k * z ** (2 * k))
            bound_power = 2 * k + 3
        else:
            term = b / z ** (2 * k + 1)
            bound_power = 2 * k + 4
        # |next term| times the sector factor bounds the truncation error.
        err = abs(term) * _sector_factor(z, bound_power)
        if err <= target / 2:
            return terms, err
        if k > MAX_TERMS:
            break
        terms.append(term)
    raise ArithmeticError(
        f"Stirling series cannot reach {target:g} at |z|={abs(z):.3g} within {MAX_TERMS} terms"
    )


def _reference(s: complex, order: int, precision_target: float) -> complex:
    _split(s)
    if not precision_target > 0:
        raise ValueError("precision_target must be positive")
    z, n = _shift(complex(s))
    terms, _ = _stirling(z, order, precision_target)
    shifted = [complex(s) + k for k in range(n)]
    if order == 0:
        terms += [-cmath.log(w) for w in shifted]
    elif order == 1:
        terms += [-1 / w for w in shifted]
    else:
        terms += [1 / (w * w) for w in shifted]
    # Rounding floor: a few ulps of every summand.
    floor = 8 * np.finfo(float).eps * sum(abs(w) for w in terms)
    if precision_target < floor:
        raise ArithmeticError(
            f"precision_target {precision_target:g} is below the rounding floor {floor:.2g}"
        )
    return _csum(terms)


def reference_log_gamma(s: complex, precision_target: float = 1e-10) -> complex:
    """log Gamma(s), continuous branch, accurate to ``precision_target``."""
    return _reference(s, 0, precision_target)


def reference_digamma(s: complex, precision_target: float = 1e-10) -> complex:
    return _reference(s, 1, precision_target)


def reference_trigamma(s: complex, precision_target: float = 1e-10) -> complex:
    return _reference(s, 2, precision_target)


# -- Binet kernels -----------------------------------------------------------

# Power series exponent offsets: f = g/u, g, h = u g with
# g(u) = sum_k B_2k/(2k)! u^(2k-1).
_KERNEL_OFFSET = {"f": -2, "g": -1, "h": 0}
_SERIES_CUTOFF = 2.0
_SERIES_TERMS = 40


def _series_coefficients() -> list[float]:
    return [float(_bernoulli(2 * k) / math.factorial(2 * k)) for k in range(1, _SERIES_TERMS + 1)]


_COEFFS = _series_coefficients()


def _falling(p: int, m: int) -> int:
    out = 1
    for j in range(m):
        out *= p - j
    return out


def _kernel_series(kind: str, u: np.ndarray, order: int) -> np.ndarray:
    off = _KERNEL_OFFSET[kind]
    out = np.zeros_like(u)
    for k, c in enumerate(_COEFFS, start=1):
        p = 2 * k + off
        fac = _falling(p, order)
        if fac == 0:
            continue
        out += c * fac * u ** (p - order)
    return out


def _kernel_closed(kind: str, u: np.ndarray, order: int) -> np.ndarray:
    e = 1.0 / np.expm1(u)
    e1 = -e * (1 + e)
    e2 = e * (1 + e) * (1 + 2 * e)
    e3 = -e * (1 + e) * (1 + 6 * e + 6 * e * e)
    g = [0.5 - 1 / u + e, 1 / u**2 + e1, -2 / u**3 + e2, 6 / u**4 + e3]
    if kind == "g":
        return g[order]
    if kind == "h":
        # (u g)^(m) = u g^(m) + m g^(m-1)
        return u * g[order] + (order * g[order - 1] if order else 0.0)
    # f = g/u, Leibniz with (1/u)^(j) = (-1)^j j!/u^(j+1)
    out = np.zeros_like(u)
    for j in range(order + 1):
        out += math.comb(order, j) * g[order - j] * (-1) ** j * math.factorial(j) / u ** (j + 1)
    return out


def binet_kernel(kind: str, u, order: int = 0):
    """Value or derivative (order <= 3) of the Binet kernel ``kind`` in {f, g, h}.

    f(u) = (1/u)(1/2 - 1/u + 1/(e^u - 1)), g(u) = u f(u), h(u) = u g(u).
    """
    if kind not in _KERNEL_OFFSET:
        raise ValueError(f"unknown kernel {kind!r}")
    if not 0 <= order <= 3:
        raise ValueError("order must be in 0..3")
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("kernels are evaluated on u > 0")
    small = arr <= _SERIES_CUTOFF
    out = np.empty_like(arr)
    if small.any():
        out[small] = _kernel_series(kind, arr[small], order)
    if (~small).any():
        out[~small] = _kernel_closed(kind, arr[~small], order)
    return out if out.ndim else float(out)


def _third_derivative_tail(kind: str, U: float) -> float:
    """Bound on |kernel'''(u)| for all u >= U >= 2, from terms decreasing in u."""
    e = 1.0 / math.expm1(U)
    e1 = e * (1 + e)
    e2 = e1 * (1 + 2 * e)
    e3 = e1 * (1 + 6 * e + 6 * e * e)
    g0, g1, g2, g3 = 0.5, 1 / U**2 + e1, 2 / U**3 + e2, 6 / U**4 + e3
    if kind == "g":
        return g3
    if kind == "h":
        # u e3(u) is decreasing, so u |g'''| <= 6/U^3 + U e3(U)
        return 6 / U**3 + U * e3 + 3 * g2
    return g3 / U + 3 * g2 / U**2 + 6 * g1 / U**3 + 6 * g0 / U**4


@dataclass
class KernelCheck:
    kernel: str
    quantity: str
    computed: float
    expected: float
    ok: bool
    location: float | None = None


@dataclass
class KernelReport:
    checks: list[KernelCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[KernelCheck]:
        return [c for c in self.checks if not c.ok]


_KERNEL_ORIGIN = {
    # (kernel, derivative order) -> exact value at u = 0+
    ("f", 0): 1 / 12, ("f", 1): 0.0, ("f", 2): -1 / 360,
    ("g", 0): 0.0, ("g", 1): 1 / 12, ("g", 2): 0.0,
    ("h", 0): 0.0, ("h", 1): 0.0, ("h", 2): 1 / 6,
}
_THIRD_BOUND = {"f": 1 / 1022, "g": 1 / 120, "h": 1 / 23}


def binet_kernel_checks(
    u_max: float = 50.0,
    ratio_step: float = 1e-3,
    u_min: float = 1e-6,
    u_origin: float = 1e-10,
    origin_tol: float = 1e-10,
) -> KernelReport:
    """Re-verify the kernel facts behind the remainder radii.

    Limits at 0+ are read off at ``u_origin``; the third-derivative sup norms
    are sampled on a geometric grid over [u_min, u_max] and closed with an
    analytic tail bound for u > u_max.  Below ``u_min`` the third derivatives
    are within O(u) of their (sampled) values at the origin.
    """
    report = KernelReport()
    for (kind, order), exact in _KERNEL_ORIGIN.items():
        v = binet_kernel(kind, u_origin, order)
        report.checks.append(
            KernelCheck(kind, f"d^{order} at 0+", v, exact, abs(v - exact) <= origin_tol, u_origin)
        )
    n = int(math.ceil(math.log(u_max / u_min) / math.log1p(ratio_step))) + 1
    grid = np.geomspace(u_min, u_max, n)
    for kind, bound in _THIRD_BOUND.items():
        vals = np.abs(binet_kernel(kind, grid, 3))
        i = int(np.argmax(vals))
        worst = float(vals[i])
        report.checks.append(
            KernelCheck(kind, "sup|d^3| sampled", worst, bound, worst <= bound * (1 + SLACK), float(grid[i]))
        )
        tail = _third_derivative_tail(kind, u_max)
        report.checks.append(KernelCheck(kind, "sup|d^3| tail", tail, bound, tail <= bound, u_max))
    return report


# -- grid certification ------------------------------------------------------


@dataclass
class GridCheck:
    points: int = 0
    violations: list[tuple[str, complex, float, float]] = field(default_factory=list)
    worst_ratio: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def grid_points(d: float, n: int = 200, t_min: float = 0.5, t_max: float = 100.0) -> list[complex]:
    """The four real parts entering the gamma-factor estimates times n heights."""
    sigmas = (0.25 + d / 2, 0.25 + d, 0.5 + d, 0.5 + 2 * d)
    ts = np.linspace(t_min, t_max, n)
    return [complex(s, float(t)) for s in sigmas for t in ts]


def certify_grid(points, slack: float = SLACK) -> GridCheck:
    """Compare each approximation against the oracle at every point.

    The oracle is asked for 1e-3 of the radius and its own error is charged
    against the approximation, so a pass is a strict containment.
    """
    out = GridCheck()
    for s in points:
        lg, psi = im_log_gamma(s), re_digamma(s)
        re1, im1 = trigamma(s)
        cases = (
            ("im_log_gamma", lg, lambda p: reference_log_gamma(s, p).imag),
            ("re_digamma", psi, lambda p: reference_digamma(s, p).real),
            ("re_trigamma", re1, lambda p: reference_trigamma(s, p).real),
            ("im_trigamma", im1, lambda p: reference_trigamma(s, p).imag),
        )
        for name, approx, ref in cases:
            target = max(1e-3 * approx.remainder_radius, 1e-11)
            err = abs(approx.value - ref(target)) + target
            ratio = err / approx.remainder_radius
            out.worst_ratio[name] = max(out.worst_ratio.get(name, 0.0), ratio)
            if ratio > 1 + slack:
                out.violations.append((name, s, err, approx.remainder_radius))
        out.points += 1
    return out
