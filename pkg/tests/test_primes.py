import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerocount import primes
from zerocount.core import FieldSignature, Params


@pytest.fixture(scope="module")
def report(params):
    return primes.prime_sum_report(79, params)


def test_sieve_matches_sympy():
    import sympy

    assert list(primes.primes_upto(1000)) == list(sympy.primerange(2, 1001))


def test_von_mangoldt():
    lam = primes.von_mangoldt(30)
    assert lam[8] == pytest.approx(math.log(2))
    assert lam[27] == pytest.approx(math.log(3))
    assert lam[6] == 0 and lam[1] == 0


@settings(max_examples=50, deadline=None)
@given(st.floats(2.0, 1e4), st.floats(-10.0, 10.0))
def test_q1_periodic(alpha, phi):
    from zerocount import PUBLISHED_PARAMS as p

    assert primes.q1(alpha, phi + 2 * math.pi, p) == pytest.approx(primes.q1(alpha, phi, p), abs=1e-12)


def test_f2_dominates_for_large_alpha(params):
    # |f1| = O(log a * a^(-1/2-d)) while max f2 ~ c (log a)^2 a^(-1/2-d)
    s1 = 0.5 + params.d
    ratios = []
    for a in (1e2, 1e4, 1e6, 1e8):
        f1 = max(abs(primes.f1(a, x, params)) for x in np.linspace(0, 2 * math.pi, 64))
        f2 = primes.max_over_phase(a, params, "f2")[1]
        assert f1 * a**s1 / math.log(a) < 5
        ratios.append(f1 / f2)
    assert ratios == sorted(ratios, reverse=True)


def q1_oracle(alpha, phi, params):
    """q1 from the complex forms arg, Re 1/(1-u), u/(1-u)^2 with u = x e^(i phi)."""
    d, a1, a2, a3 = (mpmath.mpf(v) for v in params.as_tuple())
    alpha, phi = mpmath.mpf(alpha), mpmath.mpf(phi)
    la = mpmath.log(alpha)
    x = alpha ** (mpmath.mpf("0.5") + d)
    y = alpha ** (mpmath.mpf("0.5") + 2 * d)
    e = mpmath.expjpi(phi / mpmath.pi)
    u = x * e
    out = 4 / mpmath.pi * mpmath.arg(x - 1 / e) - 2 / mpmath.pi * mpmath.arg(y - 1 / e)
    out += d * a1 / 2 * la * mpmath.re(1 / (1 - u))
    w = u / (1 - u) ** 2
    return out + la**2 * (d * d * a2 / 2 * mpmath.re(w) + a3 / 2 * mpmath.im(w))


@pytest.mark.parametrize("alpha, phi", [(2.0, 0.0), (2.0, 1.0), (7.5, -2.0), (79.0, 3.0)])
def test_q1_against_complex_form(params, alpha, phi):
    assert primes.q1(alpha, phi, params) == pytest.approx(float(q1_oracle(alpha, phi, params)), rel=1e-11, abs=1e-14)


@pytest.mark.parametrize("alpha", [2.0, 3.0, 10.0, 97.0])
def test_max_dominates_samples(params, alpha):
    _, v = primes.max_over_phase(alpha, params)
    assert v >= primes.q1(alpha, 0.0, params) and v >= primes.q1(alpha, math.pi / 2, params)


@pytest.mark.parametrize("alpha", [4.0, 5.0, 11.0, 100.0, 1e4])
def test_max_q1_below_max_f2(params, alpha):
    assert primes.max_over_phase(alpha, params)[1] <= primes.max_over_phase(alpha, params, "f2")[1] + 1e-9


@pytest.mark.parametrize("alpha", [2.0, 4.0, 30.0, 1e3])
def test_max_f2_pole_bound(params, alpha):
    s1 = 0.5 + params.d
    bound = primes.c_constant(params) * primes.pole_weight(alpha, s1)
    assert primes.max_over_phase(alpha, params, "f2")[1] <= bound + 1e-12


def test_max_over_phase_deterministic(params):
    assert primes.max_over_phase(7.0, params) == primes.max_over_phase(7.0, params)


def test_c_constant(params):
    c = primes.c_constant(params)
    assert c <= 0.304
    assert c == pytest.approx(0.3034181, abs=1e-6)
    assert c == pytest.approx(math.sqrt((0.722**2 * 0.93 / 2) ** 2 + (0.365 / 2) ** 2), abs=1e-12)


def test_c_constant_no_a3():
    p = Params(0.722, 1.07, 0.93, 0.0)
    assert primes.c_constant(p) == pytest.approx(0.722**2 * 0.93 / 2, abs=1e-15)


def test_c_constant_brute_force(params):
    th = np.linspace(0, 2 * math.pi, 10**6, endpoint=False)
    brute = np.max(params.d**2 * params.a2 / 2 * np.cos(th) + params.a3 / 2 * np.sin(th))
    assert brute == pytest.approx(primes.c_constant(params), abs=1e-9)


def test_reduction_at_two(params):
    base = primes.max_over_phase(2.0, params)[1]
    lhs = [primes.max_over_phase(2.0**m, params)[1] / m for m in range(1, 7)]
    assert lhs[0] == base
    assert all(v <= base + 1e-9 for v in lhs)
    assert all(b < a for a, b in zip(lhs[1:], lhs[2:]))


def test_reduction_full_grid(params):
    rep = primes.verify_prime_power_reduction(params=params)
    assert rep.ok, rep.violations[:3]
    assert rep.checked >= 197 * 9


def test_head_sum(report):
    assert 1.09 <= report.head <= 1.1084
    assert len(report.rows) == 22
    assert report.rows[-1][0] == 79


def test_head_sum_empty(params):
    assert primes.head_sum(1, params) == 0.0


def test_tail_bound(report):
    assert report.tail <= 4.5243
    assert report.total_per_degree <= 5.633


def test_zeta_log_derivative2_against_mpmath():
    s = mpmath.mpf("1.222")
    z = mpmath.zeta(s)
    ref = mpmath.zeta(s, derivative=2) / z - (mpmath.zeta(s, derivative=1) / z) ** 2
    value, radius = primes.zeta_log_derivative2(1.222)
    assert radius <= 1e-10
    assert abs(value - float(ref)) <= radius + 1e-12


def test_zeta_log_derivative2_large_sigma():
    value, _ = primes.zeta_log_derivative2(40.0)
    assert value == pytest.approx(math.log(2) ** 2 * 2**-40, rel=1e-4)


def test_two_summation_orders_agree():
    value, radius = primes.zeta_log_derivative2(4.0)
    lam, tail = primes.lambda_series(4.0, 20000)
    pr = primes.prime_series(-4.0, 20000)
    assert lam <= value + radius and value - radius <= lam + tail
    assert pr == pytest.approx(value, abs=1e-8)


def test_head_and_tail_monotone_in_M(params):
    heads = [primes.head_sum(M, params) for M in (20, 40, 79, 120)]
    totals = [h + primes.tail_bound(M, params) for h, M in zip(heads, (20, 40, 79, 120))]
    assert heads == sorted(heads)
    assert all(b <= a + 1e-12 for a, b in zip(totals, totals[1:]))


def test_tail_decreasing(params):
    tails = [primes.tail_bound(M, params) for M in (10, 79, 500, 5000)]
    assert tails == sorted(tails, reverse=True)


def test_e_zeta_K(params, report):
    e = primes.e_zeta_K(FieldSignature(1, 1, 0), params)
    assert e.upper <= 5.633 and e.lower == -e.upper
    z = primes.e_zeta_K(FieldSignature(3, 1, 1), params)
    assert z.upper == pytest.approx(3 * e.upper)
