import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerocount import specfun as sf
from zerocount.core import DomainError

mpmath.mp.dps = 30


def mp_loggamma(s):
    return complex(mpmath.loggamma(mpmath.mpc(s.real, s.imag)))


def mp_polygamma(n, s):
    return complex(mpmath.polygamma(n, mpmath.mpc(s.real, s.imag)))


def test_im_log_gamma_real_axis():
    assert sf.im_log_gamma(3.0 + 0j).value == 0.0


def test_im_log_gamma_at_1_plus_i():
    r = sf.im_log_gamma(1 + 1j)
    assert abs(r.value - (-0.30164)) <= r.remainder_radius
    assert abs(r.value - mp_loggamma(1 + 1j).imag) <= r.remainder_radius


def test_im_log_gamma_lemma_point(params):
    s = complex(0.25 + params.d / 2, 0.5)
    r = sf.im_log_gamma(s)
    assert abs(sf.reference_log_gamma(s, 1e-12).imag - r.value) <= r.remainder_radius


def test_re_digamma_at_one():
    r = sf.re_digamma(1 + 0j)
    assert abs(r.value - (-0.5772156649015329)) <= r.remainder_radius


def test_re_digamma_radius_formula():
    s = 1.222 + 1j
    r = sf.re_digamma(s)
    assert r.remainder_radius == pytest.approx(1 / (120 * 1.222 * abs(s) ** 3))
    assert abs(mp_polygamma(0, s).real - r.value) <= r.remainder_radius


def test_trigamma_at_one():
    re, im = sf.trigamma(1 + 0j)
    assert abs(re.value - np.pi**2 / 6) <= re.remainder_radius
    assert im.value == 0.0


def test_trigamma_at_1222_5i():
    s = 1.222 + 5j
    re, im = sf.trigamma(s)
    rad = 1 / (6 * abs(s) ** 3) + 1 / (23 * 1.222 * abs(s) ** 3)
    ref = mp_polygamma(1, s)
    assert re.remainder_radius == pytest.approx(rad)
    assert abs(ref.real - re.value) <= rad
    assert abs(ref.imag - im.value) <= rad


@pytest.mark.parametrize("fn", [sf.im_log_gamma, sf.re_digamma, sf.trigamma])
def test_domain_error(fn):
    with pytest.raises(DomainError):
        fn(0.0 + 1j)
    with pytest.raises(DomainError):
        fn(-1.0 + 1j)


@pytest.mark.parametrize("s", [1 + 0j, 2 + 0j])
def test_reference_log_gamma_trivial(s):
    assert abs(sf.reference_log_gamma(s, 1e-12)) < 1e-12


def test_reference_log_gamma_1_plus_i():
    v = sf.reference_log_gamma(1 + 1j, 1e-12)
    assert abs(v - complex(-0.6509231993018563, -0.3016403204675331)) < 1e-11


@pytest.mark.parametrize("s", [0.3 + 0.2j, 0.861 + 7j, 2.5 - 40j, 15 + 0.1j])
def test_reference_oracles_against_mpmath(s):
    assert abs(sf.reference_log_gamma(s, 1e-12) - mp_loggamma(s)) < 1e-11
    assert abs(sf.reference_digamma(s, 1e-12) - mp_polygamma(0, s)) < 1e-11
    assert abs(sf.reference_trigamma(s, 1e-12) - mp_polygamma(1, s)) < 1e-11


def test_reference_rejects_bad_target():
    with pytest.raises(ValueError):
        sf.reference_log_gamma(1 + 1j, 0.0)
    with pytest.raises(ArithmeticError):
        sf.reference_log_gamma(1 + 1e6j, 1e-15)


def test_binet_kernel_checks_pass():
    rep = sf.binet_kernel_checks()
    assert rep.ok, rep.failures


def test_binet_kernel_origin_limits():
    assert sf.binet_kernel("f", 1e-10) == pytest.approx(1 / 12, abs=1e-10)
    assert abs(sf.binet_kernel("h", 1e-10)) < 1e-10


def test_binet_kernel_g_third_derivative():
    u = np.geomspace(1e-3, 50, 5000)
    assert np.max(np.abs(sf.binet_kernel("g", u, 3))) <= 1 / 120


def test_certify_grid_single_point(params):
    chk = sf.certify_grid([complex(0.5 + params.d, 3.0)])
    assert chk.ok and chk.points == 1


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.01, 200.0))
def test_im_log_gamma_odd_in_t(sigma, t):
    a = sf.im_log_gamma(complex(sigma, t))
    b = sf.im_log_gamma(complex(sigma, -t))
    assert a.value == pytest.approx(-b.value, rel=1e-14, abs=1e-14)
    assert a.remainder_radius == b.remainder_radius


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.5), st.floats(0.5, 50.0))
def test_radius_decreasing_along_rays(theta, r):
    # fixed sigma/|s| ratio
    c = np.cos(min(theta, 1.5))
    s1 = r * cmath.exp(1j * np.arccos(c))
    s2 = 1.5 * s1
    for fn in (sf.log_gamma_remainder, sf.digamma_remainder, sf.trigamma_remainder):
        assert fn(s2) < fn(s1)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.5, 100.0))
def test_enclosure_property(sigma, t):
    s = complex(sigma, t)
    r = sf.im_log_gamma(s)
    assert abs(mp_loggamma(s).imag - r.value) <= r.remainder_radius * (1 + 1e-9)
