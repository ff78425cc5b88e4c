"""One test per acceptance criterion; each prints a PASS/FAIL line in the summary."""

import subprocess
import sys
import time
from decimal import Decimal

import numpy as np
from conftest import record

from zerocount import PUBLISHED_PARAMS, factors, kernel, primes, specfun, theorem

P = PUBLISHED_PARAMS
PUBLISHED_ROOTS = np.array([-0.791, -0.346, 0.052, 0.909, 1.335, 2.75, 5.863])
PUBLISHED_MAXIMA = np.array([-0.00019, -0.00022, -0.00015])


def test_criterion_1_kernel_certificate():
    t = time.perf_counter()
    cert = kernel.verify_lemma21(P)
    elapsed = time.perf_counter() - t
    roots = np.array(cert.roots)
    maxima = np.array([v for _, v in cert.maxima])
    root_err = np.max(np.abs(roots - PUBLISHED_ROOTS)) if roots.size == 7 else np.inf
    max_err = np.max(np.abs(maxima - PUBLISHED_MAXIMA)) if maxima.size == 3 else np.inf
    ok = (
        cert.verdict
        and roots.size == 7
        and root_err <= 2e-3
        and max_err <= 5e-5
        and cert.boundary_margin <= 1e-9
        and elapsed < 30
    )
    record(
        1,
        ok,
        f"roots={roots.size} max|dt|={root_err:.2e} max|dh|={max_err:.2e} "
        f"boundary_margin={cert.boundary_margin:.2e} time={elapsed:.1f}s",
    )
    assert ok


def test_criterion_2_specfun_grid():
    t = time.perf_counter()
    pts = specfun.grid_points(P.d, n=200)
    chk = specfun.certify_grid(pts)
    elapsed = time.perf_counter() - t
    ok = len(pts) == 800 and chk.ok and not chk.violations and elapsed < 10
    worst = max(chk.worst_ratio.values())
    record(2, ok, f"points={len(pts)} violations={len(chk.violations)} worst error/radius={worst:.3f} time={elapsed:.1f}s")
    assert ok


def test_criterion_3_gamma_ranges():
    t = time.perf_counter()
    s1 = factors.scan_gamma_residuals(1, P, 1.0, 1000.0, 10_000)
    s2 = factors.scan_gamma_residuals(2, P, 1.0, 1000.0, 10_000)
    elapsed = time.perf_counter() - t
    ok1 = s1.sup <= 0.049 and s1.inf > -0.25
    ok2 = s2.sup <= 0.515 and s2.inf >= 0.0
    ok = ok1 and ok2 and elapsed < 60
    record(
        3,
        ok,
        f"gamma1 sup={s1.sup:.5f} (<=0.049) inf={s1.inf:.5f} (>-0.25); "
        f"gamma2 sup={s2.sup:.5f} (<=0.515) inf={s2.inf:.5f} (>=0); time={elapsed:.1f}s",
    )
    assert ok


def test_criterion_4_s_squared():
    e1 = factors.e_s_squared(1.0, P)
    far = factors.e_s_squared(1e6, P)
    ok = (
        e1.upper <= 2.381
        and e1.lower >= 1.458
        and abs(e1.upper - 2.381) <= 1e-3
        and abs(e1.lower - 1.458) <= 1e-3
        and abs(far.upper - 2) <= 1e-6
        and abs(far.lower - 2) <= 1e-6
    )
    record(
        4,
        ok,
        f"E_u(1)={e1.upper:.6f} E_l(1)={e1.lower:.6f} "
        f"at 1e6: {far.upper - 2:+.1e}/{far.lower - 2:+.1e}",
    )
    assert ok


def test_criterion_5_prime_sums():
    t = time.perf_counter()
    head = primes.head_sum(79, P)
    tail = primes.tail_bound(79, P)
    c = primes.c_constant(P)
    closed = float(np.sqrt((P.d**2 * P.a2 / 2) ** 2 + (P.a3 / 2) ** 2))
    red = primes.verify_prime_power_reduction(np.arange(2.0, 100.0 + 1e-9, 0.5), 10, P)
    elapsed = time.perf_counter() - t
    ok = (
        1.09 <= head <= 1.1084
        and tail <= 4.5243
        and head + tail <= 5.633
        and c <= 0.304
        and abs(c - closed) <= 1e-12
        and red.ok
        and elapsed < 60
    )
    record(
        5,
        ok,
        f"head={head:.6f} tail={tail:.6f} total={head + tail:.6f} c={c:.6f} "
        f"reduction checks={red.checked} violations={len(red.violations)} time={elapsed:.1f}s",
    )
    assert ok


def test_criterion_6_theorem_constants():
    c = theorem.derive_constants(P)
    got = (c.kappa, c.per_degree, c.radius, c.center, c.rational_radius)
    want = tuple(Decimal(x) for x in ("0.194", "5.543", "0.462", "1.919", "6.005"))
    ok = got == want
    record(6, ok, "derived " + " ".join(str(x) for x in got))
    assert ok


def test_criterion_7_empirical_validation():
    t = time.perf_counter()
    table = _bundled_table()
    grid = np.arange(1.0, 99.0 + 1e-9, 0.5)
    rep = theorem.validate(table, grid)
    elapsed = time.perf_counter() - t
    ok = rep.ok and len(rep.rows) == 197 and rep.min_margin >= 2.0 and elapsed < 5
    record(7, ok, f"T points={len(rep.rows)} inside={sum(r.ok for r in rep.rows)} min margin={rep.min_margin:.4f} time={elapsed:.2f}s")
    assert ok


def _bundled_table():
    from importlib import resources

    return theorem.load_zero_table(str(resources.files("zerocount").joinpath("data/zeros_100.txt")))


def test_criterion_8_full_pipeline(tmp_path):
    t = time.perf_counter()
    r = subprocess.run(
        [sys.executable, "-m", "zerocount", "full-certify", "--out", str(tmp_path / "cert.json")],
        capture_output=True,
        text=True,
    )
    elapsed = time.perf_counter() - t
    ok = r.returncode == 0 and elapsed < 180
    msg = r.stderr.strip().splitlines()[-1] if r.stderr.strip() else "all stages passed"
    record(8, ok, f"exit={r.returncode} time={elapsed:.1f}s ({msg})")
    assert ok
