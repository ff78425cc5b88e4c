"""Command line front end: ``zerocount <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import factors, kernel, primes, specfun, theorem
from .core import PUBLISHED_PARAMS, FieldSignature, Params

__all__ = ["RunConfig", "full_certify", "main"]


@dataclass
class RunConfig:
    command: str
    params: Params = PUBLISHED_PARAMS
    out: str | None = None
    fmt: str = "json"
    jobs: int = 1
    zeros: str | None = None
    gamma_steps: int = 10_000
    cutoff: int = 79
    slack: float = 1e-9
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.slack > 0:
            raise ValueError("tolerances must be positive")
        if self.jobs < 1:
            raise ValueError("--jobs must be at least 1")


# -- output -------------------------------------------------------------------


def _dump_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return str(x)


def _dump_csv(header, rows, path: str | None) -> None:
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path:
            fh.close()


def _row(name: str, published, computed, ok: bool, slack: float = 0.0, **extra) -> dict:
    out = {"name": name, "published": published, "computed": computed, "slack": slack, "pass": bool(ok)}
    out.update(extra)
    return out


# -- stages -------------------------------------------------------------------
# Each stage returns (name, rows); a stage passes iff all of its rows pass.


def stage_lemma21(params: Params, slack: float):
    cert = kernel.verify_lemma21(params, slack=slack)
    rows = [_row("lemma21.verdict", True, cert.verdict, cert.verdict, reasons=cert.reasons)]
    rows.append(_row("lemma21.boundary_margin", 0.0, cert.boundary_margin, cert.verdict and cert.boundary_margin <= slack, slack))
    rows.append(_row("lemma21.t0", None, cert.t0, True))
    published_maxima = (-0.00019, -0.00022, -0.00015)
    for i, (t, v) in enumerate(cert.maxima):
        ref = published_maxima[i] if i < len(published_maxima) and len(cert.maxima) == 3 else None
        rows.append(_row(f"lemma21.max_h[{i}]", ref, v, v <= slack, slack, t=t))
    return "lemma21", rows


def stage_specfun(params: Params, slack: float):
    chk = specfun.certify_grid(specfun.grid_points(params.d), slack=slack)
    kern = specfun.binet_kernel_checks()
    rows = [_row("specfun.grid_violations", 0, len(chk.violations), chk.ok, slack, worst_ratio=chk.worst_ratio)]
    for c in kern.checks:
        rows.append(_row(f"specfun.kernel.{c.kernel}.{c.quantity}", c.expected, c.computed, c.ok, slack, at=c.location))
    return "specfun", rows


def stage_gamma(params: Params, slack: float, steps: int = 10_000):
    rows = []
    for k in (1, 2):
        s = factors.scan_gamma_residuals(k, params, steps=steps).summary()
        rows.append(_row(f"gamma{k}.residual_sup", s["published_sup"], s["sup"], s["sup_ok"], 0.0, at=s["sup_at"], tail_sup=s["tail_sup"]))
        rows.append(_row(f"gamma{k}.residual_inf", s["published_inf"], s["inf"], s["inf_ok"], 0.0, at=s["inf_at"], tail_inf=s["tail_inf"]))
        exact_lo = min(factors.gamma_residual_exact(k, T, params, "lower") for T in np.geomspace(1, 1000, 200))
        exact_hi = max(factors.gamma_residual_exact(k, T, params, "upper") for T in np.geomspace(1, 1000, 200))
        rows.append(_row(f"gamma{k}.exact_residual_sup", s["published_sup"], exact_hi, exact_hi <= s["published_sup"], info_only=True))
        rows.append(_row(f"gamma{k}.exact_residual_inf", s["published_inf"], exact_lo, exact_lo >= s["published_inf"], info_only=True))
    return "gamma", rows


def stage_s_squared(params: Params, slack: float):
    at1 = factors.e_s_squared(1.0, params)
    far = factors.e_s_squared(1e6, params)
    signs = factors.e_s_squared_derivative_signs(np.geomspace(1, 1e4, 2000), params)
    mono = all(min(v) == 0 for v in signs.values())
    return "s_squared", [
        _row("s_squared.upper_at_1", 2.381, at1.upper, at1.upper <= 2.381),
        _row("s_squared.lower_at_1", 1.458, at1.lower, at1.lower >= 1.458),
        _row("s_squared.limit", 2.0, [far.upper, far.lower], max(abs(far.upper - 2), abs(far.lower - 2)) <= 1e-6),
        _row("s_squared.monotone", True, signs, mono),
    ]


def stage_primes(params: Params, slack: float, cutoff: int = 79):
    rep = primes.prime_sum_report(cutoff, params)
    red = primes.verify_prime_power_reduction(params=params)
    c = primes.c_constant(params)
    return "primes", [
        _row("primes.head_sum", 1.1084, rep.head, rep.head <= 1.1084 + slack and rep.head >= 1.09, slack, cutoff=cutoff),
        _row("primes.tail_bound", 4.5243, rep.tail, rep.tail <= 4.5243 + slack, slack),
        _row("primes.total_per_degree", 5.633, rep.total_per_degree, rep.total_per_degree <= 5.633 + slack, slack),
        _row("primes.c", 0.304, c, c <= 0.304),
        _row("primes.reduction", True, red.ok, red.ok, slack, violations=red.violations[:5]),
    ]


def stage_theorem(params: Params, slack: float):
    c = theorem.derive_constants(params)
    published = {
        "kappa": "0.194",
        "per_degree": "5.543",
        "radius": "0.462",
        "center": "1.919",
        "rational_radius": "6.005",
        "riemann_kappa": "0.097",
        "riemann_radius": "3.962",
    }
    rows = [_row(f"theorem.{k}", v, str(getattr(c, k)), str(getattr(c, k)) == v) for k, v in published.items()]
    rows.append(_row("theorem.raw", None, c.raw, True))
    return "theorem", rows


def stage_validation(zeros: str, slack: float):
    table = theorem.load_zero_table(zeros)
    top = min(99.0, table.ordinates[-1] - 0.5)
    grid = np.arange(1.0, top + 1e-9, 0.5)
    rep = theorem.validate(table, grid)
    return "validation", [
        _row("validation.all_inside", True, rep.ok, rep.ok, source=table.source, points=len(rep.rows)),
        _row("validation.min_margin", 2.0, rep.min_margin, rep.min_margin >= 2.0),
    ]


_ORDER = ("lemma21", "specfun", "gamma", "s_squared", "primes", "theorem", "validation")


def full_certify(cfg: RunConfig) -> tuple[int, dict]:
    """Run every stage; exit code 0 iff every stage passes."""
    p, sl = cfg.params, cfg.slack
    jobs = [
        (stage_lemma21, (p, sl)),
        (stage_specfun, (p, sl)),
        (stage_gamma, (p, sl, cfg.gamma_steps)),
        (stage_s_squared, (p, sl)),
        (stage_primes, (p, sl, cfg.cutoff)),
        (stage_theorem, (p, sl)),
    ]
    if cfg.zeros:
        jobs.append((stage_validation, (cfg.zeros, sl)))
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_call, jobs))
    else:
        results = [_call(j) for j in jobs]
    stages = {}
    for name, rows in results:
        gating = [r for r in rows if not r.get("info_only")]
        stages[name] = {"pass": all(r["pass"] for r in gating), "rows": rows}
    if not cfg.zeros:
        stages["validation"] = {"pass": True, "skipped": True, "rows": []}
    first = next((n for n in _ORDER if n in stages and not stages[n]["pass"]), None)
    report = {
        "params": dict(zip(("d", "a1", "a2", "a3"), p.as_tuple())),
        "stages": {n: stages[n] for n in _ORDER if n in stages},
        "first_failure": first,
        "pass": first is None,
    }
    return (0 if first is None else 1), report


def _call(job):
    fn, args = job
    return fn(*args)


# -- subcommand handlers ------------------------------------------------------


def _params(args) -> Params:
    if getattr(args, "params", None):
        return Params.parse(args.params)
    base = PUBLISHED_PARAMS.as_tuple()
    vals = [getattr(args, k, None) for k in ("d", "a1", "a2", "a3")]
    return Params(*[b if v is None else v for v, b in zip(vals, base)])


def cmd_specfun_table(args) -> int:
    rows = []
    for t in np.linspace(args.t_min, args.t_max, args.steps):
        s = complex(args.sigma, float(t))
        r = specfun.im_log_gamma(s)
        target = max(1e-3 * r.remainder_radius, 1e-11)
        ref = specfun.reference_log_gamma(s, target).imag
        rows.append([args.sigma, float(t), r.value, r.remainder_radius, ref, abs(ref - r.value)])
    _dump_csv(["sigma", "t", "value", "remainder_radius", "reference", "abs_error"], rows, args.out)
    return 0


def cmd_verify_lemma21(args) -> int:
    p = _params(args)
    cert = kernel.verify_lemma21(p, t0_override=args.t0, grid_b=args.grid_b, grid_t=args.grid_t)
    _dump_json(cert.to_dict(), args.out)
    return 0 if cert.verdict else 1


def cmd_search_params(args) -> int:
    box = kernel.SearchBox.parse(args.box) if args.box else kernel.SearchBox()
    try:
        res = kernel.search_params(box, grid=args.grid, start=PUBLISHED_PARAMS)
    except ValueError as exc:
        print(f"search-params: {exc}", file=sys.stderr)
        return 1
    _dump_json(
        {
            "params": dict(zip(("d", "a1", "a2", "a3"), res.params.as_tuple())),
            "d_a1": res.params.da1,
            "evaluations": res.evaluations,
            "grid_feasible": res.grid_feasible,
            "certificate": res.certificate.to_dict(),
        },
        args.out,
    )
    return 0


def cmd_gamma_check(args) -> int:
    p = _params(args)
    scans = [factors.scan_gamma_residuals(k, p, args.t_min, args.t_max, args.steps) for k in (1, 2)]
    rows = []
    run = [[-math.inf, math.inf], [-math.inf, math.inf]]
    for i in range(args.steps):
        row = [float(scans[0].T[i])]
        for k, s in enumerate(scans):
            run[k][0] = max(run[k][0], s.upper[i])
            run[k][1] = min(run[k][1], s.lower[i])
            row += [s.upper[i], s.lower[i], run[k][0], run[k][1]]
        rows.append(row)
    header = ["T"]
    for k in (1, 2):
        header += [f"gamma{k}_upper", f"gamma{k}_lower", f"gamma{k}_running_sup", f"gamma{k}_running_inf"]
    _dump_csv(header, rows, args.out)
    ok = all(s.summary()["sup_ok"] and s.summary()["inf_ok"] for s in scans)
    for s in scans:
        print(json.dumps(s.summary(), sort_keys=True, default=_jsonable), file=sys.stderr)
    return 0 if ok else 1


def cmd_prime_sums(args) -> int:
    p = _params(args)
    rep = primes.prime_sum_report(args.cutoff, p)
    _dump_json(rep.to_dict(), args.out)
    return 0 if rep.total_per_degree <= 5.633 else 1


def cmd_bound(args) -> int:
    sig = FieldSignature(args.nk, args.r1, args.r2, args.log_dk)
    p = _params(args)
    lo, hi = theorem.bound_NK(args.T, sig, p)
    env = theorem.assemble_envelope(args.T, sig, p)
    _dump_json(
        {
            "T": args.T,
            "signature": {"n_K": sig.n_K, "r1": sig.r1, "r2": sig.r2, "log_dK": sig.log_dK},
            "lower": lo,
            "upper": hi,
            "exact_form": {"main_term": env.main_term, "center": env.center, "radius": env.radius, "lower": env.lower, "upper": env.upper},
            "constants": theorem.derive_constants(p).to_dict(),
        },
        args.out,
    )
    return 0


def cmd_validate(args) -> int:
    table = theorem.load_zero_table(args.zeros)
    grid = np.arange(args.t_min, args.t_max + 1e-9, args.step)
    try:
        rep = theorem.validate(table, grid)
    except ValueError as exc:
        print(f"validate: {exc}", file=sys.stderr)
        return 2
    rows = [[r.T, r.count, r.main, r.lower, r.upper, r.margin, r.ok] for r in rep.rows]
    _dump_csv(["T", "count", "main", "lower", "upper", "margin", "ok"], rows, args.out)
    print(f"points={len(rep.rows)} ok={rep.ok} min_margin={rep.min_margin:.4f}", file=sys.stderr)
    return 0 if rep.ok else 1


def cmd_full_certify(args) -> int:
    zeros = args.zeros or os.environ.get(theorem.ZEROS_ENV)
    if args.bundled_zeros and not zeros:
        zeros = str(resources.files("zerocount").joinpath("data/zeros_100.txt"))
    cfg = RunConfig("full-certify", _params(args), args.out, jobs=args.jobs, zeros=zeros, gamma_steps=args.gamma_steps)
    code, report = full_certify(cfg)
    _dump_json(report, args.out)
    if code:
        print(f"full-certify: failed at stage '{report['first_failure']}'", file=sys.stderr)
    return code


# -- parser -------------------------------------------------------------------


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", help="d,a1,a2,a3 (overrides the individual flags)")
    for k in ("d", "a1", "a2", "a3"):
        p.add_argument(f"--{k}", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zerocount", description="Explicit zero-counting bounds for Dedekind zeta functions.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("specfun-table", help="Im log Gamma approximation vs oracle, CSV")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t-min", type=float, default=0.5)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_specfun_table)

    p = sub.add_parser("verify-lemma21", help="kernel majorant certificate, JSON")
    _add_params(p)
    p.add_argument("--grid-b", type=int, default=201)
    p.add_argument("--grid-t", type=int, default=4000)
    p.add_argument("--t0", type=float, help="override the computed cutoff")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_verify_lemma21)

    p = sub.add_parser("search-params", help="minimise d*a1 over admissible parameters")
    p.add_argument("--box", help="dlo:dhi,a1lo:a1hi,a2lo:a2hi,a3lo:a3hi")
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_search_params)

    p = sub.add_parser("gamma-check", help="gamma residual range scan, CSV")
    _add_params(p)
    p.add_argument("--t-min", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=1000.0)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gamma_check)

    p = sub.add_parser("prime-sums", help="head/tail of the Euler product bound, JSON")
    _add_params(p)
    p.add_argument("--cutoff", type=int, default=79)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_prime_sums)

    p = sub.add_parser("bound", help="envelope for N_K(T), JSON")
    _add_params(p)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--nk", type=int, default=1)
    p.add_argument("--r1", type=int, default=1)
    p.add_argument("--r2", type=int, default=0)
    p.add_argument("--log-dk", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("validate", help="check N(T) against a zero table, CSV")
    p.add_argument("--zeros", help=f"zero table (default ${theorem.ZEROS_ENV} or the bundled table)")
    p.add_argument("--t-min", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=99.0)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("full-certify", help="run every stage, JSON bundle")
    _add_params(p)
    p.add_argument("--zeros", help="zero table for the validation stage")
    p.add_argument("--bundled-zeros", action="store_true", help="validate against the bundled table")
    p.add_argument("--gamma-steps", type=int, default=10_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_full_certify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
