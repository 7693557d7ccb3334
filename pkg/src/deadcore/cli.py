"""Command-line interface.

Subcommands: check-params, solve, analyze, scan-params,
verify-inequalities, stability, calibrate.  All file output is atomic and
deterministic: identical inputs and seeds produce byte-identical files.
Failures exit nonzero with a machine-readable JSON error on stdout
(reasons: hypothesis_failed, non_convergence, check_failed, bad_input).
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import __version__
from .inequalities import run_suite
from .ioutil import (dumps_canonical, format_complex, load_config,
                     parse_complex, write_field_csv, write_json,
                     write_profiles_csv, write_region_csv)
from .mesh import RadialDomain, build_mesh
from .params import (HypothesisError, centered_axis, classify_region,
                     constants, region_scan)
from .solver import (SolverOptions, check_apriori_bounds, make_problem,
                     solve)
from .sources import build_source
from .stability import (dependence_check, energy_identity_check,
                        uniqueness_probe)
from .support import CalibrationInstance, analyze, calibrate_C, energy_profiles

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_NO_CONVERGENCE = 3
EXIT_CHECK_FAILED = 4

_CONFIG_DEFAULTS = {
    "dim_N": 1,
    "r_inner": 0.0,
    "r_outer": 2.0,
    "n_nodes": 257,
    "m": 0.5,
    "delta": 1.0,
    "source_kind": "zero",
    "source_params": {},
    "damping": 0.5,
    "tol": 1e-9,
    "max_iter": 10000,
    "solver": "picard",
}


def _error(reason: str, message: str, code: int) -> int:
    sys.stdout.write(dumps_canonical(
        {"error": {"reason": reason, "message": message}}))
    return code


def resolve_config(path: str) -> dict:
    cfg = dict(_CONFIG_DEFAULTS)
    cfg.update(load_config(path))
    for key in ("a", "b"):
        if key not in cfg:
            raise ValueError(f"config is missing required key {key!r}")
    return cfg


def problem_from_config(cfg: dict):
    domain = RadialDomain(dim_N=cfg["dim_N"], r_inner=cfg["r_inner"],
                          r_outer=cfg["r_outer"])
    mesh = build_mesh(domain, cfg["n_nodes"])
    source = build_source(mesh, cfg["source_kind"], cfg["source_params"])
    problem = make_problem(cfg["a"], cfg["b"], cfg["m"], source,
                           delta=cfg["delta"])
    opts = SolverOptions(damping=cfg["damping"], tol=cfg["tol"],
                         max_iter=cfg["max_iter"])
    return problem, opts, cfg["solver"]


def _manifest(cfg: dict, seed: int | None = None) -> dict:
    out = {}
    for key in ("dim_N", "r_inner", "r_outer", "n_nodes", "m", "delta",
                "damping", "tol", "max_iter", "solver", "source_kind"):
        out[key] = cfg[key]
    out["a"] = format_complex(cfg["a"])
    out["b"] = format_complex(cfg["b"])
    out["source_params"] = {k: format_complex(v)
                            for k, v in sorted(cfg["source_params"].items())}
    if seed is not None:
        out["seed"] = seed
    out["version"] = __version__
    return out


def _constants_dict(pack) -> dict:
    keys = ("A_delta", "B", "L", "M", "L1", "M0", "M0_tilde")
    return {k: getattr(pack, k) for k in keys if getattr(pack, k) is not None}


def cmd_check_params(args) -> int:
    try:
        a = parse_complex(args.a)
        b = parse_complex(args.b)
        flags = classify_region(a, b)
    except (ValueError, TypeError) as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    report = {
        "a": a, "b": b, "delta": args.delta,
        "in_A": flags["in_A"], "in_B": flags["in_B"],
        "exists": flags["exists"], "unique": flags["unique"],
    }
    if flags["exists"]:
        pack = constants(a, b, args.delta)
        report["constants"] = _constants_dict(pack)
    else:
        report["constants"] = None
    text = dumps_canonical(report)
    sys.stdout.write(text)
    if args.out:
        write_json(args.out, report)
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        cfg = resolve_config(args.config)
        problem, opts, method = problem_from_config(cfg)
    except (ValueError, TypeError, OSError) as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    if args.method:
        method = args.method
    try:
        result = solve(problem, opts=opts, method=method)
    except HypothesisError as exc:
        return _error("hypothesis_failed", str(exc), EXIT_BAD_INPUT)
    pack = constants(cfg["a"], cfg["b"], cfg["delta"], m=cfg["m"],
                     dim_N=cfg["dim_N"])
    bounds = check_apriori_bounds(result.u, problem, pack=pack)
    report = {
        "iterations": result.iterations,
        "residual": result.residual_l2,
        "converged": result.converged,
        "method": result.method,
        "truncation_level": result.truncation_level,
        "bounds": dataclasses.asdict(bounds),
        "constants": _constants_dict(pack),
    }
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    write_json(os.path.join(outdir, "report.json"), report)
    write_field_csv(os.path.join(outdir, "solution.csv"), result.u)
    write_json(os.path.join(outdir, "manifest.json"),
               _manifest(cfg, args.seed))
    sys.stdout.write(dumps_canonical(
        {"iterations": report["iterations"], "residual": report["residual"],
         "converged": report["converged"], "out": outdir}))
    if not result.converged:
        return _error("non_convergence",
                      f"residual {result.residual_l2:.3e} after "
                      f"{result.iterations} iterations", EXIT_NO_CONVERGENCE)
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        cfg = resolve_config(args.config)
        problem, opts, method = problem_from_config(cfg)
    except (ValueError, TypeError, OSError) as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    try:
        result = solve(problem, opts=opts, method=method)
    except HypothesisError as exc:
        return _error("hypothesis_failed", str(exc), EXIT_BAD_INPUT)
    if not result.converged:
        return _error("non_convergence",
                      f"residual {result.residual_l2:.3e}",
                      EXIT_NO_CONVERGENCE)
    try:
        report = analyze(problem, result.u, rho0=args.rho0, C_cal=args.C_cal,
                         threshold_rel=args.threshold_rel,
                         tau_grid=args.tau_grid)
    except HypothesisError as exc:
        return _error("hypothesis_failed", str(exc), EXIT_BAD_INPUT)
    except (ValueError, ArithmeticError) as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    payload = {
        "rho0": args.rho0,
        "rho_max_predicted": report.rho_max_predicted,
        "tau_star": report.tau_star,
        "observed_support_radius": report.observed_support_radius,
        "observed_zero_ball_radius": report.observed_zero_ball_radius,
        "thresholds": report.thresholds,
        "verdicts": report.verdicts,
        "calibration_C": report.calibration_C,
        "solver": {"iterations": result.iterations,
                   "residual": result.residual_l2},
    }
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    write_json(os.path.join(outdir, "report.json"), payload)
    write_field_csv(os.path.join(outdir, "solution.csv"), result.u)
    profiles = energy_profiles(result.u, problem.source_F, problem.m)
    write_profiles_csv(os.path.join(outdir, "profiles.csv"), profiles)
    write_json(os.path.join(outdir, "manifest.json"),
               _manifest(cfg, args.seed))
    sys.stdout.write(dumps_canonical(payload))
    return EXIT_OK


def _axis(args, fixed: complex | None, part: str):
    if fixed is not None:
        return [fixed.real if part == "re" else fixed.imag]
    if args.vertex:
        return np.linspace(args.lo, args.hi, args.n)
    return centered_axis(args.lo, args.hi, args.n)


def cmd_scan_params(args) -> int:
    try:
        fix_a = parse_complex(args.fix_a) if args.fix_a else None
        fix_b = parse_complex(args.fix_b) if args.fix_b else None
        rows = region_scan(_axis(args, fix_a, "re"), _axis(args, fix_a, "im"),
                           _axis(args, fix_b, "re"), _axis(args, fix_b, "im"))
        out = args.out or "region.csv"
        write_region_csv(out, rows)
    except (ValueError, TypeError) as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    n_a = 1 if fix_a is not None else args.n
    n_b = 1 if fix_b is not None else args.n
    sys.stdout.write(dumps_canonical(
        {"rows": (n_a * n_a) * (n_b * n_b), "out": out}))
    return EXIT_OK


def cmd_verify_inequalities(args) -> int:
    try:
        reports = run_suite(which=args.which, samples=args.samples,
                            seed=args.seed, m=args.m)
    except ValueError as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    payload = {"which": args.which, "samples": args.samples, "seed": args.seed,
               "m": args.m,
               "results": [dataclasses.asdict(r) for r in reports]}
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        line = f"{r.name:8s} {status}  samples={r.samples}  worst={r.worst:.6g}"
        if r.constant is not None:
            line += f"  constant={r.constant:.6g}"
        print(line)
    if args.out:
        write_json(args.out, payload)
    if not all(r.passed for r in reports):
        return _error("check_failed", "at least one inequality sweep failed",
                      EXIT_CHECK_FAILED)
    return EXIT_OK


def cmd_stability(args) -> int:
    try:
        cfg = resolve_config(args.config)
        problem, opts, method = problem_from_config(cfg)
    except (ValueError, TypeError, OSError) as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    rng = np.random.default_rng(args.seed)
    pairs = []
    try:
        base = solve(problem, opts=opts, method=method)
        energy = energy_identity_check(base.u, problem)
        for _ in range(args.pairs):
            factor = 1.0 + rng.uniform(0.05, 0.25)
            F2 = problem.source_F.copy()
            F2.values *= factor
            problem2 = make_problem(cfg["a"], cfg["b"], cfg["m"], F2,
                                    delta=cfg["delta"])
            res2 = solve(problem2, opts=opts, method=method)
            rep = dependence_check(base.u, res2.u, problem.source_F, F2,
                                   problem.params, m=cfg["m"])
            pairs.append(dataclasses.asdict(rep))
        probe = uniqueness_probe(problem, n_starts=args.starts,
                                 seed=args.seed, opts=opts, method=method)
    except HypothesisError as exc:
        return _error("hypothesis_failed", str(exc), EXIT_BAD_INPUT)
    ok = (all(p["passed"] for p in pairs) and probe["unique"]
          and energy["pass_imag"] and energy["pass_real"])
    payload = {"pairs": pairs, "probe": probe, "energy": energy,
               "all_passed": ok}
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    write_json(os.path.join(outdir, "stability.json"), payload)
    write_json(os.path.join(outdir, "manifest.json"),
               _manifest(cfg, args.seed))
    sys.stdout.write(dumps_canonical(
        {"pairs_passed": sum(p["passed"] for p in pairs),
         "pairs_total": len(pairs), "unique": probe["unique"],
         "energy_ok": energy["pass_imag"] and energy["pass_real"],
         "all_passed": ok}))
    return EXIT_OK if ok else _error(
        "check_failed", "a stability check failed", EXIT_CHECK_FAILED)


def cmd_calibrate(args) -> int:
    try:
        cfg = resolve_config(args.config)
        scales = [float(s) for s in args.scales.split(",") if s.strip()]
        if not scales:
            raise ValueError("need at least one scale")
    except (ValueError, TypeError, OSError) as exc:
        return _error("bad_input", str(exc), EXIT_BAD_INPUT)
    instances = []
    try:
        for scale in scales:
            scaled = dict(cfg)
            sp = dict(cfg["source_params"])
            if "height" in sp:
                sp["height"] = sp["height"] * scale
            scaled["source_params"] = sp
            problem, opts, method = problem_from_config(scaled)
            res = solve(problem, opts=opts, method=method)
            if not res.converged:
                return _error("non_convergence",
                              f"scale {scale}: residual {res.residual_l2:.3e}",
                              EXIT_NO_CONVERGENCE)
            instances.append(CalibrationInstance(problem=problem, u=res.u,
                                                 rho0=args.rho0))
        C_cal, details = calibrate_C(instances,
                                     threshold_rel=args.threshold_rel)
    except HypothesisError as exc:
        return _error("hypothesis_failed", str(exc), EXIT_BAD_INPUT)
    except ArithmeticError as exc:
        return _error("check_failed", str(exc), EXIT_CHECK_FAILED)
    payload = {"C_cal": C_cal, "rho0": args.rho0, "scales": scales,
               "instances": details}
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    write_json(os.path.join(outdir, "calibration.json"), payload)
    write_json(os.path.join(outdir, "manifest.json"),
               _manifest(cfg, args.seed))
    sys.stdout.write(dumps_canonical({"C_cal": C_cal, "out": outdir}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deadcore",
        description="Radial singular-potential solver and dead-core checks")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-params",
                       help="classify a coefficient pair (a, b)")
    p.add_argument("--a", required=True, help="complex a as 're,im'")
    p.add_argument("--b", required=True, help="complex b as 're,im'")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--out", help="optional JSON output path")
    p.set_defaults(func=cmd_check_params)

    p = sub.add_parser("solve", help="solve one configured problem")
    p.add_argument("--config", required=True)
    p.add_argument("--method", choices=("picard", "newton"))
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze",
                       help="solve, then run the dead-core analysis")
    p.add_argument("--config", required=True)
    p.add_argument("--rho0", type=float, required=True,
                   help="radius of the source-free central ball")
    p.add_argument("--C-cal", dest="C_cal", type=float, default=1.0)
    p.add_argument("--threshold-rel", type=float, default=1e-8)
    p.add_argument("--tau-grid", type=int, default=200)
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("scan-params",
                       help="tabulate region membership on a grid")
    p.add_argument("--n", type=int, default=9, help="points per axis")
    p.add_argument("--lo", type=float, default=-2.0)
    p.add_argument("--hi", type=float, default=2.0)
    p.add_argument("--vertex", action="store_true",
                   help="sample axis endpoints instead of cell centers")
    p.add_argument("--fix-a", help="freeze a at 're,im' and scan b only")
    p.add_argument("--fix-b", help="freeze b at 're,im' and scan a only")
    p.add_argument("--out", help="CSV output path (default region.csv)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_scan_params)

    p = sub.add_parser("verify-inequalities",
                       help="sample the supporting inequalities")
    p.add_argument("--which", default="all",
                   choices=("young", "gn", "trace", "mono", "holder", "all"))
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=float, default=0.5)
    p.add_argument("--out", help="optional JSON output path")
    p.set_defaults(func=cmd_verify_inequalities)

    p = sub.add_parser("stability",
                       help="dependence bounds and uniqueness probes")
    p.add_argument("--config", required=True)
    p.add_argument("--pairs", type=int, default=3)
    p.add_argument("--starts", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory (default .)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("calibrate",
                       help="fit the calibration constant on a family")
    p.add_argument("--config", required=True)
    p.add_argument("--rho0", type=float, required=True)
    p.add_argument("--scales", default="0.5,1.0,2.0",
                   help="comma-separated source height factors")
    p.add_argument("--threshold-rel", type=float, default=1e-8)
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
