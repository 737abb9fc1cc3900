"""Command-line surface for batch verification and report generation.

Exit codes are a stable scripting contract: 0 for success or a passing
verdict, 1 for a failed verdict or non-convergence, 2 for usage, parse or
shape errors.
"""

from __future__ import annotations

import argparse
import sys as _sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import evolve, landscape, reachability, steer, waypoints
from ._fmt import FormatError, hermitian_matrix, parse_json, require_key
from .model import (
    HypothesisViolation,
    QuantumSystem,
    check_hypotheses,
    load_system,
    load_system_csv,
)

__all__ = ["main", "entry", "RunConfig"]

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    system_path: str | None
    field_path: str | None
    provenance: str | None
    out_dir: str | None
    seed: int


def _load_system_any(path: str) -> QuantumSystem:
    if str(path).endswith(".csv"):
        return load_system_csv(path)
    return load_system(path)


def _load_matrix(path: str, name: str, n: int) -> np.ndarray:
    doc = parse_json(path)
    dim = require_key(doc, "n")
    if dim != n:
        raise FormatError(f"{name} document has n = {dim}, system has n = {n}")
    return hermitian_matrix(require_key(doc, "entries"), name, n)


def _out_dir(args) -> Path | None:
    if getattr(args, "out", None) is None:
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _print_report(report) -> None:
    flags = [
        ("zero trace", report.zero_trace),
        ("symmetric", report.symmetric),
        ("off-diagonal couplings nonzero", report.offdiag_nonzero),
    ]
    for label, value in flags:
        print(f"  {label}: {'ok' if value else 'VIOLATED'}")
    print(f"  controllable: {report.controllable} (Lie dimension {report.lie_dimension})")
    print(f"  min |mu_ij| off-diagonal: {report.offdiag_min:.6g} (tol {report.offdiag_tol:.3g})")


def _cmd_validate(args) -> int:
    paths = args.system
    worst = EXIT_OK

    def run(path: str):
        sys_obj = _load_system_any(path)
        return path, check_hypotheses(sys_obj, args.tol)

    results = []
    if args.jobs > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(run, p) for p in paths]
            for fut in futures:
                try:
                    results.append(fut.result())
                except (FormatError, HypothesisViolation, OSError) as exc:
                    results.append(exc)
    else:
        for p in paths:
            try:
                results.append(run(p))
            except (FormatError, HypothesisViolation, OSError) as exc:
                results.append(exc)

    reports = {}
    for item in results:
        if isinstance(item, HypothesisViolation):
            print(f"INVALID: {item}")
            worst = max(worst, EXIT_VERDICT)
        elif isinstance(item, (FormatError, OSError)):
            print(f"ERROR: {item}", file=_sys.stderr)
            worst = max(worst, EXIT_USAGE)
        else:
            path, report = item
            print(f"{path}:")
            _print_report(report)
            reports[path] = report
            if not report.ok:
                worst = max(worst, EXIT_VERDICT)

    out = _out_dir(args)
    if out is not None:
        from ._fmt import canonical_dumps, write_text

        doc = {
            path: {
                "zero_trace": r.zero_trace,
                "symmetric": r.symmetric,
                "offdiag_nonzero": r.offdiag_nonzero,
                "controllable": r.controllable,
                "lie_dimension": r.lie_dimension,
                "offdiag_min": r.offdiag_min,
                "offdiag_tol": r.offdiag_tol,
            }
            for path, r in reports.items()
        }
        write_text(out / "hypotheses.json", canonical_dumps(doc))
    return worst


def _cmd_controllability(args) -> int:
    sys_obj = _load_system_any(args.system)
    result = reachability.lie_closure(sys_obj.h0, sys_obj.mu)
    print(f"dimension: {result.dimension}")
    print(f"verdict: {result.verdict}")
    if args.basis_csv:
        lines = []
        for e in result.basis:
            flat = []
            for v in e.reshape(-1):
                flat += [repr(float(v.real)), repr(float(v.imag))]
            lines.append(",".join(flat))
        Path(args.basis_csv).write_text("\n".join(lines) + "\n")
    return EXIT_OK if result.verdict in (reachability.VERDICT_SU, reachability.VERDICT_U) else EXIT_VERDICT


def _cmd_waypoints(args) -> int:
    if args.provenance == "theorem1":
        if args.system is None:
            raise FormatError("--provenance theorem1 requires --system (the set depends on mu)")
        sys_obj = _load_system_any(args.system)
        wset = waypoints.theorem1_waypoints(sys_obj.mu)
        mu = sys_obj.mu
    else:
        if args.system is not None:
            sys_obj = _load_system_any(args.system)
            wset = waypoints.theorem3_waypoints(sys_obj.dim)
            mu = sys_obj.mu
        elif args.n is not None:
            wset = waypoints.theorem3_waypoints(args.n)
            mu = None
        else:
            raise FormatError("--provenance theorem3 needs --system or --n")

    out = _out_dir(args) or Path(".")
    waypoints.save_waypoints(wset, out / "waypoints.json")
    print(f"way-points: {len(wset)} (provenance {wset.provenance}, dim {wset.dim})")

    if mu is None:
        print("no system given: set emitted without spanning verdict")
        return EXIT_OK

    hats = np.array([evolve.conjugated_dipole(u, mu) for u in wset.unitaries])
    report = landscape.spanning_rank(hats, rank_tol=args.rank_tol)
    landscape.save_span_report(report, out / "span.txt")
    print(f"spanning verdict: {report.verdict}")
    return EXIT_OK if report.full else EXIT_VERDICT


def _cmd_propagate(args) -> int:
    sys_obj = _load_system_any(args.system)
    field = evolve.load_field(args.field)
    traj = evolve.propagate(sys_obj, field)
    final_defect = float(
        np.linalg.norm(traj.unitaries[-1].conj().T @ traj.unitaries[-1] - np.eye(sys_obj.dim))
    )
    print(f"steps: {field.steps}, horizon: {field.horizon}")
    print(f"final unitarity defect: {final_defect:.3e}")
    if args.trajectory_csv:
        evolve.trajectory_csv(traj, args.trajectory_csv)
        print(f"trajectory written to {args.trajectory_csv}")
    return EXIT_OK


def _cmd_check(args) -> int:
    sys_obj = _load_system_any(args.system)
    field = evolve.load_field(args.field)
    traj = evolve.propagate(sys_obj, field)
    indices = None
    if args.stride > 1:
        indices = np.arange(0, field.steps + 1, args.stride)
    report = landscape.trajectory_independence(traj, indices, rank_tol=args.rank_tol)
    print(f"independence verdict: {report.verdict} ({report.count} samples, dim {report.dim})")

    if args.rho0 is not None and args.obs is not None:
        rho0 = evolve.density_matrix(_load_matrix(args.rho0, "rho0", sys_obj.dim))
        obs = _load_matrix(args.obs, "obs", sys_obj.dim)
        grad = landscape.gradient(sys_obj, field, rho0, obs)
        resid = landscape.kinematic_residual(traj.unitaries[-1], rho0, obs)
        print(f"gradient max |g_m|: {float(np.abs(grad).max()):.6g}")
        print(f"kinematic residual: {resid:.6g}")

    out = _out_dir(args)
    if out is not None:
        landscape.save_span_report(report, out / "span.txt")
    return EXIT_OK if report.full else EXIT_VERDICT


def _cmd_gradient_check(args) -> int:
    sys_obj = _load_system_any(args.system)
    field = evolve.load_field(args.field)
    rho0 = evolve.density_matrix(_load_matrix(args.rho0, "rho0", sys_obj.dim))
    obs = _load_matrix(args.obs, "obs", sys_obj.dim)
    analytic = landscape.gradient(sys_obj, field, rho0, obs)
    numeric = landscape.finite_difference_gradient(sys_obj, field, rho0, obs, h=args.fd_step)
    scale = float(np.abs(analytic).max())
    err = float(np.abs(analytic - numeric).max()) / max(scale, 1e-300)
    print(f"max |analytic|: {scale:.6g}")
    print(f"relative max-norm error vs central differences: {err:.3e}")
    return EXIT_OK if err < args.tol else EXIT_VERDICT


def _cmd_steer(args) -> int:
    sys_obj = _load_system_any(args.system)
    if args.waypoints is not None:
        wset = waypoints.load_waypoints(args.waypoints)
    elif args.provenance == "theorem1":
        wset = waypoints.theorem1_waypoints(sys_obj.mu)
    elif args.provenance == "theorem3":
        wset = waypoints.theorem3_waypoints(sys_obj.dim)
    else:
        raise FormatError("steer needs --waypoints FILE or --provenance {theorem1|theorem3}")

    segment_time = args.segment_time if args.segment_time else steer.default_segment_time(sys_obj)
    opts = steer.SteerOptions(
        segment_time=segment_time,
        steps_per_segment=args.steps,
        max_iters=args.max_iters,
        fid_target=args.fid_target,
        step_size=args.step_size,
        seed=args.seed,
    )
    synthesis = steer.synthesize_through_waypoints(sys_obj, wset, opts)

    out = _out_dir(args) or Path(".")
    evolve.save_field(synthesis.field, out / "field.json")
    landscape.visits_csv(list(synthesis.visits), out / "visits.csv")

    traj = evolve.propagate(sys_obj, synthesis.field)
    span = landscape.trajectory_independence(traj)
    landscape.save_span_report(span, out / "span.txt")

    worst = min(v.fidelity for v in synthesis.visits)
    print(f"segments converged: {sum(s.converged for s in synthesis.segments)}/{len(synthesis.segments)}")
    print(f"worst visit fidelity: {worst:.6f} (target {opts.fid_target})")
    print(f"independence verdict: {span.verdict}")
    ok = synthesis.all_visited and span.full
    return EXIT_OK if ok else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wayspan",
        description="Way-point construction and spanning verification for bilinear control trajectories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the modeling hypotheses of system files")
    p.add_argument("--system", nargs="+", required=True)
    p.add_argument("--tol", type=float, default=None, help="off-diagonal zero threshold")
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("controllability", help="Lie closure dimension and verdict")
    p.add_argument("--system", required=True)
    p.add_argument("--basis-csv", default=None)
    p.set_defaults(func=_cmd_controllability)

    p = sub.add_parser("waypoints", help="emit a way-point set and its spanning verdict")
    p.add_argument("--system", default=None)
    p.add_argument("--n", type=int, default=None, help="dimension (theorem3 without a system)")
    p.add_argument("--provenance", choices=("theorem1", "theorem3"), required=True)
    p.add_argument("--rank-tol", type=float, default=landscape.RANK_TOL)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_waypoints)

    p = sub.add_parser("propagate", help="integrate a control and report unitarity")
    p.add_argument("--system", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--trajectory-csv", default=None)
    p.set_defaults(func=_cmd_propagate)

    p = sub.add_parser("check", help="independence, gradient and critical-point report")
    p.add_argument("--system", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--rho0", default=None)
    p.add_argument("--obs", default=None)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--rank-tol", type=float, default=landscape.RANK_TOL)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("gradient-check", help="analytic gradient vs central differences")
    p.add_argument("--system", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--rho0", required=True)
    p.add_argument("--obs", required=True)
    p.add_argument("--fd-step", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-5)
    p.set_defaults(func=_cmd_gradient_check)

    p = sub.add_parser("steer", help="synthesize a control visiting a way-point list")
    p.add_argument("--system", required=True)
    p.add_argument("--waypoints", default=None)
    p.add_argument("--provenance", choices=("theorem1", "theorem3"), default=None)
    p.add_argument("--segment-time", type=float, default=None)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--fid-target", type=float, default=0.999)
    p.add_argument("--step-size", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_steer)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HypothesisViolation as exc:
        print(f"INVALID: {exc}", file=_sys.stderr)
        return EXIT_VERDICT
    except steer.NotControllableError as exc:
        print(f"FAILED: {exc}", file=_sys.stderr)
        return EXIT_VERDICT
    except (FormatError, FileNotFoundError, ValueError) as exc:
        print(f"ERROR: {exc}", file=_sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    raise SystemExit(main())
