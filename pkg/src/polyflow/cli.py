"""Command-line entry point: ``polyflow {selftest,flow,check,enumerate}``."""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys

import numpy as np

from . import selftest
from .errors import (
    CollinearPoints,
    InadmissibleLengths,
    InitFailure,
    NewtonDivergence,
    NotCocyclic,
    PolyflowError,
    ZeroEdge,
)
from .flow import FlowConfig, enumerate_critical, random_constrained_polygon, run_flow
from .geometry import fit_circle, is_collinear, oriented_area, perimeter
from .io import DocumentError, TrajectoryWriter, read_polygon, write_clusters
from .relations import brahmagupta_residual, check_cluster_relations, heron_residual
from .shape_space import (
    check_free_edge_critical,
    check_perimeter_constrained_critical,
    cot_multipliers,
    criticality,
    lagrange_multipliers,
    make_length_spec,
    membership_residual,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

COCYCLIC_REPORT_TOL = 1e-6

log = logging.getLogger("polyflow")


class ValidationError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _lengths_arg(values) -> np.ndarray:
    flat = [x for chunk in values for x in chunk]
    return np.asarray(flat, dtype=float)


def _resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("POLYFLOW_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise ValidationError(f"POLYFLOW_SEED must be an integer, got {env!r}") from None


def _edge_lengths(z) -> np.ndarray:
    return np.abs(np.roll(z, -1) - z)


# --------------------------------------------------------------------------
# selftest
# --------------------------------------------------------------------------


def cmd_selftest(args) -> int:
    ctx = selftest.corrupted_kernel() if args.corrupt_kernel else contextlib.nullcontext()
    with ctx:
        results = selftest.run_suites(trials=args.trials, seed=args.seed or 0)
    for r in results:
        print(r.line())
    ok = all(r.ok for r in results)
    print(f"selftest: {'ok' if ok else 'FAILED'} (N in {list(selftest.SIZES)})")
    return EXIT_OK if ok else 1


# --------------------------------------------------------------------------
# flow
# --------------------------------------------------------------------------


def _flow_config(args) -> FlowConfig:
    try:
        return FlowConfig(
            dt=args.dt,
            eps_constraint=args.eps,
            max_steps=args.max_steps,
            grad_tol=args.grad_tol,
            snapshot_stride=args.snapshot_stride,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _flow_input(args, seed):
    if args.polygon is not None:
        doc = read_polygon(args.polygon)
        z0 = doc.vertices
        ell = doc.lengths if doc.lengths is not None else _edge_lengths(z0)
        if args.lengths:
            raise ValidationError("give either --lengths or --polygon, not both")
    else:
        if not args.lengths:
            raise ValidationError("one of --lengths or --polygon is required")
        ell = _lengths_arg(args.lengths)
        z0 = None
    spec = make_length_spec(ell)
    if not spec.admissible:
        raise InadmissibleLengths(spec.describe_failure())
    if z0 is None:
        z0 = random_constrained_polygon(spec, seed)
    return z0, spec.array()


def cmd_flow(args) -> int:
    seed = _resolve_seed(args.seed)
    cfg = _flow_config(args)
    z0, ell = _flow_input(args, seed)
    header = {
        "n": len(ell),
        "lengths": [float(x) for x in ell],
        "seed": seed,
        "config": cfg.to_dict(),
    }
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = TrajectoryWriter(out, header)
        z, traj, reason = run_flow(z0, ell, cfg, on_record=writer.write)
    finally:
        if args.out:
            out.close()
    if args.svg:
        from .plotting import render_trajectory

        render_trajectory(args.svg, traj, title=f"N = {len(ell)}, seed {seed}")
    last = traj.records[-1]
    summary = (
        f"stop={reason.value} steps={last.step} area={last.area:.12g} "
        f"residual={last.residual:.3e} developed_perimeter={last.developed_perimeter:.3e}"
    )
    print(summary, file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


# --------------------------------------------------------------------------
# check
# --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.6e}"


def cmd_check(args) -> int:
    doc = read_polygon(args.polygon)
    z = doc.vertices
    n = doc.n
    ell = doc.lengths if doc.lengths is not None else _edge_lengths(z)
    per = float(ell.sum())
    area = oriented_area(z)
    print(f"n: {n}")
    print(f"area: {area:.12g}")
    print(f"perimeter: {perimeter(z):.12g}")
    if doc.lengths is not None:
        print(f"membership_residual: {_fmt(membership_residual(z, ell))}")
    else:
        print("membership_residual: n/a (document has no lengths; using its own edge lengths)")
    collinear = is_collinear(z)
    print(f"collinear: {str(collinear).lower()}")
    if collinear:
        print("criticality: skipped (collinear polygon; the area gradient is undefined there)")
    else:
        try:
            crit = criticality(z)
            print(f"criticality_residual: {_fmt(crit.residual)}")
            print(f"criticality_residual_over_perimeter: {_fmt(crit.residual / per)}")
        except ZeroEdge as exc:
            print(f"criticality: skipped ({exc})")

    cocyclic = False
    if not collinear:
        fit = fit_circle(z)
        cocyclic = fit.relative_residual <= COCYCLIC_REPORT_TOL
        c = fit.center
        print(
            f"circle: center=({c.real:.12g}, {c.imag:.12g}) radius={fit.radius:.12g} "
            f"relative_residual={_fmt(fit.relative_residual)}"
        )
    print(f"cocyclic: {str(cocyclic).lower()}")

    if cocyclic:
        try:
            rep = lagrange_multipliers(z, fit.circle)
            cot = cot_multipliers(z, fit.circle)
            print("lambda:")
            print("  edge  lambda               -cot(half angle)")
            for k, (lam, ct) in enumerate(zip(rep.lambdas, cot)):
                print(f"  {k:>4}  {lam:+.12e}  {ct:+.12e}")
            print(f"stationarity_residual: {_fmt(rep.max_stationarity_residual)} (mu = 0)")
            flags = [check_free_edge_critical(z, k) for k in range(n)]
            print("diameter_edges: " + " ".join("1" if f else "0" for f in flags))
            print(f"regular_star: {str(check_perimeter_constrained_critical(z)).lower()}")
        except (ZeroEdge, NotCocyclic) as exc:
            print(f"lambda: skipped ({exc})")
    else:
        print("lambda: skipped (polygon is not cocyclic)")

    if n == 3:
        print(f"heron_residual: {_fmt(heron_residual(area, ell))}")
    elif n == 4:
        print(f"brahmagupta_residual: {_fmt(brahmagupta_residual(area, ell))}")
    return EXIT_OK


# --------------------------------------------------------------------------
# enumerate
# --------------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    seed = _resolve_seed(args.seed)
    ell = _lengths_arg(args.lengths)
    if args.starts < 0:
        raise ValidationError("--starts must be non-negative")
    spec = make_length_spec(ell)
    if not (spec.admissible and spec.regular):
        raise InadmissibleLengths(spec.describe_failure())
    cfg = _flow_config(args)
    clusters = enumerate_critical(spec, args.starts, cfg, seed=seed)
    report = check_cluster_relations(clusters, ell)
    extra = {
        "seed": seed,
        "n_starts": clusters.n_starts,
        "n_failed": clusters.n_failed,
        "stop_reasons": clusters.reasons,
    }
    if report.checked:
        extra["relation_residuals"] = report.residuals
    write_clusters(args.out, clusters, ell, report.delta_n, report.betti_sum_bound, extra)
    print(
        f"clusters={len(clusters)} starts={args.starts} failed={clusters.n_failed} "
        f"delta_n={report.delta_n} betti_sum_bound={report.betti_sum_bound}"
    )
    for c in clusters:
        print(f"  area={c.area:+.12g} count={c.count} residual={c.residual:.3e}")
    if report.checked:
        name = "heron" if report.n == 3 else "brahmagupta"
        status = "ok" if report.all_pass else "FAILED"
        worst = max((abs(r) for r in report.residuals), default=0.0)
        print(f"{name}_residuals: {status} (worst {worst:.3e}, tol {report.tolerance:.0e})")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _add_flow_options(p, default_max_steps: int = 50_000) -> None:
    defaults = FlowConfig()
    p.add_argument("--dt", type=float, default=defaults.dt, help="Euler step (dimensionless)")
    p.add_argument("--eps", type=float, default=defaults.eps_constraint,
                   help="relative tolerance on squared edge lengths")
    p.add_argument("--max-steps", type=int, default=default_max_steps)
    p.add_argument("--grad-tol", type=float, default=defaults.grad_tol,
                   help="stop when |a_z| <= grad_tol * perimeter")
    p.add_argument("--snapshot-stride", type=int, default=defaults.snapshot_stride)
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (falls back to $POLYFLOW_SEED, then 0)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polyflow",
        description="Area gradient flow on spaces of polygons with fixed edge lengths.",
    )
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("selftest", help="run the operator identity suites")
    p.add_argument("--trials", type=int, default=20, help="random cases per suite and size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt-kernel", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("flow", help="integrate the area gradient flow")
    p.add_argument("--lengths", type=_float_list, nargs="+", help="edge lengths, e.g. 1,1.3,0.9")
    p.add_argument("--polygon", help="starting polygon document (JSON)")
    p.add_argument("--out", help="trajectory file (JSON lines); stdout if omitted")
    p.add_argument("--svg", help="write the summary figure here")
    _add_flow_options(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("check", help="diagnose a polygon document")
    p.add_argument("polygon", help="polygon document (JSON)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", help="multistart search for critical configurations")
    p.add_argument("--lengths", type=_float_list, nargs="+", required=True)
    p.add_argument("--starts", type=int, default=32)
    p.add_argument("--out", required=True, help="cluster file (JSON)")
    _add_flow_options(p)
    p.set_defaults(func=cmd_enumerate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValidationError, InadmissibleLengths, DocumentError) as exc:
        print(f"polyflow: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NewtonDivergence, InitFailure, CollinearPoints) as exc:
        print(f"polyflow: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"polyflow: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PolyflowError as exc:
        print(f"polyflow: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
