"""Command line front end.

Subcommands: find-squares, inscribe-simplex, sweep, trace, diagnose. Each
writes JSON-lines records with ``--out`` and an SVG figure with ``--svg``.

Exit codes: 0 success, 2 bad input, 3 solver did not converge,
4 non-transverse solution detected. ``SQUAREPEG_THREADS`` caps the BLAS
thread pool.
"""
from __future__ import annotations

import argparse
import contextlib
import os
import sys

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_NON_TRANSVERSE = 4
THREADS_ENV = "SQUAREPEG_THREADS"


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="squarepeg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write JSON-lines records to this file")
        p.add_argument("--svg", help="write an SVG figure to this file")
        p.add_argument("--project-axis", type=int, choices=(0, 1, 2), default=2,
                       help="coordinate axis dropped when drawing 3D input (default 2)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("find-squares", help="inscribed square-like quadrilaterals of a curve")
    p.add_argument("spec", help="curve spec file")
    p.add_argument("--grid", type=_positive(int), default=24)
    p.add_argument("--tol", type=_positive(float), default=1e-11)
    p.add_argument("--min-side", type=_positive(float), default=None)
    common(p)

    p = sub.add_parser("inscribe-simplex", help="inscribe one rotated simplex in a surface")
    p.add_argument("spec", help="surface spec file")
    p.add_argument("--samples", type=_positive(int), default=200,
                   help="random rotations scanned when the spec file has a target")
    p.add_argument("--tol", type=_positive(float), default=1e-10)
    common(p)

    p = sub.add_parser("sweep", help="inscribe for many random rotations and a rotation loop")
    p.add_argument("spec", help="surface spec file")
    p.add_argument("--samples", type=_positive(int), default=100)
    common(p)

    p = sub.add_parser("trace", help="track squares through the blend of two curves")
    p.add_argument("start", help="curve spec at t = 0")
    p.add_argument("end", help="curve spec at t = 1")
    p.add_argument("--grid", type=_positive(int), default=24)
    p.add_argument("--samples", type=int, default=0,
                   help="also run a parity audit at this many values of t")
    common(p)

    p = sub.add_parser("diagnose", help="pi-distance, sidelength audit, limit extraction")
    p.add_argument("spec", help="curve spec file")
    p.add_argument("--grid", type=_positive(int), default=24)
    p.add_argument("--samples", type=_positive(int), default=2000,
                   help="polygon size for the pi-distance estimate")
    p.add_argument("--extract", action="store_true", help="run limit extraction")
    common(p)
    return parser


@contextlib.contextmanager
def _record_sink(path):
    if path is None:
        yield []
        return
    lines = []
    yield lines
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def _orbit_record(dumps, i, o):
    rep = o.representative
    return dumps("orbit", index=i, theta=rep.theta, vertices=rep.vertices, side=rep.side,
                 diagonal=rep.diagonal, residual=rep.residual_norm, det=rep.certificate.det,
                 condition=rep.certificate.condition, certificate=rep.certificate.label,
                 signs=[m.sign for m in o.members])


def cmd_find_squares(args) -> int:
    from . import plotting
    from .records import dumps
    from .slq import find_squares, signed_count
    from .specfile import load_curve

    curve = load_curve(args.spec)
    res = find_squares(curve, grid=args.grid, tol=args.tol, min_side=args.min_side)
    parity = "odd" if res.count % 2 else "even"
    print(f"orbits: {res.count} ({parity})")
    with _record_sink(args.out) as out:
        for i, o in enumerate(res.orbits):
            out.append(_orbit_record(dumps, i, o))
        out.append(dumps("summary", command="find-squares", orbits=res.count, parity=parity,
                         signed_count=signed_count(res), min_side=res.min_side,
                         starts=res.starts, converged=res.converged,
                         all_transverse=res.all_transverse,
                         rotational_family=res.rotational_family))
    if args.svg:
        plotting.plot_squares(curve, res.orbits, args.svg, axis=args.project_axis)
    if res.orbits and not res.all_transverse:
        print("NON-TRANSVERSE family detected")
        if res.rotational_family:
            print("rotational family: every solution is degenerate")
        return EXIT_NON_TRANSVERSE
    if not res.orbits:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _simplex_record(dumps, kind, i, s):
    return dumps(kind, index=i, rotation=s.rotation, scale=s.scale, translation=s.translation,
                 vertices=s.vertices, spherical=s.spherical_coordinates(),
                 edges=s.edge_lengths(), residual=s.residual_norm)


def cmd_inscribe_simplex(args) -> int:
    from . import plotting
    from .records import dumps
    from .simplex import fit_rotation_to_coordinates, inscribe
    from .specfile import load_surface

    spec = load_surface(args.spec)
    extra = {}
    if spec.target is not None:
        sol, mismatch = fit_rotation_to_coordinates(spec.surface, spec.ratio, spec.target,
                                                    samples=args.samples, seed=args.seed)
        extra = {"target": spec.target, "mismatch": mismatch}
    else:
        sol = inscribe(spec.surface, spec.ratio, spec.rotation, seed=args.seed, tol=args.tol)
    print(f"scale {sol.scale:.10g}  residual {sol.residual_norm:.3g}")
    for v in sol.spherical_coordinates():
        print("vertex " + " ".join(f"{x:.6f}" for x in v))
    with _record_sink(args.out) as out:
        out.append(_simplex_record(dumps, "simplex", 0, sol))
        out.append(dumps("summary", command="inscribe-simplex", **extra))
    if args.svg:
        plotting.plot_simplex([sol], args.svg, axis=args.project_axis)
    return EXIT_OK


def cmd_sweep(args) -> int:
    from . import plotting
    from .records import dumps
    from .simplex import sweep_rotations
    from .specfile import load_surface

    spec = load_surface(args.spec)
    sm = sweep_rotations(spec.surface, spec.ratio, m=args.samples, seed=args.seed)
    print(f"success {sm.success}/{sm.total}")
    print(f"loop max jump {sm.loop_max_jump:.3g}")
    with _record_sink(args.out) as out:
        for i, s in enumerate(sm.solutions):
            out.append(_simplex_record(dumps, "sample", i, s))
        for i, msg in sm.failures:
            out.append(dumps("failure", index=i, message=msg))
        out.append(dumps("summary", command="sweep", success=sm.success, total=sm.total,
                         scale_range=sm.scale_range, translation_range=sm.translation_range,
                         loop_max_jump=sm.loop_max_jump))
    if args.svg:
        plotting.plot_sweep(sm, args.svg)
    return EXIT_OK if not sm.failures else EXIT_NO_CONVERGENCE


def cmd_trace(args) -> int:
    from . import plotting
    from .continuation import CurveFamily, parity_audit, track_family
    from .records import dumps
    from .specfile import load_curve

    fam = CurveFamily(load_curve(args.start), load_curve(args.end))
    res = track_family(fam, grid=args.grid)
    events = res.events
    print(f"paths: {len(res.paths)}  events: {len(events)}")
    for e in events:
        print(f"  {e.kind} at t = {e.t:.6f}" + (f" ({e.reason})" if e.reason else ""))
    with _record_sink(args.out) as out:
        for i, p in enumerate(res.paths):
            for t, sol in p.steps:
                out.append(dumps("step", path=i, t=t, theta=sol.theta, vertices=sol.vertices,
                                 det=sol.certificate.det))
        out.append(dumps("events", paths=[p.status for p in res.paths],
                         events=[{"path": i, "kind": e.kind, "t": e.t, "reason": e.reason}
                                 for i, p in enumerate(res.paths) for e in p.events]))
        if args.samples > 0:
            rep = parity_audit(fam, args.samples, grid=args.grid)
            print(f"parity constant: {rep.parity_constant}")
            out.append(dumps("parity", t=[s.t for s in rep.samples],
                             counts=[s.count for s in rep.samples],
                             transverse=[s.transverse for s in rep.samples],
                             constant=rep.parity_constant))
    if args.svg:
        plotting.plot_branches(res.paths, args.svg)
    if any(p.status == "stalled" for p in res.paths):
        return EXIT_NO_CONVERGENCE
    if any(e.kind == "NonTransverse" for e in events):
        print("NON-TRANSVERSE family detected")
        return EXIT_NON_TRANSVERSE
    return EXIT_OK


def cmd_diagnose(args) -> int:
    from . import plotting
    from .curves import pi_distance_detail
    from .ftc import limit_extraction, sidelength_audit
    from .records import dumps
    from .specfile import load_curve

    curve = load_curve(args.spec)
    detail = pi_distance_detail(curve, args.samples)
    audit = sidelength_audit(curve, grid=args.grid, n=args.samples)
    print(f"pi-distance {audit.pi_distance_two_sided:.6g} (two-sided), "
          f"{audit.pi_distance_one_sided:.6g} (one-sided)")
    print(f"smallest inscribed side {audit.min_side:.6g} over {audit.count} orbit(s)")
    print(f"side >= pi-distance: two-sided {audit.holds_two_sided}, "
          f"one-sided {audit.holds_one_sided}")
    with _record_sink(args.out) as out:
        out.append(dumps("audit", min_side=audit.min_side, orbits=audit.count,
                         pi_distance_two_sided=audit.pi_distance_two_sided,
                         pi_distance_one_sided=audit.pi_distance_one_sided,
                         slack=audit.slack, holds_two_sided=audit.holds_two_sided,
                         holds_one_sided=audit.holds_one_sided,
                         chord=detail.polygon.vertices[list(detail.endpoints)]))
        if args.extract:
            ex = limit_extraction(curve, grid=args.grid)
            print(f"limit side {ex.side:.6g}, residual on target {ex.target_residual:.3g}")
            out.append(dumps("extraction", levels=[lv.n for lv in ex.levels],
                             counts=[lv.count for lv in ex.levels], limit=ex.limit,
                             target_residual=ex.target_residual, floor=ex.floor))
    if args.svg:
        plotting.plot_pi_chord(curve, detail, args.svg, axis=args.project_axis)
    return EXIT_OK


COMMANDS = {
    "find-squares": cmd_find_squares,
    "inscribe-simplex": cmd_inscribe_simplex,
    "sweep": cmd_sweep,
    "trace": cmd_trace,
    "diagnose": cmd_diagnose,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get(THREADS_ENV)
    limiter = contextlib.nullcontext()
    if threads:
        from threadpoolctl import threadpool_limits

        try:
            limiter = threadpool_limits(int(threads))
        except ValueError:
            print(f"error: {THREADS_ENV} must be an integer", file=sys.stderr)
            return EXIT_PARSE

    from .errors import ConstructibilityError, CurveError, NoConvergenceError, SpecError

    try:
        with limiter:
            return COMMANDS[args.command](args)
    except (SpecError, CurveError, ConstructibilityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
