"""Command-line entry point: ``g2twistor <subcommand> [options]``.

Exit codes: 0 success, 1 a verification failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import flow, g2, sasakian
from .checks import run_kernel_checks

SCHEMA_VERSION = 1


class InputError(ValueError):
    pass


def _positive(kind=float):
    def parse(text):
        try:
            x = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not (x > 0 and math.isfinite(x)):
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return x

    return parse


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _closed_form_csv(p: flow.ClosedFormParams, r_max: float, points: int) -> str:
    lines = ["t,A,B,C"]
    for r in np.linspace(p.r0, r_max, points):
        s = flow.closed_form(p, float(r))
        lines.append(",".join(f"{v:.17g}" for v in (s.t, s.A, s.B, s.C)))
    return "\n".join(lines) + "\n"


# -- subcommands -------------------------------------------------------------------


def cmd_derive(args) -> int:
    eqs = g2.derive_equations()
    report = g2.check_equivalence(eqs)
    _emit(_json(g2.equivalence_json(report)), args.output)
    return 0 if report.verdict else 1


def cmd_kernel_check(args) -> int:
    results = run_kernel_checks(seed=args.seed, random_forms=args.random_forms)
    out = {
        "schema_version": SCHEMA_VERSION,
        "checks": results,
        "star_sign": g2.star_consistency(),
        "phi0_duality": g2.phi0_self_duality(),
        "passed": all(results.values()),
    }
    _emit(_json(out), args.output)
    return 0 if out["passed"] else 1


def cmd_integrate(args) -> int:
    if args.start is not None:
        start = flow.FlowState(args.t0, *args.start)
        if 0 in args.start:
            raise InputError("start state must have nonzero A, B, C")
    else:
        start = flow.series_start(args.b0)
    traj = flow.integrate(start, args.t_max, args.tol)
    if args.format == "json":
        out = {
            "schema_version": SCHEMA_VERSION,
            "samples": len(traj.t),
            "final": vars(traj.final),
            "events": [e.as_dict() for e in traj.events],
        }
        _emit(_json(out), args.output)
    else:
        _emit(traj.to_csv(), args.output)
        for e in traj.events:
            print(f"event: {e.kind} at t={e.t:.17g} {e.detail}".rstrip(), file=sys.stderr)
    return 0


def cmd_closed_form(args) -> int:
    p = flow.ClosedFormParams(args.r0)
    if args.r_max < args.r0:
        raise InputError("--r-max must be at least --r0")
    _emit(_closed_form_csv(p, args.r_max, args.points), args.output)
    return 0


def cmd_compare(args) -> int:
    p = flow.ClosedFormParams(args.r0)
    if args.r_max < args.r0:
        raise InputError("--r-max must be at least --r0")
    cmp = flow.compare_closed_form(p, args.r_max, args.tol)
    out = {"schema_version": SCHEMA_VERSION, "r0": args.r0, "r_max": args.r_max, **cmp.as_dict()}
    _emit(_json(out), args.output)
    return 0 if cmp.ok else 1


def cmd_explore(args) -> int:
    p = flow.ClosedFormParams(args.r0)
    for dlt in args.delta:
        if not -1 < dlt < 1:
            raise InputError(f"delta {dlt} outside (-1, 1)")
    runs = [flow.explore_deformation(p, dlt, args.t_max, args.tol).as_dict() for dlt in args.delta]
    _emit(_json({"schema_version": SCHEMA_VERSION, "r0": args.r0, "t_max": args.t_max, "runs": runs}),
          args.output)
    return 0


def cmd_topology(args) -> int:
    spec = sasakian.BiquotientSpec(*args.p)
    orbit = None
    if args.samples:
        orbit = sasakian.verify_orbit_lemma(spec, args.samples, args.seed)
    _emit(_json(sasakian.topology_json(spec, orbit)), args.output)
    if orbit is not None and max(orbit.max_forward_distance, orbit.max_converse_distance) > 1e-12:
        return 1
    return 0


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="g2twistor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
        sp.set_defaults(func=fn)
        return sp

    add("derive", cmd_derive, "derive the flow equations from d psi1 = d psi2 = 0")

    sp = add("kernel-check", cmd_kernel_check, "run the exterior-algebra invariant suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--random-forms", type=_positive(int), default=100)

    sp = add("integrate", cmd_integrate, "integrate the flow (CSV trajectory)")
    sp.add_argument("--b0", type=_positive(), default=math.sqrt(2), help="bolt radius B(0) = C(0)")
    sp.add_argument("--start", type=float, nargs=3, metavar=("A", "B", "C"), default=None,
                    help="regular start state instead of the series launch")
    sp.add_argument("--t0", type=float, default=0.0, help="time of --start")
    sp.add_argument("--t-max", type=float, default=10.0)
    sp.add_argument("--tol", type=_positive(), default=flow.DEFAULT_RTOL)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = add("closed-form", cmd_closed_form, "tabulate the exact B = C solution (CSV)")
    sp.add_argument("--r0", type=_positive(), default=1.0)
    sp.add_argument("--r-max", type=_positive(), default=10.0)
    sp.add_argument("--points", type=_positive(int), default=200)

    sp = add("compare", cmd_compare, "compare the integrated flow with the closed form")
    sp.add_argument("--r0", type=_positive(), default=1.0)
    sp.add_argument("--r-max", type=_positive(), default=10.0)
    sp.add_argument("--tol", type=_positive(), default=1e-8)

    sp = add("explore", cmd_explore, "classify B != C deformations")
    sp.add_argument("--r0", type=_positive(), default=1.0)
    sp.add_argument("--delta", type=float, nargs="+", default=[0.0, 0.01, -0.01, 0.1, -0.1])
    sp.add_argument("--t-max", type=_positive(), default=1e3)
    sp.add_argument("--tol", type=_positive(), default=flow.DEFAULT_RTOL)

    sp = add("topology", cmd_topology, "twistor weights and orbit check for S_{p1,p2,p3}")
    sp.add_argument("--p", type=_positive(int), nargs=3, required=True, metavar=("P1", "P2", "P3"))
    sp.add_argument("--samples", type=int, default=0, help="orbit-check samples (0 skips)")
    sp.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "integrate" and args.t_max <= (args.t0 if args.start else 0):
        parser.error("--t-max must exceed the start time")
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (g2.DerivationError, flow.IntegrationError) as exc:
        print(f"{parser.prog} {args.command}: verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
