"""Command line entry point.

Exit codes: 0 success, 1 bad input, 2 result not certified, 3 instance too
large for the exhaustive oracle.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from typing import Optional, Sequence

from .errors import InstanceParseError, MinergyError, TooLarge
from .instances import parse_instance
from .model import CostModel, Monomial, NetworkInstance, TwoTerm, check_feasible
from .oracle import oracle_cap, oracle_min
from .sinr import RadioParams, make_schedule, parse_gain, gain_cost_model, reduce_to_flow
from .solver import solve
from .thresholds import exponent_table, lambda_table

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNCERTIFIED = 2
EXIT_TOO_LARGE = 3

MAX_LISTED_TREES = 20


def num(v: float) -> str:
    """12 significant digits, stable across runs."""
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return format(float(v), ".12g")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # argparse only reads "-3" and "-0.5" as values; also accept "-1e-05"
        self._negative_number_matcher = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _read_instance(path: str) -> NetworkInstance:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        return parse_instance(text)
    except InstanceParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _cost_model(args) -> CostModel:
    if args.gain is not None:
        if args.a is not None:
            raise UsageError("--gain and --a are mutually exclusive")
        try:
            return gain_cost_model(parse_gain(args.gain))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.a is None:
        raise UsageError("a cost is required: --a [--b --lambda] or --gain")
    if (args.b is None) != (args.lam is None):
        raise UsageError("--b and --lambda must be given together")
    if args.b is None:
        return Monomial(args.a)
    if args.lam < 0:
        raise UsageError("--lambda must be >= 0")
    return TwoTerm(args.a, args.b, args.lam)


def _write_rows(out, rows):
    w = csv.writer(out, lineterminator="\n")
    for row in rows:
        w.writerow(row)


def cmd_solve(args, out) -> int:
    inst = _read_instance(args.instance)
    model = _cost_model(args)
    sol = solve(inst, model)
    report = check_feasible(inst, sol.flow, args.tol)
    print(f"graph: {sol.label}", file=out)
    if sol.alternatives:
        print("tied: " + " ".join(g.label for g in sol.alternatives), file=out)
    print(f"energy: {num(sol.energy)}", file=out)
    print(f"certified: {'true' if sol.certified else 'false'}", file=out)
    print(f"feasible: {'true' if report.feasible else 'false'}", file=out)
    print(f"regime: {sol.regime}", file=out)
    _write_rows(out, [["sender", "receiver", "amount"]]
                + [[i, j, num(q)] for i, j, q in sol.flow.edges()])
    return EXIT_OK if sol.certified else EXIT_UNCERTIFIED


def cmd_thresholds(args, out) -> int:
    inst = _read_instance(args.instance)
    if (args.a is None) != (args.b is None):
        raise UsageError("lambda thresholds need both --a and --b")
    if args.a is not None:
        table = lambda_table(inst, args.a, args.b, tol=args.root_tol)
    else:
        table = exponent_table(inst, tol=args.root_tol)
    rows = [["kind", "k", "value", "residual", "status"]]
    for k, (root, res) in enumerate(zip(table.a_roots, table.root_residuals), start=1):
        rows.append(["a_k", k, num(root), num(res), "ok"])
    for (name, k), t in table.lambdas.items():
        rows.append([name, k, num(t.value), num(t.residual), t.status])
    _write_rows(out, rows)
    return EXIT_OK


def _grid(lo: float, hi: float, step: float) -> list[float]:
    if not step > 0:
        raise UsageError("--step must be positive")
    if not hi >= lo:
        raise UsageError("empty range: upper bound below lower bound")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


def cmd_sweep(args, out) -> int:
    inst = _read_instance(args.instance)
    if (args.a_range is None) == (args.lambda_range is None):
        raise UsageError("give exactly one of --a-range or --lambda-range")
    thresholds = []
    if args.a_range is not None:
        param = "a"
        if (args.b is None) != (args.lam is None):
            raise UsageError("--b and --lambda must be given together")
        values = _grid(*args.a_range, args.step)

        def model_at(v):
            return Monomial(v) if args.b is None else TwoTerm(v, args.b, args.lam)

        table = exponent_table(inst)
        thresholds = [("$a_0=1$", 1.0)] + [(f"$a_{k}$", r) for k, r in enumerate(table.a_roots, start=1)]
    else:
        param = "lambda"
        if args.a is None or args.b is None:
            raise UsageError("a lambda sweep needs --a and --b")
        values = _grid(*args.lambda_range, args.step)
        if values[0] < 0:
            raise UsageError("lambda must be >= 0")

        def model_at(v):
            return TwoTerm(args.a, args.b, v)

        if args.a != args.b:
            hi, lo = max(args.a, args.b), min(args.a, args.b)
            table = lambda_table(inst, hi, lo)
            for (name, k), t in table.lambdas.items():
                if t.usable:
                    v = t.value if args.a > args.b else 1.0 / t.value
                    sub = {"lambda_0": "0", "lambda_0'": "0'"}.get(name, str(k))
                    thresholds.append((rf"$\lambda_{{{sub}}}$", v))

    rows = []
    csv_rows = [[param, "graph", "energy", "certified"]]
    for v in values:
        sol = solve(inst, model_at(v))
        rows.append({"value": v, "graph": sol.label, "energy": sol.energy,
                     "certified": sol.certified})
        csv_rows.append([num(v), sol.label, num(sol.energy),
                         "true" if sol.certified else "false"])
    _write_rows(out, csv_rows)
    if args.figure:
        from .plotting import plot_sweep

        plot_sweep(rows, param, args.figure, thresholds)
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    inst = _read_instance(args.instance)
    model = _cost_model(args)
    ref = oracle_min(inst, model, cap=oracle_cap())
    sol = solve(inst, model)
    rel = abs(sol.energy - ref.energy) / abs(ref.energy)
    agrees = rel <= 1e-9
    print(f"oracle: {num(ref.energy)}", file=out)
    print(f"argmin trees: {len(ref.trees)}", file=out)
    for tree in ref.trees[:MAX_LISTED_TREES]:
        print(f"  {tree}", file=out)
    if len(ref.trees) > MAX_LISTED_TREES:
        print(f"  ... {len(ref.trees) - MAX_LISTED_TREES} more", file=out)
    print(f"solver: {sol.label} {num(sol.energy)} "
          f"{'certified' if sol.certified else 'uncertified'}", file=out)
    print(f"verdict: {'agrees' if agrees else 'disagrees'} (relative gap {num(rel)})", file=out)
    return EXIT_OK if agrees else EXIT_UNCERTIFIED


def cmd_sinr_schedule(args, out) -> int:
    inst = _read_instance(args.instance)
    try:
        gain = parse_gain(args.gain)
        params = RadioParams(args.p0, args.n0, gain, args.log_base)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    reduced, model, scaling = reduce_to_flow(inst, params)
    sol = solve(reduced, model)
    flow = scaling.data_from_reduced(sol.flow)
    schedule = make_schedule(inst, params, flow, tol=args.tol)
    print(f"graph: {sol.label}", file=out)
    print(f"certified: {'true' if sol.certified else 'false'}", file=out)
    print(f"C0: {num(params.C0)}", file=out)
    print(f"total_energy: {num(schedule.total_energy)}", file=out)
    print(f"makespan: {num(schedule.makespan)}", file=out)
    out.write(schedule.to_csv(num))
    if args.figure:
        from .plotting import plot_schedule

        plot_schedule(schedule, args.figure)
    return EXIT_OK if sol.certified else EXIT_UNCERTIFIED


def _cost_flags(p, with_gain=True):
    p.add_argument("--a", type=float, help="exponent of the first cost term")
    p.add_argument("--b", type=float, help="exponent of the second cost term")
    p.add_argument("--lambda", dest="lam", type=float, help="weight of the second term")
    if with_gain:
        p.add_argument("--gain", help='"mono:a" or "twoterm:a,b,lambda"; cost is 1/gain')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="minergy",
        description="Minimum-energy routing on one-dimensional sensor networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal transmission graph for one cost")
    p.add_argument("instance", help="instance file, or - for stdin")
    _cost_flags(p)
    p.add_argument("--tol", type=float, default=1e-9, help="feasibility tolerance")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("thresholds", help="exponent roots and lambda crossovers as CSV")
    p.add_argument("instance")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--tol", dest="root_tol", type=float, default=1e-10,
                   help="root residual tolerance")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("sweep", help="solve over a parameter grid, CSV to stdout")
    p.add_argument("instance")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--a-range", nargs=2, type=float, metavar=("LO", "HI"))
    g.add_argument("--lambda-range", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--step", type=float, required=True)
    _cost_flags(p, with_gain=False)
    p.add_argument("--figure", help="also render the sweep to this image file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="exhaustive minimum and comparison with the solver")
    p.add_argument("instance")
    _cost_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sinr-schedule", help="sequential schedule for the SINR formulation")
    p.add_argument("instance")
    p.add_argument("--gain", default="mono:2")
    p.add_argument("--p0", type=float, default=1.0)
    p.add_argument("--n0", type=float, default=1.0)
    p.add_argument("--log-base", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--figure", help="also render the schedule to this image file")
    p.set_defaults(func=cmd_sinr_schedule)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (UsageError, MinergyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
