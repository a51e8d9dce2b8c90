"""``incompat`` command line: jm, bound, delta, sweep, verify.

Exit codes: 0 success (or jointly measurable), 2 negative verdict, 1 error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import BiasedInput, IncompatError
from .io import fmt, fmt_vec, load_triplet, triplet_to_text
from .jm import jm_feasible_general, jm_margin, unbias
from .mur import implement_optimal, mur_lower_bound
from .optimizer import OptimizerOptions, incompatibility, verify_candidate
from .qubit import TOL
from .sweep import rows_to_csv, sweep, sweep_options

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


def _targets(args):
    t = load_triplet(args.input)
    return unbias(t) if args.unbias else t


def _require_unbiased(t):
    if not t.is_unbiased:
        raise BiasedInput("input is biased; rerun with --unbias to drop the biases")


def _out(key, value, stream):
    if isinstance(value, float):
        value = fmt(value)
    elif isinstance(value, bool):
        value = str(value).lower()
    print(f"{key}: {value}", file=stream)


def _print_triplet(prefix, t, stream):
    for j, o in enumerate(t, start=1):
        print(f"{prefix}{j}: bias {fmt(o.bias)} bloch {fmt_vec(o.bloch)}", file=stream)


def cmd_jm(args, stream) -> int:
    t = _targets(args)
    if t.is_unbiased:
        v = jm_margin(t, args.tol)
        _out("method", "fermat_torricelli", stream)
    else:
        v = jm_feasible_general(t, args.tol)
        _out("method", "parent_feasibility", stream)
    _out("margin", v.margin, stream)
    _out("jointly_measurable", v.jointly_measurable, stream)
    _out("boundary", v.boundary, stream)
    if v.ft is not None:
        _out("ft_point", fmt_vec(v.ft.point), stream)
    return EXIT_OK if v.jointly_measurable else EXIT_NEGATIVE


def cmd_bound(args, stream) -> int:
    t = _targets(args)
    _require_unbiased(t)
    rep = mur_lower_bound(t)
    _out("delta", rep.delta, stream)
    _out("bound_2delta", rep.bound, stream)
    _out("ft_point", fmt_vec(rep.p_ft.point), stream)
    _out("min_anchor_distance", rep.min_anchor_dist, stream)
    _out("saturable", rep.saturable, stream)
    if rep.trivial:
        print("note: bound trivial, the targets are jointly measurable", file=stream)
    elif not rep.saturable:
        print("note: not saturable, only the lower bound holds", file=stream)
    else:
        _print_triplet("optimal_", rep.optimal, stream)
        impl = implement_optimal(t)
        print("implementation: setting probability direction", file=stream)
        for k in range(4):
            print(f"  {k} {fmt(impl.probabilities[k])} {fmt_vec(impl.directions[k])}", file=stream)
    return EXIT_OK


def cmd_delta(args, stream) -> int:
    t = _targets(args)
    _require_unbiased(t)
    opts = OptimizerOptions()
    if args.seed is not None:
        opts = replace(opts, seed=args.seed)
    if args.restarts is not None:
        opts = replace(opts, restarts=args.restarts)
    res = incompatibility(t, opts)
    _out("delta_num", res.delta_num, stream)
    _out("method", res.method, stream)
    _out("lower_bound", res.lower_bound, stream)
    _out("gap", res.gap, stream)
    _out("saturated", res.saturated, stream)
    _out("restart_spread", res.restart_spread, stream)
    _print_triplet("optimal_", res.optimal, stream)
    return EXIT_OK


def cmd_sweep(args, stream) -> int:
    stop = args.stop if args.stop is not None else (45.0 if args.pair_angle else 90.0)
    rows = sweep(args.family, args.start, stop, args.steps, sweep_options(args.restarts, args.seed),
                 args.pair_angle)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
        _out("rows", len(rows), stream)
        _out("out", args.out, stream)
    else:
        stream.write(text)
    return EXIT_OK


def cmd_verify(args, stream) -> int:
    t = _targets(args)
    _require_unbiased(t)
    cand = load_triplet(args.candidate)
    rep = verify_candidate(t, cand)
    _out("jm_margin", rep.jm_margin, stream)
    _out("jointly_measurable", rep.jointly_measurable, stream)
    _out("worst_case", rep.worst_case, stream)
    _out("bound_2delta", rep.bound, stream)
    _out("respects_bound", rep.respects_bound, stream)
    _out("meets_bound", rep.meets_bound, stream)
    return EXIT_OK if rep.jointly_measurable else EXIT_NEGATIVE


class _Parser(argparse.ArgumentParser):
    # usage errors must not masquerade as a negative verdict
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="incompat", description="Incompatibility of qubit observable triplets.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_input(sp):
        sp.add_argument("--input", required=True, help="triplet file (JSON)")
        sp.add_argument("--unbias", action="store_true", help="drop the biases before analysis")
        sp.add_argument("--tol", type=float, default=TOL)
        return sp

    with_input(sub.add_parser("jm", help="joint measurability verdict")).set_defaults(func=cmd_jm)
    with_input(sub.add_parser("bound", help="lower bound and optimal implementation")).set_defaults(func=cmd_bound)
    d = with_input(sub.add_parser("delta", help="exact incompatibility"))
    d.add_argument("--seed", type=int)
    d.add_argument("--restarts", type=int)
    d.set_defaults(func=cmd_delta)
    v = with_input(sub.add_parser("verify", help="check a candidate approximation"))
    v.add_argument("--candidate", required=True)
    v.set_defaults(func=cmd_verify)
    s = sub.add_parser("sweep", help="analytic and numeric curves for a family")
    s.add_argument("--family", required=True, choices=["perp", "y"])
    s.add_argument("--start", type=float, default=0.0, help="degrees")
    s.add_argument("--stop", type=float, help="degrees (default 90, or 45 with --pair-angle)")
    s.add_argument("--steps", type=int, default=19, help="number of rows")
    s.add_argument("--pair-angle", action="store_true",
                   help="index perp by p with |cos 2p| = m1.m2 (0 to 45 degrees)")
    s.add_argument("--out")
    s.add_argument("--seed", type=int)
    s.add_argument("--restarts", type=int)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, stream)
    except (IncompatError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
