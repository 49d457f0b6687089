"""Command line interface: ``aspilp solve|hypspace|encode``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from .bias import Bias
from .driver import DriverConfig, RunReport, run, run_batch
from .hypospace_asp import emit_encoding, generate_space_asp
from .instance import InstanceParseError, load_instance
from .native import enumerate_space
from .rules import CostConfig, HardLimits
from .solver import SolverError

EXIT_OK, EXIT_ERROR, EXIT_NO_ATTEMPT = 0, 1, 2


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _add_parameter_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_argument_group("hard limits and costs")
    for cls in (HardLimits, CostConfig):
        for f in fields(cls):
            group.add_argument(_flag(f.name), dest=f.name, type=int, default=f.default, metavar="N",
                               help=f"default {f.default}")


def _parameters(args) -> tuple[HardLimits, CostConfig]:
    limits = HardLimits(**{f.name: getattr(args, f.name) for f in fields(HardLimits)})
    costs = CostConfig(**{f.name: getattr(args, f.name) for f in fields(CostConfig)})
    return limits, costs


def _optional_number(kind):
    def parse(text: str):
        if text.lower() in ("none", "inf", "unbounded"):
            return None
        return kind(text)
    return parse


def _add_bias_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", help="take the bias from an instance file")
    p.add_argument("--target", help="target predicate, e.g. 'valid_move(cell,time)'")
    p.add_argument("--relevant", nargs="+", default=[], help="relevant predicates")
    p.add_argument("--climit", type=int, default=6, help="exclusive cost limit (default 6)")
    p.add_argument("--no-invention", action="store_true", help="disable predicate invention")


def _bias(args) -> Bias:
    if args.instance:
        return load_instance(args.instance).bias()
    if not args.target or not args.relevant:
        raise ValueError("give --instance, or --target together with --relevant")
    return Bias.from_strings(args.target, args.relevant)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aspilp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="learn from an instance and print attempts")
    solve.add_argument("instance")
    solve.add_argument("--batch", action="store_true",
                       help="search one hypothesis for all examples at once")
    solve.add_argument("--report", help="write a JSON-lines run report to this path")
    solve.add_argument("--profile", choices=("competition", "general"), default="competition")
    solve.add_argument("--climit-min", type=int)
    solve.add_argument("--climit-max", type=_optional_number(int), default=argparse.SUPPRESS,
                       help="integer, or 'inf' for unbounded")
    solve.add_argument("--time-limit", type=_optional_number(float), default=argparse.SUPPRESS,
                       help="seconds per solver call, or 'none'")
    solve.add_argument("--budget", type=float, help="overall wall-clock budget in seconds")
    solve.add_argument("--backend", choices=("asp", "native"), default="asp")
    solve.add_argument("--no-invention", action="store_true")
    solve.add_argument("--workers", type=int, default=1)
    _add_parameter_flags(solve)

    hyp = sub.add_parser("hypspace", help="print the hypothesis space as 'cost<TAB>rule'")
    _add_bias_flags(hyp)
    hyp.add_argument("--backend", choices=("asp", "native"), default="asp")
    _add_parameter_flags(hyp)

    enc = sub.add_parser("encode", help="print the generation program")
    _add_bias_flags(enc)
    _add_parameter_flags(enc)
    return parser


def cmd_solve(args) -> int:
    try:
        instance = load_instance(args.instance)
    except (OSError, InstanceParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    limits, costs = _parameters(args)
    profile = DriverConfig.competition if args.profile == "competition" else DriverConfig.general
    overrides = {"backend": args.backend, "invention_enabled": not args.no_invention,
                 "limits": limits, "costs": costs, "budget": args.budget, "workers": args.workers}
    if args.climit_min is not None:
        overrides["climit_min"] = args.climit_min
    if "climit_max" in args:
        overrides["climit_max"] = args.climit_max
        default_min = profile().climit_min
        if args.climit_min is None and args.climit_max is not None and args.climit_max < default_min:
            overrides["climit_min"] = max(1, args.climit_max)  # a low maximum pulls the minimum down
    if "time_limit" in args:
        overrides["time_limit"] = args.time_limit
    try:
        cfg = profile(**overrides)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    learn = run_batch if args.batch else run
    with RunReport(args.report) as report:
        try:
            best = learn(instance, cfg, sys.stdout, report=report)
        except SolverError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    if best is not None:
        print(f"learned (quality {best.quality}/{best.n_examples}, cost {best.total_cost}):", file=sys.stderr)
        for line in best.lines():
            print("  " + line, file=sys.stderr)
    return EXIT_OK if report.of_kind("attempt") else EXIT_NO_ATTEMPT


def cmd_hypspace(args) -> int:
    try:
        bias = _bias(args)
        limits, costs = _parameters(args)
        if args.backend == "asp":
            space = generate_space_asp(bias, limits, costs, args.climit, invention_enabled=not args.no_invention)
        else:
            space = enumerate_space(bias, limits, costs, args.climit, invention_enabled=not args.no_invention)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for line in space.lines():
        print(line)
    if not space.exhaustive:
        print("warning: enumeration incomplete", file=sys.stderr)
    return EXIT_OK


def cmd_encode(args) -> int:
    try:
        bias = _bias(args)
        limits, costs = _parameters(args)
        bundle = emit_encoding(bias, limits, costs, args.climit, not args.no_invention)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(bundle.text())
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"solve": cmd_solve, "hypspace": cmd_hypspace, "encode": cmd_encode}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
