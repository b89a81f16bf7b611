"""Benchmark harness CLI: solve, bench, list-problems, validate.

Exit codes: 0 ok, 1 usage error, 2 instance parse error, 3 internal error.
Result documents go to stdout or the --json path; the bench summary table
goes to stderr when stdout carries the documents.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .aos import AosConfig
from .builtins import BUILTIN_NAMES, builtin_problem
from .demo_ops import DEMO_OPERATOR_SETS, demo_operator_set
from .engine import EngineConfig, IslandsConfig, run
from .instances import demo_instance, demo_instances
from .parsers import (
    ParseError,
    parse_json_instance,
    parse_orlib_jsp,
    parse_qaplib,
    parse_solomon,
    parse_tsplib,
)
from .results import ResultRecord, emit_result, emit_results, gap_table

DEFAULT_SEEDS = (42, 123, 456, 789, 2024)

_FORMAT_PARSERS = {
    "tsp": parse_tsplib,
    "qap": parse_qaplib,
    "vrptw": parse_solomon,
    "jsp_int": parse_orlib_jsp,
    "jsp_perm": parse_orlib_jsp,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genopt",
                     description="general-purpose metaheuristic benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance with one seed")
    _add_instance_args(solve)
    _add_engine_args(solve)
    solve.add_argument("--seed", type=int, default=DEFAULT_SEEDS[0])
    solve.add_argument("--best-known", type=float, default=None)
    solve.add_argument("--json", metavar="PATH", default=None,
                       help="write the result document to PATH instead of stdout")

    bench = sub.add_parser("bench", help="instances x seeds sweep with a gap table")
    bench.add_argument("--problem", default=None)
    bench.add_argument("--instance", action="append", required=True,
                       help="repeatable; path, demo:NAME, or JSON payload file")
    bench.add_argument("--best-known", action="append", type=float, default=None,
                       help="repeatable, aligned with --instance order")
    bench.add_argument("--seeds", default=",".join(str(s) for s in DEFAULT_SEEDS),
                       help="comma-separated seed list")
    _add_engine_args(bench)
    bench.add_argument("--json", metavar="PATH", default=None)

    sub.add_parser("list-problems", help="list built-in problems and demo instances")

    validate = sub.add_parser("validate", help="parse an instance without solving")
    _add_instance_args(validate)
    return parser


def _add_instance_args(cmd):
    cmd.add_argument("--problem", default=None,
                     help=f"one of: {', '.join(BUILTIN_NAMES)}")
    cmd.add_argument("--instance", required=True,
                     help="instance path, demo:NAME, or JSON payload file")


def _add_engine_args(cmd):
    cmd.add_argument("--generations", type=int, default=1000)
    cmd.add_argument("--time-limit", type=float, default=None)
    cmd.add_argument("--pop", type=int, default=None,
                     help="population size (default: cache-aware automatic)")
    cmd.add_argument("--team-size", type=int, default=128)
    cmd.add_argument("--islands", type=int, default=1)
    cmd.add_argument("--migration", choices=("ring", "global_top_n", "hybrid"),
                     default="ring")
    cmd.add_argument("--migration-interval", type=int, default=100)
    cmd.add_argument("--replicas", type=int, default=1)
    cmd.add_argument("--target", type=float, default=None,
                     help="stop early once this objective is reached feasibly")
    cmd.add_argument("--custom-ops", default=None,
                     help=f"named demo operator set: {', '.join(sorted(DEMO_OPERATOR_SETS))}")
    cmd.add_argument("--cache-budget", type=int, default=None, metavar="BYTES")
    cmd.add_argument("--fast-budget", type=int, default=None, metavar="BYTES")
    cmd.add_argument("--workers", type=int, default=1)
    cmd.add_argument("--aos-interval", type=int, default=10)
    cmd.add_argument("--elite-interval", type=int, default=50)
    cmd.add_argument("--oversample", type=int, default=4)


def resolve_instance(problem_arg: str | None, instance_arg: str):
    """Returns (problem_name, problem, label, bundled_best_known)."""
    if instance_arg.startswith("demo:"):
        demo = demo_instance(instance_arg[len("demo:"):])
        if problem_arg and problem_arg != demo.problem_name:
            raise UsageError(
                f"demo instance {demo.name} is a {demo.problem_name} problem, "
                f"not {problem_arg}")
        return (demo.problem_name, builtin_problem(demo.problem_name, demo.instance),
                demo.name, demo.best_known)
    if instance_arg.endswith(".json"):
        name, instance = parse_json_instance(instance_arg)
        if problem_arg and problem_arg != name:
            raise UsageError(f"payload declares problem {name!r}, got --problem {problem_arg!r}")
        return name, builtin_problem(name, instance), Path(instance_arg).name, None
    if not problem_arg:
        raise UsageError("--problem is required for non-JSON instance files")
    parser = _FORMAT_PARSERS.get(problem_arg)
    if parser is None:
        raise UsageError(
            f"problem {problem_arg!r} has no standard file format; "
            "provide a JSON payload instead")
    instance = parser(instance_arg)
    return (problem_arg, builtin_problem(problem_arg, instance),
            Path(instance_arg).name, None)


def engine_config_from_args(args, seed: int) -> EngineConfig:
    custom_ops = ()
    if args.custom_ops:
        custom_ops = demo_operator_set(args.custom_ops)
    kwargs = {}
    if args.fast_budget is not None:
        kwargs["fast_budget_bytes"] = args.fast_budget
    return EngineConfig(
        population=args.pop,
        team_size=args.team_size,
        max_generations=args.generations,
        time_limit_seconds=args.time_limit,
        seed=seed,
        islands=IslandsConfig(count=args.islands, migration=args.migration,
                              interval=args.migration_interval),
        replicas=args.replicas,
        cache_budget_bytes=args.cache_budget,
        workers=args.workers,
        aos=AosConfig(update_interval=args.aos_interval),
        elite_injection_interval=args.elite_interval,
        oversample_factor=args.oversample,
        custom_operators=custom_ops,
        target_objective=args.target,
    )


def _cmd_solve(args) -> int:
    problem_name, problem, label, bundled_best = resolve_instance(
        args.problem, args.instance)
    best_known = args.best_known if args.best_known is not None else bundled_best
    config = engine_config_from_args(args, args.seed)
    result = run(problem, config, best_known=best_known)
    record = ResultRecord.from_run(result, problem_name, label)
    document = emit_result(record)
    if args.json:
        Path(args.json).write_text(document)
    else:
        sys.stdout.write(document)
    return 0


def _cmd_bench(args) -> int:
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    if not seeds:
        raise UsageError("at least one seed is required")
    best_knowns = args.best_known or []
    if best_knowns and len(best_knowns) != len(args.instance):
        raise UsageError("--best-known count must match --instance count")
    records = []
    for idx, instance_arg in enumerate(args.instance):
        problem_name, problem, label, bundled_best = resolve_instance(
            args.problem, instance_arg)
        best_known = best_knowns[idx] if best_knowns else bundled_best
        for seed in seeds:
            config = engine_config_from_args(args, seed)
            result = run(problem, config, best_known=best_known)
            records.append(ResultRecord.from_run(result, problem_name, label))
    document = emit_results(records)
    table = gap_table(records)
    if args.json:
        Path(args.json).write_text(document)
        sys.stdout.write(table + "\n")
    else:
        sys.stdout.write(document)
        sys.stderr.write(table + "\n")
    return 0


def _cmd_list_problems() -> int:
    print("built-in problems:")
    for name in BUILTIN_NAMES:
        print(f"  {name}")
    print("demo instances (solve with --instance demo:NAME):")
    for name, demo in sorted(demo_instances().items()):
        best = f"best known {demo.best_known:g}" if demo.best_known is not None \
            else "no reference optimum"
        print(f"  demo:{name:<16} {demo.problem_name:<16} {best}")
    print("demo operator sets (--custom-ops NAME):")
    for name in sorted(DEMO_OPERATOR_SETS):
        print(f"  {name}")
    return 0


def _cmd_validate(args) -> int:
    problem_name, problem, label, _ = resolve_instance(args.problem, args.instance)
    cfg = problem.config()
    print(f"{label}: problem={problem_name} encoding={cfg.encoding.kind.value} "
          f"d1={cfg.d1} d2={cfg.d2} n={cfg.n}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "list-problems":
            return _cmd_list_problems()
        if args.command == "validate":
            return _cmd_validate(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
