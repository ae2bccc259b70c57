"""Command-line interface.

Usage examples:
    branching solve model.txt
    branching solve model.txt --mode min --cost sum --json
    branching solve reals.txt --epsilon 0.1 --json > coarse.json
    branching verify model.txt
    branching verify-covering fine.json coarse.json
    branching trace model.txt --out tree.json
    branching print-model model.txt

Command-line flags override the model's solver block.

Exit codes:
    0  stack non-empty (verify: engine agrees with the oracle;
       verify-covering: the first stack is covered by the second)
    1  stack empty (verify / verify-covering: check failed)
    2  bad arguments, unreadable or invalid model
    3  node budget exhausted; a partial report is still printed
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .costs import CostOrdering, CostSpec, Sum, classical_spec
from .engine import SolverConfig, solve
from .filtering import FilteringKind
from .model import ModelError, format_model, load_model, parse_cost
from .oracle import NotEnumerable, enumerate_solutions, optimal_by_order
from .precision import stack_covers
from .report import (
    load_report_stack,
    report_json,
    report_text,
    store_text,
    trace_dict,
)

EXIT_OK, EXIT_EMPTY, EXIT_ERROR, EXIT_BUDGET = 0, 1, 2, 3
MODES = ("model", "plain", "classical", "min", "max")


class UsageError(Exception):
    pass


def _add_solver_flags(p: argparse.ArgumentParser):
    p.add_argument("model", help="path to the model file")
    p.add_argument(
        "--mode",
        choices=MODES,
        default="model",
        help="model: as written; plain: no cost at all; classical: constant cost "
        "with '='; min/max: optimise --cost or the model's scalar cost",
    )
    p.add_argument("--cost", help="cost expression for min/max, e.g. 'sum' or 'sum(x, y)'")
    p.add_argument("--epsilon", type=float, help="precision bound (>= 0)")
    p.add_argument("--filter", choices=("check", "fixpoint"))
    p.add_argument("--select", choices=("naive", "ff"))
    p.add_argument("--stack", choices=("full", "top"))
    p.add_argument("--max-rounds", type=int, help="fixpoint filter safety bound")
    p.add_argument("--node-budget", type=int, help="abort after this many search nodes")


def _configure(args, instance, config: SolverConfig) -> SolverConfig:
    changes = {}
    if args.epsilon is not None:
        changes["epsilon"] = args.epsilon
    if args.filter is not None or args.max_rounds is not None:
        changes["filtering"] = FilteringKind(
            args.filter or config.filtering.name,
            args.max_rounds or config.filtering.max_rounds,
        )
    if args.select is not None:
        changes["selector"] = args.select
    if args.stack is not None:
        changes["keep_full_stack"] = args.stack == "full"
    if args.node_budget is not None:
        changes["node_budget"] = args.node_budget

    if args.cost and args.mode not in ("min", "max"):
        raise UsageError("--cost only applies with --mode min or --mode max")
    if args.mode == "plain":
        changes["cost"] = None
    elif args.mode == "classical":
        changes["cost"] = classical_spec()
    elif args.mode in ("min", "max"):
        if args.cost == "sum":
            expr = Sum(tuple(range(len(instance.variables))))
        elif args.cost:
            expr = parse_cost(args.cost, instance)
        elif config.cost is not None:
            expr = config.cost.expr
        else:
            raise UsageError(f"--mode {args.mode} needs --cost or a cost in the model")
        if expr.arity != 1:
            raise UsageError("--mode min/max needs a scalar cost")
        changes["cost"] = CostSpec(expr, CostOrdering("lt" if args.mode == "min" else "gt"))
    return dataclasses.replace(config, **changes)


def _load(args):
    instance, config = load_model(args.model)
    return instance, _configure(args, instance, config)


def cmd_solve(args) -> int:
    instance, config = _load(args)
    result = solve(instance, config)
    names = instance.names
    out = report_json if args.json else report_text
    sys.stdout.write(out(result, config, names))
    if result.exhausted:
        return EXIT_BUDGET
    return EXIT_OK if result.stack else EXIT_EMPTY


def cmd_trace(args) -> int:
    instance, config = _load(args)
    config = dataclasses.replace(config, trace=True)
    result = solve(instance, config)
    text = json.dumps(trace_dict(result, instance.names), indent=2, ensure_ascii=False) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {len(result.trace)} nodes to {args.out}")
    else:
        sys.stdout.write(text)
    if result.exhausted:
        return EXIT_BUDGET
    return EXIT_OK if result.stack else EXIT_EMPTY


def cmd_verify(args) -> int:
    """Compare the engine (epsilon = 0) against brute-force enumeration."""
    instance, config = _load(args)
    config = dataclasses.replace(config, epsilon=0.0)
    names = instance.names
    oracle = enumerate_solutions(instance)
    result = solve(instance, config)
    if result.exhausted:
        print("node budget exhausted before the search finished")
        return EXIT_BUDGET

    if config.mode == "classical":
        found, expected = set(result.stack), oracle.stores
        for s in sorted(expected - found, key=str):
            print("missing  " + store_text(s, names))
        for s in sorted(found - expected, key=str):
            print("spurious " + store_text(s, names))
        ok = found == expected
        print(f"{'agree' if ok else 'MISMATCH'}: engine {len(found)} / oracle {len(expected)} solutions")
        return EXIT_OK if ok else EXIT_EMPTY

    if not oracle.solutions:
        ok = not result.stack
        print(f"{'agree' if ok else 'MISMATCH'}: oracle finds no solution")
        return EXIT_OK if ok else EXIT_EMPTY
    optimal = {cost for _, cost in optimal_by_order(oracle, config.cost)}
    top_cost = config.cost.expr.evaluate(result.stack.top()) if result.stack else None
    ok = top_cost in optimal
    print(
        f"{'agree' if ok else 'MISMATCH'}: engine top cost {top_cost}, "
        f"oracle optimal costs {sorted(optimal)}"
    )
    return EXIT_OK if ok else EXIT_EMPTY


def cmd_verify_covering(args) -> int:
    with open(args.lower, encoding="utf-8") as fh:
        lower = load_report_stack(fh.read())
    with open(args.upper, encoding="utf-8") as fh:
        upper = load_report_stack(fh.read())
    ok = stack_covers(lower, upper)
    print(
        f"{'covered' if ok else 'NOT covered'}: {len(lower)} store(s) of {args.lower} "
        f"against {len(upper)} store(s) of {args.upper}"
    )
    return EXIT_OK if ok else EXIT_EMPTY


def cmd_print_model(args) -> int:
    instance, config = load_model(args.model)
    sys.stdout.write(format_model(instance, config))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branching",
        description="Generic branch-and-prune constraint solver",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="exit codes: 0 non-empty stack, 1 empty stack, 2 error, 3 node budget exhausted",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a model and print the final stack")
    _add_solver_flags(p)
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="compare the engine with brute-force enumeration")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-covering", help="check that one JSON report's stack is covered by another's")
    p.add_argument("lower", help="report whose stores must be covered")
    p.add_argument("upper", help="report expected to cover them")
    p.set_defaults(func=cmd_verify_covering)

    p = sub.add_parser("trace", help="emit the path-labelled search tree as JSON")
    _add_solver_flags(p)
    p.add_argument("--out", help="write the trace here instead of stdout")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("print-model", help="print the model in canonical form")
    p.add_argument("model")
    p.set_defaults(func=cmd_print_model)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, UsageError, NotEnumerable, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
