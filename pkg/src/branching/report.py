"""Run reports: human-readable text and a deterministic JSON document.

Costs and delta only appear for optimisation runs.  In classical mode every
pushed store carries the same constant cost, so plain runs (no cost at all)
and constant-cost ``eq`` runs produce identical reports.
"""
from __future__ import annotations

import json
import math

from .domains import FiniteSet, IntRange, RealRange, SetRange
from .engine import SolveResult, SolverConfig
from .model import cost_text, ordering_text
from .precision import TOP, Store


def _enc_num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else "-inf"
    return v


def _dec_num(v):
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    return v


def cell_to_json(cell) -> dict:
    if isinstance(cell, FiniteSet):
        return {"kind": "enum", "values": sorted(cell.values)}
    if isinstance(cell, IntRange):
        return {"kind": "int", "lo": cell.lo, "hi": cell.hi}
    if isinstance(cell, SetRange):
        return {
            "kind": "set",
            "lower": sorted(cell.lower),
            "upper": sorted(cell.upper),
            "empty": cell.empty,
        }
    if isinstance(cell, RealRange):
        return {"kind": "real", "lo": _enc_num(cell.lo), "hi": _enc_num(cell.hi)}
    raise TypeError(f"cannot serialise a {type(cell).__name__} cell")


def cell_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "enum":
        return FiniteSet(obj["values"])
    if kind == "int":
        return IntRange(obj["lo"], obj["hi"])
    if kind == "set":
        return SetRange(frozenset(obj["lower"]), frozenset(obj["upper"]), obj.get("empty", False))
    if kind == "real":
        return RealRange(_dec_num(obj["lo"]), _dec_num(obj["hi"]))
    raise ValueError(f"unknown cell kind {kind!r}")


def store_to_json(s: Store) -> list:
    return [cell_to_json(c) for c in s]


def store_from_json(obj: list) -> Store:
    return Store(cell_from_json(c) for c in obj)


def precision_to_json(p):
    if p == TOP:
        return "top"
    return [_enc_num(p.real), p.integer]


def format_cost(value: tuple) -> str:
    if len(value) == 1:
        return repr(value[0])
    return "(" + ", ".join(repr(v) for v in value) + ")"


def config_echo(config: SolverConfig, names=()) -> dict:
    echo = {
        "epsilon": config.epsilon,
        "filter": config.filtering.name,
        "select": config.selector,
        "stack": "full" if config.keep_full_stack else "top",
        "mode": config.mode,
    }
    if config.mode == "optimisation":
        echo["cost"] = cost_text(config.cost.expr, names)
        echo["order"] = ordering_text(config.cost.ordering)
    return echo


def report_dict(result: SolveResult, config: SolverConfig, names) -> dict:
    optimising = config.mode == "optimisation"
    stack = []
    for s in result.stack:
        entry = {"cells": store_to_json(s)}
        if optimising:
            entry["cost"] = [_enc_num(v) for v in config.cost.expr.evaluate(s)]
        stack.append(entry)
    doc = {
        "config": config_echo(config, names),
        "variables": list(names),
        "stack": stack,
        "nodes": result.nodes,
        "max_depth": result.max_depth,
        "status": result.status,
    }
    if optimising:
        doc["delta"] = [_enc_num(v) for v in result.delta]
    return doc


def report_json(result: SolveResult, config: SolverConfig, names) -> str:
    return json.dumps(report_dict(result, config, names), indent=2, sort_keys=True) + "\n"


def load_report_stack(text: str) -> list[Store]:
    doc = json.loads(text)
    return [store_from_json(entry["cells"]) for entry in doc["stack"]]


def store_text(s: Store, names) -> str:
    return "(" + ", ".join(f"{n}={c}" for n, c in zip(names, s)) + ")"


def report_text(result: SolveResult, config: SolverConfig, names) -> str:
    optimising = config.mode == "optimisation"
    echo = config_echo(config, names)
    lines = ["# " + " ".join(f"{k}={v}" for k, v in echo.items())]
    for s in result.stack:
        line = store_text(s, names)
        if optimising:
            line += f" cost={format_cost(config.cost.expr.evaluate(s))}"
        lines.append(line)
    lines.append("top")
    if optimising:
        lines.append(f"delta={format_cost(result.delta)}")
    lines.append(
        f"stores={len(result.stack)} nodes={result.nodes} "
        f"max_depth={result.max_depth} status={result.status}"
    )
    return "\n".join(lines) + "\n"


def trace_dict(result: SolveResult, names) -> list:
    return [
        {
            "path": node.label,
            "p": precision_to_json(node.p),
            "store_in": store_text(node.store_in, names),
            "store_filtered": store_text(node.store_filtered, names),
            "outcome": node.outcome,
        }
        for node in result.trace or ()
    ]
