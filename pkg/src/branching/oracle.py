"""Brute-force ground truth for small finite instances.

Enumerates the Cartesian product of the initial cells and keeps every
assignment that satisfies all constraints.  Shares nothing with the
engine's filtering or splitting code.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import prod

from .domains import FiniteSet, IntRange, SetRange
from .precision import Store

DEFAULT_CAP = 10**6


class NotEnumerable(ValueError):
    pass


def _cell_values(cell) -> list:
    if isinstance(cell, FiniteSet):
        return sorted(cell.values)
    if isinstance(cell, IntRange):
        return [] if cell.lo > cell.hi else list(range(cell.lo, cell.hi + 1))
    if isinstance(cell, SetRange):
        if cell.empty:
            return []
        free = sorted(cell.upper - cell.lower)
        return [
            cell.lower | frozenset(extra)
            for r in range(len(free) + 1)
            for extra in combinations(free, r)
        ]
    raise NotEnumerable(f"cannot enumerate a {type(cell).__name__} cell")


def _singleton(cell, v):
    if isinstance(cell, FiniteSet):
        return FiniteSet({v})
    if isinstance(cell, IntRange):
        return IntRange(v, v)
    return SetRange(v, v)


@dataclass
class OracleResult:
    instance: object
    solutions: list  # value tuples, in enumeration order

    @property
    def stores(self) -> set:
        start = self.instance.initial_store
        return {Store(_singleton(c, v) for c, v in zip(start, sol)) for sol in self.solutions}

    def __len__(self):
        return len(self.solutions)


def enumerate_solutions(instance, cap: int = DEFAULT_CAP) -> OracleResult:
    columns = [_cell_values(c) for c in instance.initial_store]
    total = prod(len(col) for col in columns)
    if total > cap:
        raise ValueError(f"{total} candidate assignments exceed the cap of {cap}")
    solutions = [
        values
        for values in product(*columns)
        if all(c.holds(values) for c in instance.constraints)
    ]
    return OracleResult(instance, solutions)


def optimal_by_order(result: OracleResult, spec) -> list:
    """Solutions whose cost no other solution strictly improves on, with costs."""
    if not result.solutions:
        raise ValueError("no solutions to optimise over")
    costs = [spec.expr.value_at(sol) for sol in result.solutions]
    return [
        (sol, cost)
        for sol, cost in zip(result.solutions, costs)
        if not any(spec.ordering.improves(other, cost) for other in costs)
    ]
