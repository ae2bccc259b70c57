"""Filtering functions.

Both filters obey the three conditions a filter must meet: the result lies
below the input store, no solution below the input is lost, and a consistent
result with only singleton cells is a genuine solution.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

from .constraints import is_solution
from .domains import LatticeRange, RealRange
from .precision import Card, Store

logger = logging.getLogger(__name__)

# width shrink below this is treated as no change on continuous cells
REAL_CHANGE_TOL = 1e-12

FILTERS = ("check", "fixpoint")


def filter_consistency_check(constraints, s: Store) -> Store:
    """Pass consistent divisible stores through; verify fully fixed ones."""
    if not s.consistent():
        return s.emptied()
    if s.divisible():
        return s
    return s if is_solution(constraints, s) else s.emptied()


def _significant(old, new) -> bool:
    if new == old:
        return False
    if new.is_empty():
        return True
    if isinstance(old, (RealRange, LatticeRange)):
        shrink = old.precision().real - new.precision().real
        return shrink > REAL_CHANGE_TOL or new.card() is Card.ONE and old.card() is not Card.ONE
    return True


def filter_fixpoint(constraints, s: Store, max_rounds: int = 10_000) -> Store:
    """AC-3 style propagation of every constraint's narrowing to a fixpoint.

    ``max_rounds`` bounds the number of single-constraint narrowings; when it
    is hit the current (sound, possibly under-filtered) store is returned.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if not s.consistent():
        return s.emptied()
    constraints = list(constraints)
    watchers: dict[int, list[int]] = {}
    for k, c in enumerate(constraints):
        for i in c.scope:
            watchers.setdefault(i, []).append(k)

    queue = deque(range(len(constraints)))
    queued = set(queue)
    rounds = 0
    while queue:
        if rounds >= max_rounds:
            logger.debug("fixpoint stopped after %d narrowings", rounds)
            break
        rounds += 1
        k = queue.popleft()
        queued.discard(k)
        narrowed = constraints[k].narrow(s)
        changed = []
        for i in constraints[k].scope:
            if _significant(s[i], narrowed[i]):
                s = s.replace(i, narrowed[i])
                changed.append(i)
        if not s.consistent():
            return s.emptied()
        for i in changed:
            for w in watchers[i]:
                if w not in queued:
                    queue.append(w)
                    queued.add(w)

    if not s.divisible() and not is_solution(constraints, s):
        return s.emptied()
    return s


@dataclass(frozen=True)
class FilteringKind:
    """Which filter to run; ``max_rounds`` only matters for the fixpoint."""

    name: str = "check"
    max_rounds: int = 10_000

    def __post_init__(self):
        if self.name not in FILTERS:
            raise ValueError(f"unknown filter {self.name!r}; expected one of {FILTERS}")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")

    def __call__(self, constraints, s: Store) -> Store:
        if self.name == "check":
            return filter_consistency_check(constraints, s)
        return filter_fixpoint(constraints, s, self.max_rounds)
