"""The branching schema and its optimisation extension.

``branch`` runs one search from a store and a precision bound.  Per node:

1. filter the store;
2. drop it if inconsistent;
3. if it is not divisible, or the parent bound ``p`` is below ⊤ and
   ``p - precision(S) <= (epsilon, 0)``, then
4. push it (with a cost config: push only if its cost improves on delta,
   updating delta);
5. otherwise pick a cell, split it, and search each part left to right with
   ``precision(S)`` as the new bound.

Children are visited depth first, left to right, using an explicit work list
so deep searches do not hit the interpreter's recursion limit.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Optional

from .costs import CostSpec, cost_improves, eval_cost
from .filtering import FilteringKind
from .heuristics import SELECTORS
from .precision import TOP, Precision, Stack, Store, store_lt

logger = logging.getLogger(__name__)

NODE_BUDGET_ENV = "BRANCHING_NODE_BUDGET"
DEFAULT_NODE_BUDGET = 10**7

COMPLETE = "complete"
BUDGET_EXHAUSTED = "budget-exhausted"


class SchemaViolation(AssertionError):
    """A split produced a child that is not strictly below its parent."""


def default_node_budget() -> int:
    return int(os.environ.get(NODE_BUDGET_ENV, DEFAULT_NODE_BUDGET))


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 0.0
    filtering: FilteringKind = field(default_factory=FilteringKind)
    selector: str = "naive"
    cost: Optional[CostSpec] = None
    keep_full_stack: bool = True
    trace: bool = False
    node_budget: Optional[int] = None

    def __post_init__(self):
        if not self.epsilon >= 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.selector not in SELECTORS:
            raise ValueError(f"unknown selector {self.selector!r}")
        if self.node_budget is not None and self.node_budget < 1:
            raise ValueError("node budget must be positive")

    @property
    def mode(self) -> str:
        if self.cost is None or self.cost.is_classical:
            return "classical"
        return "optimisation"


@dataclass(frozen=True)
class SearchNode:
    path: tuple
    store_in: Store
    store_filtered: Store
    p: Precision
    outcome: str  # pruned | pushed | discarded | branched(k)

    @property
    def label(self) -> str:
        return ".".join(map(str, self.path)) if self.path else "ε"


@dataclass
class SolveResult:
    stack: Stack
    delta: Optional[tuple]
    nodes: int = 0
    max_depth: int = 0
    status: str = COMPLETE
    trace: Optional[list] = None

    @property
    def exhausted(self) -> bool:
        return self.status == BUDGET_EXHAUSTED


def branch(
    constraints,
    store: Store,
    p: Precision,
    config: SolverConfig,
    stack: Optional[Stack] = None,
    delta: Optional[tuple] = None,
) -> SolveResult:
    """Run the schema from ``store`` with bound ``p``, pushing onto ``stack``.

    ``delta`` is the incumbent cost; it is shared by the whole search and
    never restored on backtracking.  Without a ``CostSpec`` every accepted
    store is pushed.
    """
    constraints = tuple(constraints)
    stack = Stack() if stack is None else stack
    cost = config.cost
    if cost is not None and delta is None:
        delta = cost.initial_delta
    filtering = config.filtering
    choose = SELECTORS[config.selector]
    eps = Precision(config.epsilon, 0)
    budget = config.node_budget or default_node_budget()
    trace = [] if config.trace else None

    result = SolveResult(stack=stack, delta=delta, trace=trace)
    work = [(store, p, ())]
    while work:
        if result.nodes >= budget:
            result.status = BUDGET_EXHAUSTED
            logger.warning("node budget of %d exhausted", budget)
            break
        s_in, p_node, path = work.pop()
        result.nodes += 1
        result.max_depth = max(result.max_depth, len(path))

        s = filtering(constraints, s_in)
        if not s.consistent():
            outcome = "pruned"
        elif not s.divisible() or (p_node < TOP and p_node - s.precision() <= eps):
            outcome = "pushed"
            if cost is None:
                stack.push(s)
            else:
                value = eval_cost(cost, s)
                if cost_improves(cost, value, result.delta):
                    result.delta = value
                    if not config.keep_full_stack:
                        stack.clear()
                    stack.push(s)
                else:
                    outcome = "discarded"
        else:
            j = choose(s)
            parts = s[j].split()
            bound = s.precision()
            children = [s.replace(j, d) for d in parts]
            if config.trace:
                for child in children:
                    if not store_lt(child, s):
                        raise SchemaViolation(f"child {child} is not strictly below {s}")
            for i in range(len(children), 0, -1):
                work.append((children[i - 1], bound, path + (i,)))
            outcome = f"branched({len(children)})"

        if trace is not None:
            trace.append(SearchNode(path, s_in, s, p_node, outcome))
    return result


def solve(instance, config: SolverConfig) -> SolveResult:
    """Search from the instance's initial store with ``p = ⊤`` and an empty stack."""
    return branch(instance.constraints, instance.initial_store, TOP, config, Stack())


def solve_real(instance, config: SolverConfig) -> SolveResult:
    """Like :func:`solve` but insists on ``epsilon > 0``, which guarantees termination."""
    if not config.epsilon > 0:
        raise ValueError("solve_real needs epsilon > 0")
    return solve(instance, config)
