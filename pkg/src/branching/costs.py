"""Cost functions, cost orderings and the incumbent bound.

Cost values are tuples of floats: length 1 for scalar costs, length 2 (or
more) for compound costs.  A sum of variables over non-singleton cells
evaluates to the midpoint of the interval sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .precision import Store

ORDER_KINDS = ("eq", "lt", "gt", "lex", "comp")
DIRECTIONS = ("min", "max")


@dataclass(frozen=True)
class Constant:
    value: float

    arity = 1

    def evaluate(self, s: Store) -> tuple:
        return (float(self.value),)

    def value_at(self, values: Sequence) -> tuple:
        return (float(self.value),)


@dataclass(frozen=True)
class Sum:
    indices: tuple

    arity = 1

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))

    def evaluate(self, s: Store) -> tuple:
        lo = hi = 0
        for i in self.indices:
            a, b = s[i].bounds()
            lo += a
            hi += b
        return ((lo + hi) / 2,)

    def value_at(self, values: Sequence) -> tuple:
        return (float(sum(values[i] for i in self.indices)),)


@dataclass(frozen=True)
class Compound:
    """Tuple of scalar cost expressions; ``pair(e1, e2)`` in model files."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if any(not isinstance(p, (Constant, Sum)) for p in self.parts):
            raise ValueError("compound cost components must be scalar expressions")

    @property
    def arity(self) -> int:
        return len(self.parts)

    def evaluate(self, s: Store) -> tuple:
        return tuple(p.evaluate(s)[0] for p in self.parts)

    def value_at(self, values: Sequence) -> tuple:
        return tuple(p.value_at(values)[0] for p in self.parts)


def _better(a: float, b: float, direction: str) -> bool:
    return a < b if direction == "min" else a > b


@dataclass(frozen=True)
class CostOrdering:
    """Strict test ``new ⋄ old`` plus the matching initial bound.

    ``eq``, ``lt`` and ``gt`` compare scalars.  ``lex`` and ``comp`` take one
    direction per component: ``comp`` requires a strict improvement on every
    component, ``lex`` on the first component that differs.
    """

    kind: str
    directions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        if self.kind not in ORDER_KINDS:
            raise ValueError(f"unknown ordering {self.kind!r}")
        if self.kind in ("lex", "comp"):
            if not self.directions or any(d not in DIRECTIONS for d in self.directions):
                raise ValueError(f"{self.kind} needs min/max directions, got {self.directions}")
        elif self.directions:
            raise ValueError(f"{self.kind} takes no directions")

    @property
    def arity(self) -> int:
        return len(self.directions) if self.directions else 1

    def improves(self, new: tuple, old: tuple) -> bool:
        if len(new) != self.arity or len(old) != self.arity:
            raise ValueError(
                f"cost arity mismatch: {len(new)}/{len(old)} vs ordering arity {self.arity}"
            )
        if self.kind == "eq":
            return new == old
        if self.kind == "lt":
            return new[0] < old[0]
        if self.kind == "gt":
            return new[0] > old[0]
        if self.kind == "comp":
            return all(_better(a, b, d) for a, b, d in zip(new, old, self.directions))
        for a, b, d in zip(new, old, self.directions):
            if a != b:
                return _better(a, b, d)
        return False

    def worst(self) -> tuple:
        """Initial bound every real cost improves on: ⊤ for min, ⊥ for max."""
        if self.kind == "lt":
            return (math.inf,)
        if self.kind == "gt":
            return (-math.inf,)
        if self.kind == "eq":
            raise ValueError("eq ordering has no default bound; give delta explicitly")
        return tuple(math.inf if d == "min" else -math.inf for d in self.directions)


@dataclass(frozen=True)
class CostSpec:
    expr: object
    ordering: CostOrdering
    delta0: Optional[tuple] = None

    def __post_init__(self):
        if self.delta0 is not None:
            object.__setattr__(self, "delta0", tuple(float(v) for v in self.delta0))
        if self.expr.arity != self.ordering.arity:
            raise ValueError(
                f"cost has {self.expr.arity} component(s) but the ordering expects "
                f"{self.ordering.arity}"
            )
        if self.delta0 is not None and len(self.delta0) != self.expr.arity:
            raise ValueError("initial delta arity does not match the cost")
        if self.ordering.kind == "eq" and self.delta0 is None and not isinstance(
            self.expr, Constant
        ):
            raise ValueError("eq ordering needs an explicit delta unless the cost is constant")

    @property
    def initial_delta(self) -> tuple:
        if self.delta0 is not None:
            return self.delta0
        if self.ordering.kind == "eq":
            return self.expr.value_at(())
        return self.ordering.worst()

    @property
    def is_classical(self) -> bool:
        """Constant cost, ``=`` ordering and delta equal to that constant."""
        return (
            isinstance(self.expr, Constant)
            and self.ordering.kind == "eq"
            and self.initial_delta == (float(self.expr.value),)
        )


def classical_spec(value: float = 1.0) -> CostSpec:
    return CostSpec(Constant(value), CostOrdering("eq"))


def eval_cost(spec: CostSpec, s: Store) -> tuple:
    if not s.consistent():
        raise ValueError("cost of an inconsistent store")
    return spec.expr.evaluate(s)


def cost_improves(spec: CostSpec, new: tuple, delta: tuple) -> bool:
    return spec.ordering.improves(tuple(new), tuple(delta))
