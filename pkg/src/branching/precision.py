"""Precision values, constraint stores, stacks and their orderings.

A precision value is a pair ``(real, int)`` with ``real >= 0`` (or ``+inf``).
Pairs add and subtract componentwise and are ordered lexicographically, real
part first.  Stores are tuples of domain cells ordered by cellwise inclusion;
stacks are ordered by covering.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

INT_MAX = 2**63 - 1


class Card(enum.Enum):
    """Cardinality class of a domain cell."""

    EMPTY = 0
    ONE = 1
    MANY = 2


@dataclass(frozen=True, order=True)
class Precision:
    real: float
    integer: int = 0

    def __post_init__(self):
        if math.isnan(self.real) or self.real < 0:
            raise ValueError(f"precision real part must be >= 0, got {self.real}")

    def __add__(self, other: Precision) -> Precision:
        return ri_add(self, other)

    def __sub__(self, other: Precision) -> Precision:
        return ri_sub(self, other)

    def __repr__(self):
        if self == TOP:
            return "Precision(TOP)"
        return f"Precision({self.real!r}, {self.integer!r})"


TOP = Precision(math.inf, INT_MAX)
ZERO = Precision(0.0, 0)


def ri_add(a: Precision, b: Precision) -> Precision:
    return Precision(a.real + b.real, a.integer + b.integer)


def ri_sub(a: Precision, b: Precision) -> Precision:
    if math.isinf(a.real) and math.isinf(b.real):
        real = 0.0
    else:
        # float rounding along a descending chain can leave a tiny negative
        real = max(0.0, a.real - b.real)
    return Precision(real, a.integer - b.integer)


def ri_leq(a: Precision, b: Precision) -> bool:
    return (a.real, a.integer) <= (b.real, b.integer)


@dataclass(frozen=True)
class Store:
    """One domain cell per variable."""

    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __getitem__(self, j):
        return self.cells[j]

    def consistent(self) -> bool:
        return all(not c.is_empty() for c in self.cells)

    def divisible(self) -> bool:
        return self.consistent() and any(c.card() is Card.MANY for c in self.cells)

    def replace(self, j: int, d) -> Store:
        return store_replace(self, j, d)

    def precision(self) -> Precision:
        return precision_of_store(self)

    def emptied(self) -> Store:
        """The all-empty store of the same shape."""
        return Store(c.emptied() for c in self.cells)

    def __repr__(self):
        return "Store(" + ", ".join(map(str, self.cells)) + ")"


def _same_kind(a, b) -> bool:
    return type(a) is type(b) and getattr(a, "lattice", None) == getattr(b, "lattice", None)


def _check_shape(s: Store, t: Store):
    if len(s) != len(t):
        raise ValueError(f"store arity mismatch: {len(s)} vs {len(t)}")
    for i, (a, b) in enumerate(zip(s, t)):
        if not _same_kind(a, b):
            raise ValueError(
                f"domain mismatch at variable {i}: {type(a).__name__} vs {type(b).__name__}"
            )


def store_leq(s: Store, t: Store) -> bool:
    _check_shape(s, t)
    return all(a.issubset(b) for a, b in zip(s, t))


def store_lt(s: Store, t: Store) -> bool:
    return store_leq(s, t) and s != t


def store_replace(s: Store, j: int, d) -> Store:
    if not 0 <= j < len(s):
        raise IndexError(f"variable index {j} out of range for a store of {len(s)}")
    if not _same_kind(s[j], d):
        raise ValueError(
            f"cannot put a {type(d).__name__} into a {type(s[j]).__name__} cell"
        )
    cells = list(s.cells)
    cells[j] = d
    return Store(cells)


def precision_of_store(s: Store) -> Precision:
    total = ZERO
    for cell in s:
        total = ri_add(total, cell.precision())
    return total


class Stack:
    """Ordered sequence of stores; push appends, top is the last pushed."""

    def __init__(self, items: Iterable[Store] = ()):
        self._items = list(items)

    def push(self, s: Store):
        self._items.append(s)

    def top(self) -> Store:
        if not self._items:
            raise IndexError("top of an empty stack")
        return self._items[-1]

    def clear(self):
        self._items.clear()

    @property
    def items(self) -> tuple:
        return tuple(self._items)

    def __len__(self):
        return len(self._items)

    def __iter__(self) -> Iterator[Store]:
        return iter(self._items)

    def __bool__(self):
        return bool(self._items)

    def __eq__(self, other):
        if isinstance(other, Stack):
            return self._items == other._items
        return NotImplemented

    def __repr__(self):
        return f"Stack({self._items!r})"


def stack_covers(p: Sequence[Store] | Stack, q: Sequence[Store] | Stack) -> bool:
    """True iff every store of ``p`` lies below some store of ``q`` (p ⪯_p q)."""
    q = list(q)
    return all(any(store_leq(s, t) for t in q) for s in p)
