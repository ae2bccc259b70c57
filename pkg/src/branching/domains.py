"""Computation domains: cell representations, precision maps and splitting.

Every cell kind implements the same small protocol used by stores, filters
and the search engine::

    card() -> Card              empty / one / many
    is_empty() -> bool
    issubset(other) -> bool     inclusion of the denoted value sets
    precision() -> Precision    strictly monotonic on strict inclusion
    split() -> tuple            complete, contracting cover (k = 2 here)
    contains(x) -> bool         membership of a single domain element
    point()                     the element of a singleton cell
    emptied()                   the canonical empty cell of this kind

Numeric kinds additionally offer ``bounds()``, ``clip(lo, hi)`` and
``restrict_to(values)`` for narrowing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Iterable, Optional

from .precision import Card, Precision

# slack for rounding float bounds to integers
INT_ROUND_TOL = 1e-9


def _ceil(x) -> int:
    if isinstance(x, (int, Fraction)):
        return math.ceil(x)
    return math.ceil(x - INT_ROUND_TOL)


def _floor(x) -> int:
    if isinstance(x, (int, Fraction)):
        return math.floor(x)
    return math.floor(x + INT_ROUND_TOL)


@dataclass(frozen=True)
class FiniteSet:
    """Explicit finite set of values, kept in ascending order for splitting."""

    values: frozenset

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(self.values))

    def card(self) -> Card:
        n = len(self.values)
        return Card.EMPTY if n == 0 else Card.ONE if n == 1 else Card.MANY

    def is_empty(self) -> bool:
        return not self.values

    def issubset(self, other: FiniteSet) -> bool:
        return self.values <= other.values

    def precision(self) -> Precision:
        return Precision(float(len(self.values)), 0)

    def split(self) -> tuple[FiniteSet, FiniteSet]:
        if len(self.values) < 2:
            raise ValueError(f"cannot split {self}")
        ordered = sorted(self.values)
        return FiniteSet({ordered[0]}), FiniteSet(ordered[1:])

    def contains(self, x) -> bool:
        return x in self.values

    def point(self):
        if len(self.values) != 1:
            raise ValueError(f"{self} is not a singleton")
        return next(iter(self.values))

    def emptied(self) -> FiniteSet:
        return FiniteSet(())

    def bounds(self):
        return min(self.values), max(self.values)

    def clip(self, lo=None, hi=None) -> FiniteSet:
        return FiniteSet(
            v for v in self.values if (lo is None or v >= lo) and (hi is None or v <= hi)
        )

    def restrict_to(self, values: Iterable) -> FiniteSet:
        return FiniteSet(self.values & frozenset(values))

    def sorted_values(self) -> list:
        return sorted(self.values)

    def __str__(self):
        return "{" + ",".join(map(str, sorted(self.values))) + "}"


@dataclass(frozen=True)
class IntRange:
    """Closed integer interval ``lo..hi``; ``lo > hi`` is the empty cell."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            object.__setattr__(self, "lo", 1)
            object.__setattr__(self, "hi", 0)

    def card(self) -> Card:
        if self.lo > self.hi:
            return Card.EMPTY
        return Card.ONE if self.lo == self.hi else Card.MANY

    def is_empty(self) -> bool:
        return self.lo > self.hi

    def issubset(self, other: IntRange) -> bool:
        if self.is_empty():
            return True
        if other.is_empty():
            return False
        return other.lo <= self.lo and self.hi <= other.hi

    def precision(self) -> Precision:
        if self.is_empty():
            raise ValueError("precision of an empty integer interval")
        return Precision(float(self.hi - self.lo), 0)

    def split(self) -> tuple[IntRange, IntRange]:
        if not self.lo < self.hi:
            raise ValueError(f"cannot split {self}")
        return IntRange(self.lo, self.lo), IntRange(self.lo + 1, self.hi)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi and x == int(x)

    def point(self) -> int:
        if self.lo != self.hi:
            raise ValueError(f"{self} is not a singleton")
        return self.lo

    def emptied(self) -> IntRange:
        return IntRange(1, 0)

    def bounds(self):
        return self.lo, self.hi

    def clip(self, lo=None, hi=None) -> IntRange:
        new_lo = self.lo if lo is None else max(self.lo, _ceil(lo))
        new_hi = self.hi if hi is None else min(self.hi, _floor(hi))
        return IntRange(new_lo, new_hi)

    def restrict_to(self, values: Iterable) -> IntRange:
        inside = [v for v in values if self.contains(v)]
        if not inside:
            return self.emptied()
        return IntRange(int(min(inside)), int(max(inside)))

    def __str__(self):
        if self.is_empty():
            return "∅"
        return str(self.lo) if self.lo == self.hi else f"{self.lo}..{self.hi}"


@dataclass(frozen=True)
class SetRange:
    """Set interval ``lower..upper`` denoting ``{s | lower ⊆ s ⊆ upper}``."""

    lower: frozenset
    upper: frozenset
    empty: bool = False

    def __post_init__(self):
        lower, upper = frozenset(self.lower), frozenset(self.upper)
        if self.empty or not lower <= upper:
            lower, upper = frozenset(), frozenset()
            object.__setattr__(self, "empty", True)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def card(self) -> Card:
        if self.empty:
            return Card.EMPTY
        return Card.ONE if self.lower == self.upper else Card.MANY

    def count(self) -> int:
        return 0 if self.empty else 2 ** len(self.upper - self.lower)

    def is_empty(self) -> bool:
        return self.empty

    def issubset(self, other: SetRange) -> bool:
        if self.empty:
            return True
        if other.empty:
            return False
        return other.lower <= self.lower and self.upper <= other.upper

    def precision(self) -> Precision:
        if self.empty:
            raise ValueError("precision of an empty set interval")
        return Precision(float(len(self.upper) - len(self.lower)), 0)

    def split(self) -> tuple[SetRange, SetRange]:
        free = self.upper - self.lower
        if self.empty or not free:
            raise ValueError(f"cannot split {self}")
        c = min(free)
        return SetRange(self.lower, self.upper - {c}), SetRange(self.lower | {c}, self.upper)

    def contains(self, s) -> bool:
        s = frozenset(s)
        return not self.empty and self.lower <= s <= self.upper

    def point(self) -> frozenset:
        if self.card() is not Card.ONE:
            raise ValueError(f"{self} is not a singleton")
        return self.lower

    def emptied(self) -> SetRange:
        return SetRange(frozenset(), frozenset(), True)

    def members(self):
        """Every set denoted by this interval (exponential; small cells only)."""
        if self.empty:
            return
        free = sorted(self.upper - self.lower)
        for r in range(len(free) + 1):
            for extra in combinations(free, r):
                yield self.lower | frozenset(extra)

    def restrict_to(self, sets: Iterable) -> SetRange:
        inside = [frozenset(s) for s in sets if self.contains(s)]
        if not inside:
            return self.emptied()
        return SetRange(frozenset.intersection(*inside), frozenset.union(*inside))

    def __str__(self):
        if self.empty:
            return "∅"

        def fmt(s):
            return "{" + ",".join(map(str, sorted(s))) + "}"

        if self.lower == self.upper:
            return fmt(self.lower)
        return f"{fmt(self.lower)}..{fmt(self.upper)}"


@dataclass(frozen=True)
class RealRange:
    """Closed real interval ``[lo, hi]``; ``lo > hi`` is the empty cell."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if lo > hi:
            lo, hi = 1.0, 0.0
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def card(self) -> Card:
        if self.lo > self.hi:
            return Card.EMPTY
        return Card.ONE if self.lo == self.hi else Card.MANY

    def is_empty(self) -> bool:
        return self.lo > self.hi

    def issubset(self, other: RealRange) -> bool:
        if self.is_empty():
            return True
        if other.is_empty():
            return False
        return other.lo <= self.lo and self.hi <= other.hi

    def width(self) -> float:
        return self.hi - self.lo

    def precision(self) -> Precision:
        if self.is_empty():
            raise ValueError("precision of an empty real interval")
        return Precision(self.hi - self.lo, 2)

    def split(self) -> tuple[RealRange, RealRange]:
        if not self.lo < self.hi:
            raise ValueError(f"cannot split {self}")
        mid = self.lo + (self.hi - self.lo) / 2
        if not self.lo < mid < self.hi:
            # adjacent doubles: nothing representable lies strictly between
            return RealRange(self.lo, self.lo), RealRange(self.hi, self.hi)
        return RealRange(self.lo, mid), RealRange(mid, self.hi)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def point(self) -> float:
        if self.lo != self.hi:
            raise ValueError(f"{self} is not a singleton")
        return self.lo

    def emptied(self) -> RealRange:
        return RealRange(1.0, 0.0)

    def bounds(self):
        return self.lo, self.hi

    def clip(self, lo=None, hi=None) -> RealRange:
        new_lo = self.lo if lo is None else max(self.lo, float(lo))
        new_hi = self.hi if hi is None else min(self.hi, float(hi))
        return RealRange(new_lo, new_hi)

    def restrict_to(self, values: Iterable) -> RealRange:
        inside = [v for v in values if self.contains(v)]
        if not inside:
            return self.emptied()
        return RealRange(min(inside), max(inside))

    def __str__(self):
        if self.is_empty():
            return "∅"
        return f"[{self.lo!r}, {self.hi!r}]"


@dataclass(frozen=True)
class Lattice:
    """Handle for an abstract lattice used by :class:`LatticeRange`.

    ``diff(b, a)`` must map into the non-negative reals for ``a <= b`` and be
    strictly monotonic in ``b`` and strictly anti-monotonic in ``a``.
    ``cut(a, b)`` picks the split point, with ``a <= c < b``.
    """

    name: str
    bottom: Any
    top: Any
    leq: Callable[[Any, Any], bool] = field(compare=False)
    diff: Optional[Callable[[Any, Any], float]] = field(default=None, compare=False)
    cut: Optional[Callable[[Any, Any], Any]] = field(default=None, compare=False)

    def lt(self, a, b) -> bool:
        return self.leq(a, b) and not self.leq(b, a)

    def eq(self, a, b) -> bool:
        return self.leq(a, b) and self.leq(b, a)


def _real_cut(a: float, b: float) -> float:
    return a + (b - a) / 2


REAL_LATTICE = Lattice(
    "real",
    -math.inf,
    math.inf,
    leq=lambda a, b: a <= b,
    diff=lambda b, a: b - a,
    cut=_real_cut,
)


@dataclass(frozen=True)
class LatticeRange:
    """Interval over a lattice with independent open/closed ends.

    The singleton is ``[a, a]``; ``{a, a}`` with an open end is empty, as is
    any interval whose upper end lies below its lower end.
    """

    lattice: Lattice
    lo: Any
    hi: Any
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        L = self.lattice
        empty = not L.leq(self.lo, self.hi) or (
            L.eq(self.lo, self.hi) and (self.lo_open or self.hi_open)
        )
        if empty:
            object.__setattr__(self, "lo", L.bottom)
            object.__setattr__(self, "hi", L.bottom)
            object.__setattr__(self, "lo_open", True)
            object.__setattr__(self, "hi_open", True)

    def card(self) -> Card:
        if self.is_empty():
            return Card.EMPTY
        return Card.ONE if self.lattice.eq(self.lo, self.hi) else Card.MANY

    def is_empty(self) -> bool:
        L = self.lattice
        return L.eq(self.lo, self.hi) and (self.lo_open or self.hi_open)

    def issubset(self, other: LatticeRange) -> bool:
        if self.is_empty():
            return True
        if other.is_empty():
            return False
        L = self.lattice
        left_ok = L.lt(other.lo, self.lo) or (
            L.eq(other.lo, self.lo) and (self.lo_open or not other.lo_open)
        )
        right_ok = L.lt(self.hi, other.hi) or (
            L.eq(self.hi, other.hi) and (self.hi_open or not other.hi_open)
        )
        return left_ok and right_ok

    def tag(self) -> int:
        return 2 - int(self.lo_open) - int(self.hi_open)

    def precision(self) -> Precision:
        if self.is_empty():
            raise ValueError("precision of an empty lattice interval")
        if self.lattice.diff is None:
            raise ValueError(f"lattice {self.lattice.name} has no difference map")
        return Precision(float(self.lattice.diff(self.hi, self.lo)), self.tag())

    def split(self, cut=None) -> tuple[LatticeRange, LatticeRange]:
        L = self.lattice
        if self.card() is not Card.MANY:
            raise ValueError(f"cannot split {self}")
        if cut is None:
            if L.cut is None:
                raise ValueError(f"lattice {L.name} has no cut chooser")
            cut = L.cut(self.lo, self.hi)
        if not (L.leq(self.lo, cut) and L.lt(cut, self.hi)):
            raise ValueError(f"cut {cut!r} outside [{self.lo!r}, {self.hi!r})")
        left = LatticeRange(L, self.lo, cut, self.lo_open, False)
        right = LatticeRange(L, cut, self.hi, True, self.hi_open)
        return left, right

    def contains(self, x) -> bool:
        if self.is_empty():
            return False
        L = self.lattice
        above = L.lt(self.lo, x) or (L.eq(self.lo, x) and not self.lo_open)
        below = L.lt(x, self.hi) or (L.eq(x, self.hi) and not self.hi_open)
        return above and below

    def point(self):
        if self.card() is not Card.ONE:
            raise ValueError(f"{self} is not a singleton")
        return self.lo

    def emptied(self) -> LatticeRange:
        L = self.lattice
        return LatticeRange(L, L.bottom, L.bottom, True, True)

    def bounds(self):
        return self.lo, self.hi

    def clip(self, lo=None, hi=None) -> LatticeRange:
        L = self.lattice
        new = self
        if lo is not None and L.lt(new.lo, lo):
            new = LatticeRange(L, lo, new.hi, False, new.hi_open)
        if hi is not None and L.lt(hi, new.hi):
            new = LatticeRange(L, new.lo, hi, new.lo_open, False)
        return new

    def restrict_to(self, values: Iterable) -> LatticeRange:
        inside = [v for v in values if self.contains(v)]
        if not inside:
            return self.emptied()
        return LatticeRange(self.lattice, min(inside), max(inside))

    def __str__(self):
        if self.is_empty():
            return "∅"
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo!r}, {self.hi!r}{right}"


# -- domain descriptors ------------------------------------------------------


@dataclass(frozen=True)
class BoolDomain:
    """Booleans, represented as the integer subset {0, 1}."""

    def top(self) -> FiniteSet:
        return FiniteSet({0, 1})

    def accepts(self, cell) -> bool:
        return isinstance(cell, FiniteSet) and cell.values <= {0, 1}


@dataclass(frozen=True)
class EnumDomain:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(sorted(set(self.values))))

    def top(self) -> FiniteSet:
        return FiniteSet(self.values)

    def accepts(self, cell) -> bool:
        return isinstance(cell, FiniteSet) and cell.values <= set(self.values)


@dataclass(frozen=True)
class IntDomain:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty integer domain {self.lo}..{self.hi}")

    def top(self) -> IntRange:
        return IntRange(self.lo, self.hi)

    def accepts(self, cell) -> bool:
        return isinstance(cell, IntRange) and cell.issubset(self.top())


@dataclass(frozen=True)
class SetDomain:
    universe: frozenset

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))

    def top(self) -> SetRange:
        return SetRange(frozenset(), self.universe)

    def accepts(self, cell) -> bool:
        return isinstance(cell, SetRange) and cell.issubset(self.top())


@dataclass(frozen=True)
class RealDomain:
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo > self.hi:
            raise ValueError(f"real domain needs finite lo <= hi, got [{self.lo}, {self.hi}]")

    def top(self) -> RealRange:
        return RealRange(self.lo, self.hi)

    def accepts(self, cell) -> bool:
        return isinstance(cell, RealRange) and cell.issubset(self.top())


@dataclass(frozen=True)
class LatticeDomain:
    lattice: Lattice
    lo: Any = None
    hi: Any = None

    def top(self) -> LatticeRange:
        L = self.lattice
        lo = L.bottom if self.lo is None else self.lo
        hi = L.top if self.hi is None else self.hi
        return LatticeRange(L, lo, hi)

    def accepts(self, cell) -> bool:
        return (
            isinstance(cell, LatticeRange)
            and cell.lattice == self.lattice
            and cell.issubset(self.top())
        )


NUMERIC_CELLS = (FiniteSet, IntRange, RealRange, LatticeRange)
