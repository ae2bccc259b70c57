"""Constraint expressions and CSP instances.

Each constraint kind knows its scope (variable indices) and answers three
questions about a store:

* ``holds(values)``: does a full point assignment satisfy it?
* ``possibly(store)``: could some tuple drawn from the store satisfy it?
  (sound: only False when no tuple does)
* ``narrow(store)``: a store below ``store`` that keeps every solution of the
  constraint lying in ``store``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .domains import FiniteSet, IntRange, LatticeRange, RealRange, SetRange
from .precision import Card, Store

# absolute tolerance for = and != on real-valued points
EQ_TOL = 1e-9

RELATIONS = ("<=", ">=", "=", "!=")


def _div(n, d):
    if isinstance(n, (int, Fraction)) and isinstance(d, (int, Fraction)):
        return Fraction(n) / d
    return n / d


def _compare(lhs, op: str, rhs, tol: float = EQ_TOL) -> bool:
    if op == "<=":
        return lhs <= rhs
    if op == ">=":
        return lhs >= rhs
    exact = all(isinstance(v, (int, Fraction)) for v in (lhs, rhs))
    equal = lhs == rhs if exact else abs(lhs - rhs) <= tol
    return equal if op == "=" else not equal


def _possible_truths(cell) -> set:
    return {bool(v) for v in (0, 1) if cell.contains(v)}


@dataclass(frozen=True)
class Linear:
    """``sum(coef * x[i]) op rhs`` with op in <=, >=, =, !=."""

    terms: tuple  # ((index, coef), ...)
    op: str
    rhs: float

    def __post_init__(self):
        if self.op not in RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")
        object.__setattr__(self, "terms", tuple((int(i), c) for i, c in self.terms))

    @property
    def scope(self) -> tuple:
        return tuple(dict.fromkeys(i for i, _ in self.terms))

    def value(self, values: Sequence) -> float:
        return sum(c * values[i] for i, c in self.terms)

    def holds(self, values: Sequence) -> bool:
        return _compare(self.value(values), self.op, self.rhs)

    def _activity(self, store: Store, skip: Optional[int] = None):
        """Interval hull of the left-hand side, optionally without one term."""
        lo = hi = 0
        for k, (i, c) in enumerate(self.terms):
            if k == skip:
                continue
            a, b = store[i].bounds()
            lo += c * a if c >= 0 else c * b
            hi += c * b if c >= 0 else c * a
        return lo, hi

    def possibly(self, store: Store) -> bool:
        if not store.consistent():
            return False
        lo, hi = self._activity(store)
        if self.op == "<=":
            return lo <= self.rhs + (0 if _exact(lo, self.rhs) else EQ_TOL)
        if self.op == ">=":
            return hi >= self.rhs - (0 if _exact(hi, self.rhs) else EQ_TOL)
        if self.op == "=":
            tol = 0 if _exact(lo, hi, self.rhs) else EQ_TOL
            return lo <= self.rhs + tol and hi >= self.rhs - tol
        # !=: only refuted when the whole hull collapses onto rhs
        return not (lo == hi and _compare(lo, "=", self.rhs))

    def narrow(self, store: Store) -> Store:
        if not store.consistent():
            return store
        if self.op == "!=":
            return self._narrow_neq(store)
        for k, (i, c) in enumerate(self.terms):
            if c == 0:
                continue
            rest_lo, rest_hi = self._activity(store, skip=k)
            # c*x <= rhs - rest_lo  and/or  c*x >= rhs - rest_hi
            upper = lower = None
            if self.op in ("<=", "="):
                bound = _div(self.rhs - rest_lo, c)
                if c > 0:
                    upper = bound
                else:
                    lower = bound
            if self.op in (">=", "="):
                bound = _div(self.rhs - rest_hi, c)
                if c > 0:
                    lower = bound
                else:
                    upper = bound
            cell = store[i]
            if isinstance(cell, (FiniteSet, IntRange, RealRange, LatticeRange)):
                new = cell.clip(lower, upper)
                if new != cell:
                    store = store.replace(i, new)
                    if new.is_empty():
                        return store
        return store

    def _narrow_neq(self, store: Store) -> Store:
        open_terms = [(i, c) for i, c in self.terms if store[i].card() is not Card.ONE]
        if len({i for i, _ in open_terms}) > 1:
            return store
        fixed = sum(c * store[i].point() for i, c in self.terms if store[i].card() is Card.ONE)
        if not open_terms:
            if _compare(fixed, "=", self.rhs):
                return store.replace(self.terms[0][0], store[self.terms[0][0]].emptied())
            return store
        i = open_terms[0][0]
        coef = sum(c for j, c in open_terms)
        if coef == 0:
            return store
        banned = _div(self.rhs - fixed, coef)
        cell = store[i]
        if isinstance(cell, FiniteSet) and banned in cell.values:
            return store.replace(i, FiniteSet(cell.values - {banned}))
        if isinstance(cell, IntRange) and banned == cell.lo:
            return store.replace(i, IntRange(cell.lo + 1, cell.hi))
        if isinstance(cell, IntRange) and banned == cell.hi:
            return store.replace(i, IntRange(cell.lo, cell.hi - 1))
        return store


def _exact(*vals) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in vals)


@dataclass(frozen=True)
class Table:
    """Extensional constraint: the scope's value tuple must be listed."""

    vars: tuple
    tuples: frozenset

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        tuples = frozenset(tuple(t) for t in self.tuples)
        for t in tuples:
            if len(t) != len(self.vars):
                raise ValueError(f"tuple {t} does not match scope of {len(self.vars)}")
        object.__setattr__(self, "tuples", tuples)

    @property
    def scope(self) -> tuple:
        return tuple(dict.fromkeys(self.vars))

    def holds(self, values: Sequence) -> bool:
        return tuple(values[i] for i in self.vars) in self.tuples

    def _supported(self, store: Store) -> list:
        return [
            t for t in self.tuples if all(store[i].contains(v) for i, v in zip(self.vars, t))
        ]

    def possibly(self, store: Store) -> bool:
        return store.consistent() and bool(self._supported(store))

    def narrow(self, store: Store) -> Store:
        if not store.consistent():
            return store
        supported = self._supported(store)
        for pos, i in enumerate(self.vars):
            store = store.replace(i, store[i].restrict_to({t[pos] for t in supported}))
        return store


# -- Boolean formulas ---------------------------------------------------------


@dataclass(frozen=True)
class BVar:
    index: int

    def eval(self, values):
        return bool(values[self.index])

    def truths(self, store):
        return _possible_truths(store[self.index])

    def indices(self):
        yield self.index


@dataclass(frozen=True)
class BConst:
    value: bool

    def eval(self, values):
        return self.value

    def truths(self, store):
        return {self.value}

    def indices(self):
        return iter(())


@dataclass(frozen=True)
class BNot:
    arg: object

    def eval(self, values):
        return not self.arg.eval(values)

    def truths(self, store):
        return {not t for t in self.arg.truths(store)}

    def indices(self):
        return self.arg.indices()


@dataclass(frozen=True)
class BAnd:
    args: tuple

    def eval(self, values):
        return all(a.eval(values) for a in self.args)

    def truths(self, store):
        parts = [a.truths(store) for a in self.args]
        out = set()
        if all(True in p for p in parts):
            out.add(True)
        if any(False in p for p in parts):
            out.add(False)
        return out

    def indices(self):
        for a in self.args:
            yield from a.indices()


@dataclass(frozen=True)
class BOr:
    args: tuple

    def eval(self, values):
        return any(a.eval(values) for a in self.args)

    def truths(self, store):
        parts = [a.truths(store) for a in self.args]
        out = set()
        if any(True in p for p in parts):
            out.add(True)
        if all(False in p for p in parts):
            out.add(False)
        return out

    def indices(self):
        for a in self.args:
            yield from a.indices()


@dataclass(frozen=True)
class Formula:
    """Boolean formula over 0/1 variables that must evaluate to true."""

    expr: object

    @property
    def scope(self) -> tuple:
        return tuple(dict.fromkeys(self.expr.indices()))

    def holds(self, values: Sequence) -> bool:
        return self.expr.eval(values)

    def possibly(self, store: Store) -> bool:
        return store.consistent() and True in self.expr.truths(store)

    def narrow(self, store: Store) -> Store:
        if not store.consistent():
            return store
        for i in self.scope:
            cell = store[i]
            keep = []
            for v in (0, 1):
                if not cell.contains(v):
                    continue
                trial = store.replace(i, cell.restrict_to({v}))
                if True in self.expr.truths(trial):
                    keep.append(v)
            if len(keep) < sum(cell.contains(v) for v in (0, 1)):
                store = store.replace(i, cell.restrict_to(keep))
                if store[i].is_empty():
                    return store
        return store


# -- set relations ------------------------------------------------------------


@dataclass(frozen=True)
class Member:
    """``element in var`` (or ``notin`` when negated)."""

    element: int
    var: int
    negated: bool = False

    @property
    def scope(self) -> tuple:
        return (self.var,)

    def holds(self, values) -> bool:
        return (self.element in values[self.var]) != self.negated

    def possibly(self, store: Store) -> bool:
        cell = store[self.var]
        if cell.is_empty():
            return False
        if self.negated:
            return self.element not in cell.lower
        return self.element in cell.upper

    def narrow(self, store: Store) -> Store:
        cell = store[self.var]
        if cell.is_empty():
            return store
        if self.negated:
            new = SetRange(cell.lower, cell.upper - {self.element})
        else:
            new = SetRange(cell.lower | {self.element}, cell.upper)
        return store.replace(self.var, new)


@dataclass(frozen=True)
class Subset:
    """``left ⊆ right`` between two set variables."""

    left: int
    right: int

    @property
    def scope(self) -> tuple:
        return tuple(dict.fromkeys((self.left, self.right)))

    def holds(self, values) -> bool:
        return values[self.left] <= values[self.right]

    def possibly(self, store: Store) -> bool:
        a, b = store[self.left], store[self.right]
        return not (a.is_empty() or b.is_empty()) and a.lower <= b.upper

    def narrow(self, store: Store) -> Store:
        a, b = store[self.left], store[self.right]
        if a.is_empty() or b.is_empty():
            return store
        store = store.replace(self.left, SetRange(a.lower, a.upper & b.upper))
        a = store[self.left]
        b = store[self.right]
        return store.replace(self.right, SetRange(b.lower | a.lower, b.upper))


@dataclass(frozen=True)
class Cardinality:
    """``#var op n``."""

    var: int
    op: str
    n: int

    def __post_init__(self):
        if self.op not in RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")

    @property
    def scope(self) -> tuple:
        return (self.var,)

    def holds(self, values) -> bool:
        return _compare(len(values[self.var]), self.op, self.n)

    def possibly(self, store: Store) -> bool:
        cell = store[self.var]
        if cell.is_empty():
            return False
        lo, hi = len(cell.lower), len(cell.upper)
        if self.op == "<=":
            return lo <= self.n
        if self.op == ">=":
            return hi >= self.n
        if self.op == "=":
            return lo <= self.n <= hi
        return not (lo == hi == self.n)

    def narrow(self, store: Store) -> Store:
        cell = store[self.var]
        if cell.is_empty():
            return store
        if not self.possibly(store):
            return store.replace(self.var, cell.emptied())
        lo, hi = len(cell.lower), len(cell.upper)
        if self.op in ("<=", "=") and lo == self.n:
            return store.replace(self.var, SetRange(cell.lower, cell.lower))
        if self.op in (">=", "=") and hi == self.n:
            return store.replace(self.var, SetRange(cell.upper, cell.upper))
        return store


# -- instances ----------------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    name: str
    domain: object


@dataclass(frozen=True)
class CSPInstance:
    variables: tuple
    constraints: tuple = ()
    initial_store: Optional[Store] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = len(self.variables)
        if n < 1:
            raise ValueError("a CSP needs at least one variable")
        for c in self.constraints:
            for i in c.scope:
                if not 0 <= i < n:
                    raise ValueError(f"constraint {c} refers to variable {i} of {n}")
        if self.initial_store is None:
            object.__setattr__(self, "initial_store", self.top_store())
        else:
            store = self.initial_store
            if len(store) != n:
                raise ValueError("initial store arity does not match the variables")
            for v, cell in zip(self.variables, store):
                if not v.domain.accepts(cell):
                    raise ValueError(f"initial cell {cell} is outside the domain of {v.name}")

    @property
    def names(self) -> tuple:
        return tuple(v.name for v in self.variables)

    def top_store(self) -> Store:
        return Store(v.domain.top() for v in self.variables)


def _points(c, s: Store) -> list:
    values = [None] * len(s)
    for i in c.scope:
        cell = s[i]
        if cell.card() is not Card.ONE:
            raise ValueError(f"variable {i} is not a singleton in {s}")
        values[i] = cell.point()
    return values


def eval_on_singleton(c, s: Store) -> bool:
    return c.holds(_points(c, s))


def possibly_satisfiable(c, s: Store) -> bool:
    return c.possibly(s)


def narrow(c, s: Store) -> Store:
    return c.narrow(s)


def is_solution(constraints, s: Store) -> bool:
    """Every cell a singleton and every constraint satisfied."""
    if any(cell.card() is not Card.ONE for cell in s):
        return False
    values = [cell.point() for cell in s]
    return all(c.holds(values) for c in constraints)
