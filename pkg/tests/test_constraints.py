import random
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branching.constraints import (
    BAnd,
    BConst,
    BNot,
    BOr,
    BVar,
    Cardinality,
    CSPInstance,
    Formula,
    Linear,
    Member,
    Subset,
    Table,
    Variable,
    eval_on_singleton,
    is_solution,
    narrow,
    possibly_satisfiable,
)
from branching.domains import FiniteSet, IntDomain, IntRange, RealRange, SetRange
from branching.precision import Store, store_leq
from strategies import GRID, cell_values, random_substore, seeds, random_csp

B = FiniteSet({0, 1})
X_OR_Y_AND_Z = Formula(BOr((BVar(0), BAnd((BVar(1), BVar(2))))))
AT_MOST_ONE = Linear(((0, 1), (1, 1), (2, 1)), "<=", 1)


def fs(*vals):
    return FiniteSet(vals)


def ints(*bounds):
    return Store(IntRange(a, b) for a, b in bounds)


def test_eval_on_singleton_examples():
    assert eval_on_singleton(X_OR_Y_AND_Z, Store([fs(1), fs(0), fs(0)]))
    assert not eval_on_singleton(X_OR_Y_AND_Z, Store([fs(0), fs(0), fs(0)]))
    assert eval_on_singleton(AT_MOST_ONE, ints((0, 0), (0, 0), (1, 1)))


def test_eval_on_singleton_needs_points():
    with pytest.raises(ValueError):
        eval_on_singleton(AT_MOST_ONE, ints((0, 1), (0, 0), (0, 0)))


def test_possibly_examples():
    assert possibly_satisfiable(AT_MOST_ONE, ints((0, 1), (0, 1), (0, 1)))
    assert not possibly_satisfiable(AT_MOST_ONE, ints((1, 1), (1, 1), (0, 1)))
    assert not possibly_satisfiable(AT_MOST_ONE, ints((1, 0), (0, 1), (0, 1)))
    assert not possibly_satisfiable(X_OR_Y_AND_Z, Store([fs(), fs(0), fs(0)]))


def test_narrow_examples():
    assert narrow(Linear(((0, 1), (1, 1)), "<=", 0), ints((0, 1), (0, 1))) == ints((0, 0), (0, 0))
    table = Table((0, 1), {(0, 1), (1, 1)})
    assert narrow(table, Store([B, B])) == Store([B, fs(1)])
    fixed = Store([B, fs(1)])
    assert narrow(table, fixed) == fixed


def test_linear_equality_on_reals_uses_tolerance():
    c = Linear(((0, 1.0), (1, 1.0)), "=", 0.3)
    assert c.holds([0.1, 0.2])
    assert not Linear(((0, 1.0), (1, 1.0)), "!=", 0.3).holds([0.1, 0.2])
    assert Linear(((0, 1), (1, 1)), "=", 3).holds([1, 2])


def test_linear_narrowing_on_reals():
    s = Store([RealRange(0, 1), RealRange(0, 1)])
    out = narrow(Linear(((0, 1.0), (1, 1.0)), ">=", 1.5), s)
    assert out == Store([RealRange(0.5, 1), RealRange(0.5, 1)])
    assert narrow(Linear(((0, 1.0),), "<=", 0.2), Store([RealRange(0.8, 1)]))[0].is_empty()


def test_linear_rejects_unknown_relation():
    with pytest.raises(ValueError):
        Linear(((0, 1),), "<", 1)


def test_formula_parts():
    assert Formula(BNot(BVar(0))).holds([0])
    assert not Formula(BConst(False)).holds([1])
    out = narrow(X_OR_Y_AND_Z, Store([fs(0), B, B]))
    assert out == Store([fs(0), fs(1), fs(1)])
    assert X_OR_Y_AND_Z.scope == (0, 1, 2)


def test_set_constraints():
    top = SetRange(frozenset(), {1, 2, 3})
    s = Store([top, top])
    assert narrow(Member(1, 0), s)[0] == SetRange({1}, {1, 2, 3})
    assert narrow(Member(1, 0, negated=True), s)[0] == SetRange(frozenset(), {2, 3})
    assert narrow(Subset(0, 1), Store([SetRange({1}, {1, 2}), SetRange(frozenset(), {1, 3})])) == Store(
        [SetRange({1}, {1}), SetRange({1}, {1, 3})]
    )
    assert narrow(Cardinality(0, "<=", 1), Store([SetRange({2}, {1, 2, 3})]))[0] == SetRange({2}, {2})
    assert not Cardinality(0, ">=", 4).possibly(Store([top]))
    assert Cardinality(0, "!=", 2).holds([frozenset({1})])


def test_instance_validation():
    v = [Variable("x", IntDomain(0, 1))]
    with pytest.raises(ValueError):
        CSPInstance(v, [Linear(((3, 1),), "<=", 0)])
    with pytest.raises(ValueError):
        CSPInstance([])
    with pytest.raises(ValueError):
        CSPInstance(v, [], Store([IntRange(0, 5)]))
    inst = CSPInstance(v, [], Store([IntRange(1, 1)]))
    assert inst.initial_store == Store([IntRange(1, 1)])
    assert inst.names == ("x",)


def test_is_solution():
    assert is_solution([AT_MOST_ONE], ints((1, 1), (0, 0), (0, 0)))
    assert not is_solution([AT_MOST_ONE], ints((1, 1), (1, 1), (0, 0)))
    assert not is_solution([AT_MOST_ONE], ints((0, 1), (0, 0), (0, 0)))


# -- properties against brute force ------------------------------------------


def _points(store):
    return product(*(cell_values(c) for c in store))


def _inside(values, store):
    return all(c.contains(v) for c, v in zip(store, values))


@settings(max_examples=300)
@given(seeds)
def test_narrow_keeps_solutions_and_contracts(seed):
    rng = random.Random(seed)
    inst = random_csp(rng)
    s = random_substore(rng, inst.initial_store)
    for c in inst.constraints:
        out = c.narrow(s)
        assert store_leq(out, s)
        for values in _points(s):
            if c.holds(values):
                assert _inside(values, out)


@settings(max_examples=300)
@given(seeds)
def test_possibly_is_sound(seed):
    rng = random.Random(seed)
    inst = random_csp(rng)
    s = random_substore(rng, inst.initial_store)
    for c in inst.constraints:
        if any(c.holds(values) for values in _points(s)):
            assert c.possibly(s)


bool_exprs = st.recursive(
    st.integers(0, 2).map(BVar) | st.booleans().map(BConst),
    lambda sub: sub.map(BNot) | st.tuples(sub, sub).map(BAnd) | st.tuples(sub, sub).map(BOr),
    max_leaves=6,
)
bool_cells = st.sampled_from([fs(), fs(0), fs(1), B])


@settings(max_examples=300)
@given(bool_exprs, st.lists(bool_cells, min_size=3, max_size=3))
def test_formula_narrowing_against_truth_table(expr, cells):
    c = Formula(expr)
    s = Store(cells)
    out = c.narrow(s)
    assert store_leq(out, s)
    sols = [v for v in _points(s) if c.holds(v)]
    if sols:
        assert c.possibly(s)
    for v in sols:
        assert _inside(v, out)


set_cells = st.builds(
    lambda upper, lower: SetRange(lower & upper, upper),
    st.frozensets(st.integers(1, 3)),
    st.frozensets(st.integers(1, 3)),
)
set_constraints = st.one_of(
    st.builds(Member, st.integers(1, 3), st.integers(0, 1), st.booleans()),
    st.builds(Subset, st.integers(0, 1), st.integers(0, 1)),
    st.builds(Cardinality, st.integers(0, 1), st.sampled_from(["<=", ">=", "=", "!="]), st.integers(0, 3)),
)


@settings(max_examples=300)
@given(set_constraints, set_cells, set_cells)
def test_set_narrowing_against_enumeration(c, a, b):
    s = Store([a, b])
    out = c.narrow(s)
    assert store_leq(out, s)
    sols = [v for v in product(a.members(), b.members()) if c.holds(v)]
    if sols:
        assert c.possibly(s)
    for v in sols:
        assert _inside(v, out)


real_points = st.sampled_from(GRID)


@settings(max_examples=300)
@given(
    st.lists(st.tuples(real_points, real_points).map(sorted), min_size=2, max_size=2),
    st.lists(st.sampled_from([-2.0, -1.0, 0.5, 1.0, 3.0]), min_size=2, max_size=2),
    st.sampled_from(["<=", ">=", "="]),
    real_points,
)
def test_real_linear_narrowing_keeps_grid_solutions(bounds, coefs, op, rhs):
    s = Store(RealRange(lo, hi) for lo, hi in bounds)
    c = Linear(tuple(enumerate(coefs)), op, rhs)
    out = c.narrow(s)
    assert store_leq(out, s)
    for x in GRID:
        for y in GRID:
            if s[0].contains(x) and s[1].contains(y) and c.holds([x, y]):
                assert out[0].contains(x) and out[1].contains(y)
