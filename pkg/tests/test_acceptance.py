"""Exit criteria for the build, one test per criterion.

Each test prints a PASS/FAIL line (visible with ``-s``) and the terminal
summary lists every criterion's outcome.
"""
import random
import time

import pytest

import test_domains
import test_filtering
import test_heuristics
from branching.constraints import BAnd, BOr, BVar, CSPInstance, Formula, Linear, Variable, is_solution
from branching.costs import Compound, CostOrdering, CostSpec, Sum, classical_spec
from branching.domains import BoolDomain, FiniteSet, IntDomain, IntRange, RealDomain
from branching.engine import COMPLETE, SolverConfig, solve, solve_real
from branching.filtering import FilteringKind, filter_consistency_check
from branching.oracle import enumerate_solutions, optimal_by_order
from branching.precision import Store, stack_covers, store_leq
from branching.report import report_json
from conftest import at_most_one_instance
from strategies import random_suite

SUITE = random_suite(250)
FILTERS = ("check", "fixpoint")
SELECTORS = ("naive", "ff")


def config(epsilon=0.0, filtering="check", selector="naive", **kw):
    return SolverConfig(epsilon=epsilon, filtering=FilteringKind(filtering), selector=selector, **kw)


def point_store(values):
    return Store(IntRange(v, v) for v in values)


def report(num, ok, detail=""):
    print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return ok


def line_instance():
    xs = [Variable("x", RealDomain(0, 1)), Variable("y", RealDomain(0, 1))]
    return CSPInstance(xs, [Linear(((0, 1.0), (1, 1.0)), "=", 1.0), Linear(((0, 1.0), (1, -1.0)), "=", 0.0)])


@pytest.mark.acceptance(1)
def test_criterion_1_at_most_one_classical():
    start = time.perf_counter()
    result = solve(at_most_one_instance(), SolverConfig(cost=classical_spec()))
    elapsed = time.perf_counter() - start
    expected = {point_store(v) for v in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)]}
    ok = set(result.stack) == expected and len(result.stack) == 4 and elapsed < 1.0
    assert report(1, ok, f"{len(result.stack)} stores in {elapsed:.4f}s")


@pytest.mark.acceptance(2)
def test_criterion_2_at_most_one_optimisation():
    total, x13, x23 = Sum((0, 1, 2)), Sum((0, 2)), Sum((1, 2))
    max_min = CostOrdering("lex", ("max", "min"))

    def run(expr, ordering):
        result = solve(at_most_one_instance(), SolverConfig(cost=CostSpec(expr, ordering)))
        top = result.stack.top()
        return top, expr.evaluate(top)

    _, max_cost = run(total, CostOrdering("gt"))
    min_top, min_cost = run(total, CostOrdering("lt"))
    f3_top, f3_cost = run(Compound((total, x13)), max_min)
    f4_top, f4_cost = run(Compound((total, x23)), max_min)
    checks = [
        max_cost == (1.0,),
        min_top == point_store((0, 0, 0)) and min_cost == (0.0,),
        f3_cost == (1.0, 0.0) and f3_top == point_store((0, 1, 0)),
        f4_cost == (1.0, 0.0) and f4_top == point_store((1, 0, 0)),
    ]
    assert report(2, all(checks), f"rows {checks}")


@pytest.mark.acceptance(3)
def test_criterion_3_exact_search_matches_oracle():
    start = time.perf_counter()
    mismatches = 0
    for inst in SUITE:
        expected = enumerate_solutions(inst).stores
        for filtering in FILTERS:
            for selector in SELECTORS:
                result = solve(inst, config(0.0, filtering, selector))
                if set(result.stack) != expected or len(result.stack) != len(expected):
                    mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60 and len(SUITE) >= 200
    assert report(3, ok, f"{len(SUITE)} instances x 4 configs, {mismatches} mismatches, {elapsed:.2f}s")


@pytest.mark.acceptance(4)
def test_criterion_4_reals_terminate_and_cover_the_solution():
    start = time.perf_counter()
    inst = line_instance()
    root = inst.initial_store.precision().real
    failures = []
    for epsilon in (0.1, 0.01):
        for filtering in FILTERS:
            result = solve_real(inst, config(epsilon, filtering))
            bound = root / epsilon + 1
            covers = any(s[0].contains(0.5) and s[1].contains(0.5) for s in result.stack)
            if result.status != COMPLETE or result.max_depth > bound or not covers:
                failures.append((epsilon, filtering, result.max_depth, bound, covers))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 5.0
    assert report(4, ok, f"failures={failures} in {elapsed:.3f}s")


EPS_CHAINS = [(0.5, 1.0), (1.0, 2.5), (0.5, 4.0), (2.0, 3.0)]


@pytest.mark.acceptance(5)
def test_criterion_5_covering_chain():
    violations, checked = 0, 0
    cases = [(inst, f, s) for inst in SUITE for f in FILTERS for s in SELECTORS]
    cases += [(line_instance(), "fixpoint", s) for s in SELECTORS]
    for inst, filtering, selector in cases:
        p0 = solve(inst, config(0.0, filtering, selector)).stack
        if not p0:
            continue
        chains = EPS_CHAINS if inst.variables[0].domain != RealDomain(0, 1) else [(0.01, 0.1), (0.1, 0.5)]
        for e1, e2 in chains:
            p1 = solve(inst, config(e1, filtering, selector)).stack
            p2 = solve(inst, config(e2, filtering, selector)).stack
            checked += 1
            if not (stack_covers(p0, p1) and stack_covers(p1, p2)):
                violations += 1
    assert report(5, violations == 0 and checked > 0, f"{checked} chains, {violations} violations")


@pytest.mark.acceptance(6)
def test_criterion_6_constant_cost_reports_are_identical():
    differences, compared = 0, 0
    instances = SUITE + [at_most_one_instance(), line_instance()]
    for inst in instances:
        finite = not isinstance(inst.variables[0].domain, RealDomain)
        for epsilon in ((0.0, 0.5, 1.5) if finite else (0.1,)):
            for filtering in FILTERS:
                plain_cfg = config(epsilon, filtering)
                const_cfg = config(epsilon, filtering, cost=classical_spec())
                plain = report_json(solve(inst, plain_cfg), plain_cfg, inst.names)
                constant = report_json(solve(inst, const_cfg), const_cfg, inst.names)
                compared += 1
                differences += plain != constant
    assert report(6, differences == 0, f"{compared} report pairs, {differences} differ")


@pytest.mark.acceptance(7)
def test_criterion_7_scalar_optimum_matches_oracle():
    rng = random.Random(7)
    mismatches, checked = 0, 0
    for inst in SUITE:
        n = len(inst.variables)
        expr = Sum(tuple(sorted(rng.sample(range(n), rng.randint(1, n)))))
        oracle = enumerate_solutions(inst)
        classical = solve(inst, config()).stack
        for kind in ("gt", "lt"):
            spec = CostSpec(expr, CostOrdering(kind))
            result = solve(inst, config(cost=spec))
            checked += 1
            if not oracle.solutions:
                mismatches += bool(result.stack)
                continue
            best = {cost for _, cost in optimal_by_order(oracle, spec)}
            top = result.stack.top()
            first = next(s for s in classical if expr.evaluate(s) in best)
            if expr.evaluate(top) not in best or top != first or result.delta != expr.evaluate(top):
                mismatches += 1
    assert report(7, mismatches == 0, f"{checked} runs, {mismatches} mismatches")


EPS_GRID = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0]


def _widened(k, real):
    domain = RealDomain(0, k) if real else IntDomain(0, k)
    xs = [Variable(f"x{i}", domain) for i in (1, 2, 3)]
    return CSPInstance(xs, [Linear(((0, 1), (1, 1), (2, 1)), "<=", 1)])


def _covers_solution(inst, store, real):
    if real:
        # cost and constraint are monotone, so the lower corner decides
        return sum(c.lo for c in store) <= 1
    return any(store_leq(sol, store) for sol in enumerate_solutions(inst).stores)


@pytest.mark.acceptance(8)
def test_criterion_8_approximate_soundness():
    spec = CostSpec(Sum((0, 1, 2)), CostOrdering("lt"))
    violations, compared = 0, 0
    for real in (False, True):
        for k in (1, 2, 3, 4, 6):
            inst = _widened(k, real)
            for filtering in FILTERS:
                for selector in SELECTORS:
                    grid = [e for e in EPS_GRID if e > 0] if real else EPS_GRID
                    tops = {}
                    for e in grid:
                        stack = solve(inst, config(e, filtering, selector, cost=spec)).stack
                        if stack:
                            tops[e] = stack.top()
                    for e1 in tops:
                        for e2 in tops:
                            if e1 < e2 and _covers_solution(inst, tops[e2], real):
                                compared += 1
                                if spec.expr.evaluate(tops[e1]) > spec.expr.evaluate(tops[e2]):
                                    violations += 1
    ok = violations == 0 and compared > 0 and len(EPS_GRID) >= 5
    assert report(8, ok, f"{compared} eps pairs, {violations} violations")


def _count_cases(fn, **kwargs):
    inner = fn.hypothesis.inner_test
    calls = [0]

    def counted(*a, **kw):
        calls[0] += 1
        return inner(*a, **kw)

    fn.hypothesis.inner_test = counted
    try:
        fn(**kwargs)
    finally:
        fn.hypothesis.inner_test = inner
    return calls[0]


@pytest.mark.acceptance(9)
def test_criterion_9_definition_level_suites():
    suites = []
    for name in ("check", "fixpoint"):
        suites.append((f"filter {name} finite", test_filtering.test_filter_conditions_on_finite_csps, {"name": name}))
        suites.append((f"filter {name} sets", test_filtering.test_filter_conditions_on_set_csps, {"name": name}))
    for kind in ("finite", "int", "set", "real", "lattice"):
        suites.append((f"split {kind}", test_domains.test_split_complete_and_contracting, {"kind": kind}))
        suites.append((f"precision {kind}", test_domains.test_precision_strictly_monotone, {"kind": kind}))
    suites.append(("naive", test_heuristics.test_naive_postcondition, {}))
    suites.append(("first fail", test_heuristics.test_ff_postcondition, {}))
    suites.append(("tie rule", test_heuristics.test_ff_breaks_ties_leftmost, {}))
    short = []
    for label, fn, kwargs in suites:
        n = _count_cases(fn, **kwargs)
        if n < 500:
            short.append((label, n))
    assert report(9, not short, f"{len(suites)} suites, under 500 cases: {short}")


@pytest.mark.acceptance(10)
def test_criterion_10_boolean_example():
    xs = [Variable(n, BoolDomain()) for n in "xyz"]
    c = Formula(BOr((BVar(0), BAnd((BVar(1), BVar(2))))))
    inst = CSPInstance(xs, [c])
    tuples = set(enumerate_solutions(inst).solutions)
    expected = {(0, 1, 1), (1, 1, 1), (1, 0, 1), (1, 1, 0), (1, 0, 0)}

    def fs(*v):
        return FiniteSet(v)

    s1 = Store([fs(1), fs(0), fs(0)])
    s2 = Store([fs(0, 1)] * 3)
    s3 = Store([fs(0)] * 3)
    s4 = Store([fs(), fs(), fs(0)])
    checks = [
        tuples == expected,
        is_solution([c], s1) and s1.consistent(),
        s2.consistent() and not is_solution([c], s2),
        s3.consistent() and not is_solution([c], s3),
        not s4.consistent(),
        not filter_consistency_check([c], s3).consistent(),
        filter_consistency_check([c], s1) == s1,
        set(solve(inst, SolverConfig()).stack) == enumerate_solutions(inst).stores,
    ]
    assert report(10, all(checks), f"checks {checks}")
