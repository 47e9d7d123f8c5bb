import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from podfeedback.assignment import (AssignmentInstance, DualPoint, complementary_slackness, dual_feasible,
                                    dual_objective, extend_to_dual, is_optimal_dual, lattice_meet_join,
                                    optimal_matching, optimal_value, pod_equivalent, sample_optimal_duals,
                                    solve_assignment_dual, submodularity_violations, verify_lattice_and_extremes)
from podfeedback.coalitional import CoalitionalGame, vcg_feedback
from podfeedback.feedback import in_bicore
from podfeedback.lp import LinearProgram, solve_lp

EXAMPLE = AssignmentInstance(((5, 2), (3, 1)))


def brute_value(inst):
    return max(sum(inst.bids[i][j] for j, i in enumerate(agents))
               for agents in itertools.permutations(range(inst.n), inst.m))


@st.composite
def assignment_instances(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, n))
    rows = draw(st.lists(st.lists(st.integers(0, 12), min_size=m, max_size=m), min_size=n, max_size=n))
    return AssignmentInstance(tuple(map(tuple, rows)))


def test_instance_validation():
    with pytest.raises(ValueError):
        AssignmentInstance(((1, 2, 3), (1, 2, 3)))
    with pytest.raises(ValueError):
        AssignmentInstance(((1, 2), (1,)))
    with pytest.raises(ValueError):
        AssignmentInstance(((-1,),))
    with pytest.raises(ValueError):
        AssignmentInstance(())


def test_worked_example_extremes():
    assert optimal_value(EXAMPLE) == brute_value(EXAMPLE) == 6
    assert optimal_matching(EXAMPLE) == {0: 0, 1: 1}
    lo = solve_assignment_dual(EXAMPLE, "min_point")
    assert lo.pi == (3, 1) and lo.mu == (0, 0)
    vcg = vcg_feedback(pod_equivalent(EXAMPLE))
    assert lo.pi == vcg.discounts
    hi = solve_assignment_dual(EXAMPLE, "max_point")
    assert hi.mu == vcg.raises == (0, 0)
    # Prices cannot cover the whole surplus of agent 0: its discount stays at 1.
    assert hi.pi == (1, 0) and hi.p == (4, 1)
    assert is_optimal_dual(EXAMPLE, lo) and is_optimal_dual(EXAMPLE, hi)


def test_single_agent_single_item():
    inst = AssignmentInstance(((5,),))
    for point in [solve_assignment_dual(inst, k) for k in ("min_point", "max_point")] + \
            sample_optimal_duals(inst, 5, np.random.default_rng(0)):
        assert point.p[0] + point.pi[0] - point.mu[0] == 5
        assert point.p[0] + point.pi[0] == 5


def test_unknown_objective():
    with pytest.raises(ValueError):
        solve_assignment_dual(EXAMPLE, "middle")
    with pytest.raises(ValueError):
        solve_assignment_dual(EXAMPLE, [1, 2])


def test_unique_optimal_dual_is_both_meet_and_join():
    inst = AssignmentInstance(((5,), (5,)))
    lo, hi = (solve_assignment_dual(inst, k) for k in ("min_point", "max_point"))
    assert lo == hi == DualPoint((0, 0), (0, 0), (5,))
    assert lattice_meet_join(lo, hi) == (lo, lo)


def test_pod_equivalent_shape():
    pod = pod_equivalent(EXAMPLE)
    assert pod.pod.num_positions == pod.pod.max_ads == pod.pod.max_duration == 2
    assert all(a.duration == 1 for a in pod.agents)
    assert pod.bids == EXAMPLE.bids
    assert CoalitionalGame(pod).optimum == optimal_value(EXAMPLE)


def test_non_maximal_bicore_point_without_extension():
    inst = AssignmentInstance(((8, 1), (16, 7)))
    game = CoalitionalGame(pod_equivalent(inst))
    zero = (Fraction(0),) * 2
    assert in_bicore(game, zero, zero)
    assert extend_to_dual(inst, zero, zero) is None
    lo = solve_assignment_dual(inst, "min_point")
    assert extend_to_dual(inst, lo.pi, lo.mu) is not None


def test_lattice_report_on_random_three_by_three():
    rng = np.random.default_rng(5)
    for _ in range(20):
        report = verify_lattice_and_extremes(AssignmentInstance.random(rng, 3, 3), 5, rng)
        assert report.ok, report.violations
        assert report.checked_pairs == 21 and report.checked_bicore_points == 5


@settings(max_examples=60, deadline=None)
@given(assignment_instances(), st.integers(0, 2**32 - 1))
def test_meet_join_algebra(inst, seed):
    a, b = sample_optimal_duals(inst, 2, np.random.default_rng(seed))
    assert lattice_meet_join(a, a) == (a, a)
    meet, join = lattice_meet_join(a, b)
    assert lattice_meet_join(b, a) == (meet, join)
    for d in (a, b, meet, join):
        assert d.normalized and is_optimal_dual(inst, d)


@settings(max_examples=60, deadline=None)
@given(assignment_instances(), st.lists(st.integers(0, 9), min_size=12, max_size=12))
def test_normalization_is_safe(inst, extra):
    base = solve_assignment_dual(inst, "max_point")
    bump = extra[: inst.n]
    # Add the same amount to both pi_i and mu_i: still feasible, objective no better.
    loose = DualPoint(tuple(x + d for x, d in zip(base.pi, bump)),
                      tuple(x + d for x, d in zip(base.mu, bump)), base.p)
    assert dual_feasible(inst, loose)
    fixed = loose.normalize()
    assert fixed.normalized and dual_feasible(inst, fixed)
    assert dual_objective(fixed) <= dual_objective(loose)
    assert fixed == base


@settings(max_examples=60, deadline=None)
@given(assignment_instances(), st.integers(0, 2**32 - 1))
def test_complementary_slackness(inst, seed):
    matching = optimal_matching(inst)
    assert sum(inst.bids[i][j] for i, j in matching.items()) == brute_value(inst)
    for point in sample_optimal_duals(inst, 3, np.random.default_rng(seed)):
        assert complementary_slackness(inst, point, matching)


@settings(max_examples=60, deadline=None)
@given(assignment_instances())
def test_strong_duality_through_the_lp_solver(inst):
    n, m = inst.n, inst.m
    names = [f"x{i}_{j}" for i in range(n) for j in range(m)]
    rows = [({f"x{i}_{j}": 1 for j in range(m)}, 1) for i in range(n)]
    rows += [({f"x{i}_{j}": 1 for i in range(n)}, 1) for j in range(m)]
    primal = solve_lp(LinearProgram.build(names, {f"x{i}_{j}": inst.bids[i][j] for i in range(n) for j in range(m)}, rows))
    dnames = [f"pi{i}" for i in range(n)] + [f"mu{i}" for i in range(n)] + [f"p{j}" for j in range(m)]
    drows = [({f"pi{i}": -1, f"mu{i}": 1, f"p{j}": -1}, -inst.bids[i][j]) for i in range(n) for j in range(m)]
    dual = solve_lp(LinearProgram.build(dnames, {**{f"pi{i}": -1 for i in range(n)}, **{f"p{j}": -1 for j in range(m)}}, drows))
    assert primal.value == -dual.value == optimal_value(inst) == brute_value(inst)


@settings(max_examples=40, deadline=None)
@given(assignment_instances(max_n=5))
def test_value_functions_are_submodular(inst):
    assert submodularity_violations(CoalitionalGame(pod_equivalent(inst))) == {"winners": [], "losers": []}


@settings(max_examples=40, deadline=None)
@given(assignment_instances(), st.integers(0, 2**32 - 1))
def test_optimal_duals_project_into_bicore(inst, seed):
    game = CoalitionalGame(pod_equivalent(inst))
    for point in sample_optimal_duals(inst, 3, np.random.default_rng(seed)):
        assert in_bicore(game, point.pi, point.mu)
        assert extend_to_dual(inst, point.pi, point.mu) is not None
