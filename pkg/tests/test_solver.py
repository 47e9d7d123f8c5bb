import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from podfeedback.checks import random_pod_instance, solver_agreement
from podfeedback.model import AgentStatus, InstanceError, allocation_value, is_feasible, make_instance
from podfeedback.solver import (SolveConstraints, brute_force_solve, classify_agents, hungarian_max,
                                solve_constrained, winners_of)

from conftest import small_instances


def C(forced=(), excluded=()):
    return SolveConstraints(frozenset(forced), frozenset(excluded))


def test_zvcg_unconstrained(zvcg_units):
    res = solve_constrained(zvcg_units)
    assert res.value == 20
    assert winners_of(zvcg_units, res.witness) == {"2", "3"}


def test_zvcg_forced_and_excluded(zvcg_units):
    assert solve_constrained(zvcg_units, None, C(forced={"1"})).value == 10
    assert not solve_constrained(zvcg_units, None, C(forced={"1", "2"})).optimal
    assert brute_force_solve(zvcg_units, None, C(excluded={"2", "3"})).value == 10
    assert solve_constrained(zvcg_units, None, C(excluded={"2", "3"})).value == 10


def test_everyone_excluded_gives_empty_pod(zvcg_units):
    res = brute_force_solve(zvcg_units, None, C(excluded={"1", "2", "3"}))
    assert res.value == 0 and res.witness.placements == {}
    assert solve_constrained(zvcg_units, None, C(excluded={"1", "2", "3"})).value == 0


def test_constraints_must_be_disjoint():
    with pytest.raises(ValueError):
        SolveConstraints(frozenset({"a"}), frozenset({"a"}))


def test_brute_force_size_guard():
    inst = make_instance(1, 100, [(str(k), 1, 1) for k in range(9)])
    with pytest.raises(InstanceError):
        brute_force_solve(inst)


def test_classification_examples(zvcg_units):
    assert classify_agents(zvcg_units) == {
        "1": AgentStatus.STRICT_LOSER, "2": AgentStatus.STRICT_WINNER, "3": AgentStatus.STRICT_WINNER}
    twins = make_instance(1, 30, [("a", 15, 4), ("b", 15, 4)])
    assert set(classify_agents(twins).values()) == {AgentStatus.TIED}
    assert classify_agents(make_instance(1, 30, [("x", 15, 3)])) == {"x": AgentStatus.STRICT_WINNER}


def test_forced_agent_with_zero_value_at_every_reachable_position():
    # b only values position 1; with a single ad slot a and b cannot both win.
    inst = make_instance(2, 30, [("a", 15, [5, 5]), ("b", 15, [0, 3])], max_ads=1)
    assert solve_constrained(inst, None, C(forced={"b"})).value == 3
    assert not solve_constrained(inst, None, C(forced={"a", "b"})).optimal


def test_agreement_with_brute_force_on_random_instances():
    rng = np.random.default_rng(11)
    bad = []
    for _ in range(500):
        bad += solver_agreement(random_pod_instance(rng, max_agents=6), rng, pairs=3)
    assert bad == []


def _brute_hungarian(w):
    best = None
    for cols in itertools.permutations(range(len(w[0])), len(w)):
        if any(w[r][c] is None for r, c in enumerate(cols)):
            continue
        total = sum(w[r][c] for r, c in enumerate(cols))
        best = total if best is None else max(best, total)
    return best


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(lambda r: st.integers(r, 5).flatmap(
    lambda c: st.lists(st.lists(st.one_of(st.none(), st.integers(-5, 20)), min_size=c, max_size=c),
                       min_size=r, max_size=r))))
def test_hungarian_matches_permutation_search(w):
    res = hungarian_max(w)
    expected = _brute_hungarian(w)
    if expected is None:
        assert res is None
    else:
        value, cols = res
        assert value == expected
        assert len(set(cols)) == len(cols)
        assert sum(w[r][c] for r, c in enumerate(cols)) == value


@st.composite
def instance_and_constraints(draw):
    inst = draw(small_instances())
    roles = draw(st.lists(st.integers(0, 2), min_size=inst.n, max_size=inst.n))
    return inst, C({a for a, r in zip(inst.ids, roles) if r == 1}, {a for a, r in zip(inst.ids, roles) if r == 2})


@settings(max_examples=150, deadline=None)
@given(instance_and_constraints())
def test_witness_is_feasible_and_respects_constraints(case):
    inst, cons = case
    res = solve_constrained(inst, None, cons)
    assert res.value == brute_force_solve(inst, None, cons).value
    if not res.optimal:
        return
    assert is_feasible(inst, res.witness)
    winners = winners_of(inst, res.witness)
    assert cons.forced_in <= winners
    assert not (cons.excluded & res.witness.agents)
    assert allocation_value(inst, None, res.witness) == res.value


@settings(max_examples=100, deadline=None)
@given(instance_and_constraints(), st.data())
def test_monotone_in_constraints(case, data):
    inst, cons = case
    base = solve_constrained(inst, None, cons).value
    free = [a for a in inst.ids if a not in cons.forced_in | cons.excluded]
    if not free:
        return
    extra = data.draw(st.sampled_from(free))
    more_excluded = solve_constrained(inst, None, C(cons.forced_in, cons.excluded | {extra})).value
    more_forced = solve_constrained(inst, None, C(cons.forced_in | {extra}, cons.excluded)).value
    if base is None:
        assert more_excluded is None and more_forced is None
    else:
        assert more_excluded is None or more_excluded <= base
        assert more_forced is None or more_forced <= base


@settings(max_examples=100, deadline=None)
@given(small_instances())
def test_classification_matches_optimal_allocations(inst):
    from podfeedback.solver import optimal_allocations
    values = inst.values
    opts = optimal_allocations(inst)
    won = [{i for p, i in enumerate(c) if i >= 0 and values[i][p] > 0} for c in opts]
    for k, status in enumerate(classify_agents(inst).values()):
        wins = any(k in w for w in won)
        loses = any(k not in w for w in won)
        assert status.is_winning == wins
        assert status.is_losing == loses
