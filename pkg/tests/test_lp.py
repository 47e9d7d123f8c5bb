import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from podfeedback.lp import LinearProgram, LpStatus, UnboundedError, leximin_max, solve_lp


def test_single_bound():
    out = solve_lp(LinearProgram.build(["x"], {"x": 1}, [({"x": 1}, 3)]))
    assert out.status is LpStatus.OPTIMAL and out.value == 3 and out.point == {"x": 3}


def test_sum_bound():
    lp = LinearProgram.build(["x", "y"], {"x": 1, "y": 1}, [({"x": 1, "y": 1}, 10), ({"x": 1}, 10), ({"y": 1}, 10)])
    assert solve_lp(lp).value == 10


def test_infeasible_and_unbounded():
    assert solve_lp(LinearProgram.build(["x"], {"x": 1}, [({"x": -1}, -5), ({"x": 1}, 2)])).status is LpStatus.INFEASIBLE
    assert solve_lp(LinearProgram.build(["x", "y"], {"x": 1}, [({"y": 1}, 2)])).status is LpStatus.UNBOUNDED
    with pytest.raises(UnboundedError):
        leximin_max(LinearProgram.build(["x"], {}, []))


def test_build_rejects_unknown_variables():
    with pytest.raises(ValueError):
        LinearProgram.build(["x"], {"z": 1}, [])
    with pytest.raises(ValueError):
        LinearProgram.build(["x", "x"], {}, [])


def _solve_square(a, b):
    """Gauss-Jordan over Fractions; None if singular."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [m[r][n] / m[r][r] for r in range(n)]


def vertex_oracle(lp):
    """Best objective over all basic feasible solutions (None if there are none)."""
    nv = len(lp.variables)
    rows = [(list(a), b) for a, b in lp.constraints]
    rows += [([Fraction(-1 if k == j else 0) for k in range(nv)], Fraction(0)) for j in range(nv)]
    best = None
    for active in itertools.combinations(rows, nv):
        x = _solve_square([r for r, _ in active], [b for _, b in active])
        if x is None or not lp.satisfied_by(dict(zip(lp.variables, x))):
            continue
        val = sum(c * xi for c, xi in zip(lp.objective, x))
        best = val if best is None else max(best, val)
    return best


def random_bounded_lp(rng):
    nv = int(rng.integers(1, 5))
    names = [f"x{k}" for k in range(nv)]
    cons = [([Fraction(1 if k == j else 0) for k in range(nv)], Fraction(int(rng.integers(1, 20)))) for j in range(nv)]
    for _ in range(int(rng.integers(0, 5))):
        cons.append(([Fraction(int(x)) for x in rng.integers(-4, 6, size=nv)], Fraction(int(rng.integers(-6, 25)), int(rng.integers(1, 4)))))
    obj = [Fraction(int(x)) for x in rng.integers(-3, 6, size=nv)]
    return LinearProgram.build(names, obj, cons)


def test_agrees_with_vertex_enumeration():
    rng = np.random.default_rng(3)
    statuses = set()
    for _ in range(20):
        lp = random_bounded_lp(rng)
        out = solve_lp(lp)
        expected = vertex_oracle(lp)
        statuses.add(out.status)
        if expected is None:
            assert out.status is LpStatus.INFEASIBLE
        else:
            assert out.status is LpStatus.OPTIMAL and out.value == expected
            assert lp.satisfied_by(out.point)
    assert LpStatus.OPTIMAL in statuses


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_agrees_with_vertex_enumeration_property(seed):
    lp = random_bounded_lp(np.random.default_rng(seed))
    out = solve_lp(lp)
    expected = vertex_oracle(lp)
    assert (out.value if out.optimal else None) == expected


def test_leximin_uniform_split():
    lp = LinearProgram.build(["p2", "p3"], {}, [({"p2": 1, "p3": 1}, 10), ({"p2": 1}, 10), ({"p3": 1}, 10)])
    assert leximin_max(lp) == {"p2": 5, "p3": 5}


def test_leximin_symmetric_polytope():
    names = ["a", "b", "c"]
    cons = [({u: 1, v: 1}, 7) for u, v in itertools.combinations(names, 2)]
    assert set(leximin_max(LinearProgram.build(names, {}, cons)).values()) == {Fraction(7, 2)}


def test_zvcg_bicore_polytope_by_hand():
    # Pairwise constraints from dropping one winner and raising the loser, plus the triple.
    names = ["mu1", "pi2", "pi3"]
    cons = [({"mu1": 1, "pi2": 1}, 10), ({"mu1": 1, "pi3": 1}, 10), ({"pi2": 1, "pi3": 1}, 10),
            ({"mu1": 1, "pi2": 1, "pi3": 1}, 10), ({"mu1": 1}, 10), ({"pi2": 1}, 10), ({"pi3": 1}, 10)]
    point = leximin_max(LinearProgram.build(names, {}, cons))
    assert point == {v: Fraction(10, 3) for v in names}


def test_leximin_beyond_the_minimum():
    # After the first level is pinned at 1, the other two share what is left.
    lp = LinearProgram.build(["a", "b", "c"], {}, [({"a": 1}, 1), ({"b": 1, "c": 1}, 9), ({"a": 1, "b": 1, "c": 1}, 10)])
    assert leximin_max(lp) == {"a": 1, "b": Fraction(9, 2), "c": Fraction(9, 2)}


def test_leximin_groups_are_processed_in_order():
    lp = LinearProgram.build(["a", "b"], {}, [({"a": 1, "b": 1}, 6), ({"a": 1}, 6), ({"b": 1}, 6)])
    assert leximin_max(lp, [["a"], ["b"]]) == {"a": 6, "b": 0}
    assert leximin_max(lp, [["b"], ["a"]]) == {"a": 0, "b": 6}


@st.composite
def packing_lps(draw):
    nv = draw(st.integers(1, 4))
    names = [f"v{k}" for k in range(nv)]
    cons = []
    for _ in range(draw(st.integers(1, 5))):
        members = draw(st.lists(st.sampled_from(names), min_size=1, unique=True))
        cons.append(({v: 1 for v in members}, draw(st.integers(0, 12))))
    cons += [({v: 1}, draw(st.integers(0, 12))) for v in names]
    return names, cons


@settings(max_examples=120, deadline=None)
@given(packing_lps(), st.randoms(use_true_random=False))
def test_leximin_invariant_under_reordering_and_duplication(case, rnd):
    names, cons = case
    point = leximin_max(LinearProgram.build(names, {}, cons))
    shuffled_names = list(names)
    rnd.shuffle(shuffled_names)
    shuffled_cons = list(cons) + list(cons[: len(cons) // 2 + 1])
    rnd.shuffle(shuffled_cons)
    other = leximin_max(LinearProgram.build(shuffled_names, {}, shuffled_cons))
    assert other == point
    lp = LinearProgram.build(names, {}, cons)
    assert lp.satisfied_by(point)
    assert sum(point.values()) == solve_lp(lp.with_objective({v: 1 for v in names})).value
