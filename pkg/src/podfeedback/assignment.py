"""The assignment problem as a special case of pod auctions.

Each agent takes at most one item and each item goes to at most one agent. The
dual of the allocation problem, parametrised by a pair of coalitions, reads

    min  sum(p) + sum_{i in S|T} pi_i - sum_{i in T} mu_i
    s.t. pi_i - mu_i + p_j >= b_ij,   pi, mu, p >= 0.

Its optimal solutions for ``(N, {})`` project onto the bicore, and they form a
lattice whose extremes carry the VCG discounts and the VCG raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .coalitional import NEG_INF, CoalitionalGame
from .feedback import bicore_constraints, in_bicore
from .lp import LinearProgram, LpStatus, solve_lp
from .model import AgentProfile, AgentStatus, AuctionInstance, PodSpec
from .solver import hungarian_max

Number = int | Fraction


@dataclass(frozen=True)
class AssignmentInstance:
    """Bid matrix ``bids[i][j]`` of agent ``i`` for item ``j`` (n agents, m <= n items)."""

    bids: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        bids = tuple(tuple(int(x) for x in row) for row in self.bids)
        object.__setattr__(self, "bids", bids)
        if not bids or not bids[0]:
            raise ValueError("need at least one agent and one item")
        if any(len(row) != len(bids[0]) for row in bids):
            raise ValueError("bid matrix must be rectangular")
        if len(bids[0]) > len(bids):
            raise ValueError("more items than agents")
        if any(x < 0 for row in bids for x in row):
            raise ValueError("bids must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.bids)

    @property
    def m(self) -> int:
        return len(self.bids[0])

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, m: int, high: int = 20) -> AssignmentInstance:
        return cls(tuple(tuple(int(x) for x in row) for row in rng.integers(0, high + 1, size=(n, m))))


@dataclass(frozen=True)
class DualPoint:
    pi: tuple[Fraction, ...]
    mu: tuple[Fraction, ...]
    p: tuple[Fraction, ...]

    def __post_init__(self):
        for name in ("pi", "mu", "p"):
            object.__setattr__(self, name, tuple(Fraction(x) for x in getattr(self, name)))

    @property
    def normalized(self) -> bool:
        return all(a == 0 or b == 0 for a, b in zip(self.pi, self.mu))

    def normalize(self) -> DualPoint:
        """Subtract ``min(pi_i, mu_i)`` from both components of every agent."""
        d = [min(a, b) for a, b in zip(self.pi, self.mu)]
        return DualPoint(tuple(a - x for a, x in zip(self.pi, d)),
                         tuple(b - x for b, x in zip(self.mu, d)), self.p)


def optimal_value(inst: AssignmentInstance) -> int:
    """Best total bid with every item allocated (bids are nonnegative, so nothing is lost)."""
    cols = [[inst.bids[i][j] for i in range(inst.n)] for j in range(inst.m)]
    return hungarian_max(cols)[0]


def optimal_matching(inst: AssignmentInstance) -> dict[int, int]:
    """One optimal matching as ``{agent: item}``."""
    cols = [[inst.bids[i][j] for i in range(inst.n)] for j in range(inst.m)]
    _, agent_of_item = hungarian_max(cols)
    return {i: j for j, i in enumerate(agent_of_item)}


def dual_feasible(inst: AssignmentInstance, point: DualPoint) -> bool:
    if any(x < 0 for x in point.pi + point.mu + point.p):
        return False
    return all(point.pi[i] - point.mu[i] + point.p[j] >= inst.bids[i][j]
               for i in range(inst.n) for j in range(inst.m))


def dual_objective(point: DualPoint, s: frozenset[int] = None, t: frozenset[int] = frozenset()) -> Fraction:
    """Objective of the dual parametrised by ``(S, T)``; ``S`` defaults to every agent."""
    s = frozenset(range(len(point.pi))) if s is None else s
    return sum(point.p) + sum(point.pi[i] for i in s | t) - sum(point.mu[i] for i in t)


def is_optimal_dual(inst: AssignmentInstance, point: DualPoint) -> bool:
    return dual_feasible(inst, point) and dual_objective(point) == optimal_value(inst)


def _names(inst: AssignmentInstance) -> list[str]:
    return ([f"pi{i}" for i in range(inst.n)] + [f"mu{i}" for i in range(inst.n)]
            + [f"p{j}" for j in range(inst.m)])


def _optimal_face(inst: AssignmentInstance) -> LinearProgram:
    """Feasible duals whose objective does not exceed the primal optimum."""
    rows = []
    for i in range(inst.n):
        for j in range(inst.m):
            rows.append(({f"pi{i}": -1, f"mu{i}": 1, f"p{j}": -1}, -inst.bids[i][j]))
    cap = {f"pi{i}": 1 for i in range(inst.n)}
    cap.update({f"p{j}": 1 for j in range(inst.m)})
    rows.append((cap, optimal_value(inst)))
    return LinearProgram.build(_names(inst), {}, rows)


def _point(inst: AssignmentInstance, sol: dict[str, Fraction]) -> DualPoint:
    return DualPoint(tuple(sol[f"pi{i}"] for i in range(inst.n)),
                     tuple(sol[f"mu{i}"] for i in range(inst.n)),
                     tuple(sol[f"p{j}"] for j in range(inst.m)))


def _order_weights(inst: AssignmentInstance, sign: int) -> list[int]:
    # Lattice order: a point is larger when pi is smaller and mu, p are larger.
    return [-sign] * inst.n + [sign] * inst.n + [sign] * inst.m


def solve_assignment_dual(inst: AssignmentInstance, objective: str | Sequence[Number] = "min_point") -> DualPoint:
    """An optimal solution of the dual for ``(N, {})``.

    ``"min_point"`` and ``"max_point"`` return the smallest and largest optimal
    solutions in the lattice order; a weight vector over ``(pi, mu, p)``
    returns a weight-maximising optimal vertex instead.
    """
    if isinstance(objective, str):
        if objective not in ("min_point", "max_point"):
            raise ValueError(f"unknown objective {objective!r}")
        weights = _order_weights(inst, 1 if objective == "max_point" else -1)
    else:
        weights = list(objective)
        if len(weights) != 2 * inst.n + inst.m:
            raise ValueError("one weight per pi, mu and p component is required")
    out = solve_lp(_optimal_face(inst).with_objective(weights))
    if out.status is not LpStatus.OPTIMAL:
        raise RuntimeError(f"optimal face LP ended {out.status.value}")
    return _point(inst, out.point)


def lattice_meet_join(a: DualPoint, b: DualPoint) -> tuple[DualPoint, DualPoint]:
    """Meet takes the larger discounts and the smaller raises and prices; join the reverse."""
    meet = DualPoint(tuple(map(max, a.pi, b.pi)), tuple(map(min, a.mu, b.mu)), tuple(map(min, a.p, b.p)))
    join = DualPoint(tuple(map(min, a.pi, b.pi)), tuple(map(max, a.mu, b.mu)), tuple(map(max, a.p, b.p)))
    return meet, join


def sample_optimal_duals(inst: AssignmentInstance, count: int, rng: np.random.Generator) -> list[DualPoint]:
    """Optimal vertices reached by random weight vectors (random magnitude and sign)."""
    points = []
    for _ in range(count):
        w = rng.integers(1, 100, size=2 * inst.n + inst.m) * rng.choice([-1, 1], size=2 * inst.n + inst.m)
        points.append(solve_assignment_dual(inst, [int(x) for x in w]))
    return points


def complementary_slackness(inst: AssignmentInstance, point: DualPoint, matching: dict[int, int] | None = None) -> bool:
    """Every matched pair sits tight in its dual constraint."""
    matching = optimal_matching(inst) if matching is None else matching
    return all(point.pi[i] - point.mu[i] + point.p[j] == inst.bids[i][j] for i, j in matching.items())


# --- pod equivalence ------------------------------------------------------------

def pod_equivalent(inst: AssignmentInstance) -> AuctionInstance:
    """Pod auction with one position per item and a duration limit that never binds.

    Values are a constant above every bid, so any placement counts as winning.
    """
    value = max(max(row) for row in inst.bids) + 1
    agents = tuple(
        AgentProfile(str(i + 1), 1, (value,) * inst.m, tuple(row)) for i, row in enumerate(inst.bids)
    )
    return AuctionInstance(PodSpec(inst.m, inst.m, inst.m, frozenset()), agents)


def extend_to_dual(inst: AssignmentInstance, pi: Sequence[Fraction], mu: Sequence[Fraction]) -> Optional[DualPoint]:
    """Cheapest prices completing ``(pi, mu)`` to a feasible dual, if that dual is optimal.

    Any completion costs at least the componentwise-smallest one, so an optimal
    completion exists exactly when the smallest one is optimal.
    """
    p = tuple(max([Fraction(0)] + [inst.bids[i][j] - Fraction(pi[i]) + Fraction(mu[i]) for i in range(inst.n)])
              for j in range(inst.m))
    point = DualPoint(tuple(pi), tuple(mu), p)
    return point if is_optimal_dual(inst, point) else None


def sample_bicore_points(game: CoalitionalGame, count: int, rng: np.random.Generator,
                         scaled: bool = False) -> list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
    """Bicore vertices maximising random positive weights.

    With ``scaled`` each vertex is instead multiplied by a random factor in
    ``[0, 1]``, which gives (generally non-maximal) interior points.
    """
    winners = [i for i, s in enumerate(game.statuses) if s is AgentStatus.STRICT_WINNER]
    losers = [i for i, s in enumerate(game.statuses) if s is AgentStatus.STRICT_LOSER]
    names = [f"pi{i}" for i in winners] + [f"mu{i}" for i in losers]
    zero = (Fraction(0),) * game.n
    if not names:
        return [(zero, zero)]
    rows = []
    for c in bicore_constraints(game):
        row = {f"pi{i}": 1 for i in c.discount_set}
        row.update({f"mu{i}": 1 for i in c.raise_set})
        rows.append((row, c.rhs))
    lp = LinearProgram.build(names, {}, rows)
    out = []
    for _ in range(count):
        sol = solve_lp(lp.with_objective([int(x) for x in rng.integers(1, 100, size=len(names))])).point
        factor = Fraction(int(rng.integers(0, 101)), 100) if scaled else Fraction(1)
        pi, mu = list(zero), list(zero)
        for i in winners:
            pi[i] = sol[f"pi{i}"] * factor
        for i in losers:
            mu[i] = sol[f"mu{i}"] * factor
        out.append((tuple(pi), tuple(mu)))
    return out


# --- submodularity -----------------------------------------------------------------

def _pairwise_submodular(f: Callable[[int], object], n: int) -> list[tuple[int, int, int]]:
    """Violations of ``f(S | i) - f(S) >= f(S' | i) - f(S')`` for ``S <= S'``, ``i`` outside ``S'``.

    Written as ``f(S | i) + f(S') >= f(S) + f(S' | i)`` so that ``-inf`` values
    compare without subtraction.
    """
    full = (1 << n) - 1
    bad = []
    for big in range(full + 1):
        sub = big
        while True:
            for i in range(n):
                if not big >> i & 1:
                    lhs = f(sub | 1 << i) + f(big)
                    rhs = f(sub) + f(big | 1 << i)
                    if rhs != NEG_INF and lhs < rhs:
                        bad.append((sub, big, i))
            if sub == 0:
                break
            sub = (sub - 1) & big
    return bad


def submodularity_violations(game: CoalitionalGame) -> dict[str, list[tuple[int, int, int]]]:
    """Exhaustive submodularity check of ``V_w`` and ``V_l``; keys name the function."""
    return {"winners": _pairwise_submodular(game.v_w, game.n),
            "losers": _pairwise_submodular(game.v_l, game.n)}


# --- verification report ----------------------------------------------------------

@dataclass
class LatticeReport:
    instance: AssignmentInstance
    checked_pairs: int = 0
    checked_bicore_points: int = 0
    # Scaled-down bicore points with no optimal extension; informational only.
    interior_without_extension: int = 0
    violations: list[tuple[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_lattice_and_extremes(inst: AssignmentInstance, samples: int, rng: np.random.Generator) -> LatticeReport:
    """Check lattice closure, the VCG extremes and the bicore/dual correspondence.

    Every sampled optimal dual must project into the bicore, and every sampled
    maximal bicore vertex must extend to an optimal dual. Non-maximal bicore
    points need not extend (with ``b = [[8, 1], [16, 7]]`` the zero vector is in
    the bicore but no prices support it), so those are only counted.
    Violations are collected with a witness rather than raised.
    """
    if inst.n > 6:
        raise ValueError("instance too large for dual sampling")
    report = LatticeReport(inst)
    game = CoalitionalGame(pod_equivalent(inst))

    lo = solve_assignment_dual(inst, "min_point")
    hi = solve_assignment_dual(inst, "max_point")
    discounts = tuple(Fraction(game.vcg_discount(i)) for i in range(inst.n))
    raises = tuple(Fraction(game.vcg_raise(i)) for i in range(inst.n))
    if lo.pi != discounts:
        report.violations.append(("min_point discounts differ from VCG discounts", (lo, discounts)))
    if hi.mu != raises:
        report.violations.append(("max_point raises differ from VCG raises", (hi, raises)))

    points = [lo, hi] + sample_optimal_duals(inst, samples, rng)
    for k in range(len(points)):
        for x in points[:k]:
            pair = (points[k], x)
            for label, d in zip(("meet", "join"), lattice_meet_join(*pair)):
                if not (d.normalized and is_optimal_dual(inst, d)):
                    report.violations.append((f"{label} is not a normalized optimal dual", pair))
            report.checked_pairs += 1
        point = points[k]
        if not in_bicore(game, point.pi, point.mu):
            report.violations.append(("optimal dual projects outside the bicore", point))
        below = all(map(Fraction.__ge__, lo.pi, point.pi)) and all(map(Fraction.__le__, lo.p, point.p))
        above = all(map(Fraction.__ge__, hi.mu, point.mu)) and all(map(Fraction.__ge__, hi.p, point.p))
        if not (below and above):
            report.violations.append(("sampled dual lies outside the extremes", point))

    for pi, mu in sample_bicore_points(game, samples, rng):
        if extend_to_dual(inst, pi, mu) is None:
            report.violations.append(("bicore point has no optimal dual extension", (pi, mu)))
        report.checked_bicore_points += 1
    for pi, mu in sample_bicore_points(game, samples, rng, scaled=True):
        report.interior_without_extension += extend_to_dual(inst, pi, mu) is None
    return report
