"""Exact winner determination for pod auctions.

``solve_constrained`` enumerates ad subsets that respect the count, duration and
exclusion limits, in decreasing order of an upper bound on their bid value, and
assigns each candidate subset to positions with the Hungarian method. Uniform
bids skip the assignment step. ``brute_force_solve`` is an unpruned enumeration
of every position map, kept independent as a test oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .model import AgentStatus, Allocation, AuctionInstance, Bids, InstanceError

INFEASIBLE = None


@dataclass(frozen=True)
class SolveConstraints:
    forced_in: frozenset[str] = frozenset()
    excluded: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "forced_in", frozenset(self.forced_in))
        object.__setattr__(self, "excluded", frozenset(self.excluded))
        if self.forced_in & self.excluded:
            raise ValueError("forced_in and excluded must be disjoint")


@dataclass(frozen=True)
class SolveResult:
    value: Optional[int]
    witness: Optional[Allocation]

    @property
    def optimal(self) -> bool:
        return self.value is not None


def _masks(instance: AuctionInstance, constraints: SolveConstraints) -> tuple[int, int]:
    forced = excluded = 0
    for a in constraints.forced_in:
        forced |= 1 << instance.index_of(a)
    for a in constraints.excluded:
        excluded |= 1 << instance.index_of(a)
    return forced, excluded


# --- assignment ------------------------------------------------------------

def hungarian_max(weights: list[list[Optional[int]]]) -> Optional[tuple[int, list[int]]]:
    """Maximum-weight assignment of every row to a distinct column.

    ``weights`` is rows x cols with rows <= cols; ``None`` marks a forbidden
    cell. Returns ``(value, col_of_row)`` or ``None`` if no assignment avoids
    the forbidden cells. Integer arithmetic throughout.
    """
    n = len(weights)
    if n == 0:
        return 0, []
    m = len(weights[0])
    if n > m:
        return None
    big = 1 + sum(max((abs(w) for w in row if w is not None), default=0) for row in weights)
    forbid = big * (n + 1)
    # Minimise cost = -weight; forbidden cells cost more than any full assignment.
    cost = [[forbid if w is None else -w for w in row] for row in weights]
    inf = forbid * (n + 2)
    u = [0] * (n + 1)
    v = [0] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            row = cost[i0 - 1]
            ui0 = u[i0]
            for j in range(1, m + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    col_of = [0] * n
    for j in range(1, m + 1):
        if p[j]:
            col_of[p[j] - 1] = j - 1
    if any(weights[r][c] is None for r, c in enumerate(col_of)):
        return None
    return sum(weights[r][c] for r, c in enumerate(col_of)), col_of


# --- subset enumeration -----------------------------------------------------

@lru_cache(maxsize=4096)
def feasible_subsets(instance: AuctionInstance) -> tuple[int, ...]:
    """Bitmasks of agent sets that fit the pod (count, duration, exclusions)."""
    pod = instance.pod
    cap = min(pod.max_ads, pod.num_positions)
    durations = [a.duration for a in instance.agents]
    excl = instance.exclusion_masks
    out = []

    def grow(k: int, mask: int, count: int, dur: int):
        if k == instance.n:
            out.append(mask)
            return
        grow(k + 1, mask, count, dur)
        if count < cap and dur + durations[k] <= pod.max_duration and not (excl[k] & mask):
            grow(k + 1, mask | (1 << k), count + 1, dur + durations[k])

    grow(0, 0, 0, 0)
    return tuple(out)


def _members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@lru_cache(maxsize=65536)
def _ranked(instance: AuctionInstance, bids: Bids) -> tuple[tuple[int, int], ...]:
    """Feasible subsets with their bid upper bound, best bound first."""
    top = [max(b) for b in bids]
    ranked = []
    for mask in feasible_subsets(instance):
        ranked.append((sum(top[i] for i in _members(mask)), mask))
    ranked.sort(key=lambda t: (-t[0], t[1]))
    return tuple(ranked)


def _uniform(bids: Bids, values: Bids) -> bool:
    return all(len(set(b)) == 1 and len(set(v)) == 1 for b, v in zip(bids, values))


def _place(instance: AuctionInstance, bids: Bids, mask: int, forced: int):
    """Best placement of the agents in ``mask``; forced agents need positive value."""
    members = _members(mask)
    values = instance.values
    weights = []
    for i in members:
        row = []
        for j in range(instance.pod.num_positions):
            if forced >> i & 1 and values[i][j] <= 0:
                row.append(None)
            else:
                row.append(bids[i][j])
        weights.append(row)
    res = hungarian_max(weights)
    if res is None:
        return None
    value, cols = res
    return value, {c: instance.agents[i].agent_id for i, c in zip(members, cols)}


def solve_masks(instance: AuctionInstance, bids: Bids, forced: int, excluded: int) -> SolveResult:
    """Bitmask form of :func:`solve_constrained`."""
    if forced & excluded:
        raise ValueError("forced_in and excluded must be disjoint")
    uniform = _uniform(bids, instance.values)
    best_value = None
    best_alloc = None
    for bound, mask in _ranked(instance, bids):
        if best_value is not None and bound <= best_value:
            break
        if mask & excluded or (mask & forced) != forced:
            continue
        if uniform:
            value = bound
            alloc = {k: instance.agents[i].agent_id for k, i in enumerate(_members(mask))}
        else:
            placed = _place(instance, bids, mask, forced)
            if placed is None:
                continue
            value, alloc = placed
        if best_value is None or value > best_value:
            best_value, best_alloc = value, alloc
    if best_value is None:
        return SolveResult(None, None)
    return SolveResult(best_value, Allocation(best_alloc))


def solve_constrained(
    instance: AuctionInstance, bids: Bids | None = None, constraints: SolveConstraints | None = None
) -> SolveResult:
    """Maximum bid value over feasible pods with ``forced_in`` winning and ``excluded`` losing.

    Returns an infeasible result (value ``None``) when no pod lets every forced
    agent win.
    """
    bids = instance.bids if bids is None else bids
    constraints = constraints or SolveConstraints()
    forced, excluded = _masks(instance, constraints)
    return solve_masks(instance, bids, forced, excluded)


# --- brute force oracle -------------------------------------------------------

BRUTE_MAX_AGENTS = 8
BRUTE_MAX_POSITIONS = 6


@lru_cache(maxsize=4096)
def enumerate_allocations(instance: AuctionInstance) -> tuple[tuple[int, ...], ...]:
    """Every feasible allocation as a tuple giving the agent index per position (-1 = empty)."""
    if instance.n > BRUTE_MAX_AGENTS or instance.pod.num_positions > BRUTE_MAX_POSITIONS:
        raise InstanceError("", "instance too large for brute-force enumeration")
    pod = instance.pod
    durations = [a.duration for a in instance.agents]
    excluded_pairs = [tuple(instance.index_of(x) for x in pair) for pair in pod.exclusions]
    choices = [-1] + list(range(instance.n))
    out = []
    for combo in itertools.product(choices, repeat=pod.num_positions):
        placed = [i for i in combo if i >= 0]
        if len(set(placed)) != len(placed) or len(placed) > pod.max_ads:
            continue
        if sum(durations[i] for i in placed) > pod.max_duration:
            continue
        if any(a in placed and b in placed for a, b in excluded_pairs):
            continue
        out.append(combo)
    return tuple(out)


def brute_force_solve(
    instance: AuctionInstance, bids: Bids | None = None, constraints: SolveConstraints | None = None
) -> SolveResult:
    bids = instance.bids if bids is None else bids
    constraints = constraints or SolveConstraints()
    forced = {instance.index_of(a) for a in constraints.forced_in}
    excluded = {instance.index_of(a) for a in constraints.excluded}
    values = instance.values
    best = None
    witness = None
    for combo in enumerate_allocations(instance):
        winners = {i for pos, i in enumerate(combo) if i >= 0 and values[i][pos] > 0}
        if not forced <= winners or winners & excluded:
            continue
        total = sum(bids[i][pos] for pos, i in enumerate(combo) if i >= 0 and i not in excluded)
        if best is None or total > best:
            best, witness = total, combo
    if best is None:
        return SolveResult(None, None)
    return SolveResult(best, Allocation({pos: instance.agents[i].agent_id
                                         for pos, i in enumerate(witness) if i >= 0}))


def optimal_allocations(instance: AuctionInstance, bids: Bids | None = None) -> list[tuple[int, ...]]:
    """All optimal allocations (brute force), in :func:`enumerate_allocations` form."""
    bids = instance.bids if bids is None else bids
    scored = [(sum(bids[i][p] for p, i in enumerate(c) if i >= 0), c) for c in enumerate_allocations(instance)]
    top = max(s for s, _ in scored)
    return [c for s, c in scored if s == top]


# --- classification -----------------------------------------------------------

def classify_masks(instance: AuctionInstance, bids: Bids) -> tuple[AgentStatus, ...]:
    opt = solve_masks(instance, bids, 0, 0).value
    statuses = []
    for i in range(instance.n):
        winning = solve_masks(instance, bids, 1 << i, 0).value == opt
        losing = solve_masks(instance, bids, 0, 1 << i).value == opt
        if winning and losing:
            statuses.append(AgentStatus.TIED)
        elif winning:
            statuses.append(AgentStatus.STRICT_WINNER)
        else:
            statuses.append(AgentStatus.STRICT_LOSER)
    return tuple(statuses)


def classify_agents(instance: AuctionInstance, bids: Bids | None = None) -> dict[str, AgentStatus]:
    """Status of every agent: winning in some optimum, losing in some optimum, or both."""
    bids = instance.bids if bids is None else bids
    return dict(zip(instance.ids, classify_masks(instance, bids)))


def winners_of(instance: AuctionInstance, alloc: Allocation) -> set[str]:
    """Agents placed at a position where they have positive value."""
    return {a for pos, a in alloc.placements.items()
            if instance.agents[instance.index_of(a)].value[pos] > 0}


def subsets(items: Iterable) -> Iterable[frozenset]:
    items = list(items)
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)
