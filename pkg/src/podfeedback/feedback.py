"""Core and bicore feedback policies, polytope membership, and the brute-force
membership oracle that checks optimality preservation directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm
from typing import Sequence

import numpy as np

from .coalitional import NEG_INF, CoalitionalGame, FeedbackVector
from .lp import LinearProgram, leximin_max
from .model import AgentStatus, AuctionInstance, Bids
from .solver import enumerate_allocations

ORACLE_MAX_AGENTS = 6


@dataclass(frozen=True)
class BicoreConstraint:
    """``sum(pi[S]) + sum(mu[T]) <= rhs`` over agent-index sets."""

    discount_set: frozenset[int]
    raise_set: frozenset[int]
    rhs: int


def _submasks(mask: int):
    """All submasks of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _bits(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def bicore_constraints(game: CoalitionalGame) -> list[BicoreConstraint]:
    """Non-trivial bicore inequalities over strict winners (S) and strict losers (T).

    Pairs whose constrained value is ``-inf`` are vacuous and omitted.
    """
    winners = game.strict_mask(AgentStatus.STRICT_WINNER)
    losers = game.strict_mask(AgentStatus.STRICT_LOSER)
    top = game.optimum
    out = []
    for s in _submasks(winners):
        for t in _submasks(losers):
            if s == 0 and t == 0:
                continue
            other = game.v(game.full & ~s, t)
            if other == NEG_INF:
                continue
            out.append(BicoreConstraint(_bits(s), _bits(t), top - other))
    return out


def core_constraints(game: CoalitionalGame, side: str) -> list[BicoreConstraint]:
    """Core inequalities for ``side`` = ``"winners"`` (discounts) or ``"losers"`` (raises)."""
    top = game.optimum
    out = []
    if side == "winners":
        for s in _submasks(game.strict_mask(AgentStatus.STRICT_WINNER)):
            if s:
                out.append(BicoreConstraint(_bits(s), frozenset(), top - game.v_w(game.full & ~s)))
    elif side == "losers":
        for t in _submasks(game.strict_mask(AgentStatus.STRICT_LOSER)):
            if t:
                other = game.v(game.full, t)
                if other != NEG_INF:
                    out.append(BicoreConstraint(frozenset(), _bits(t), top - other))
    else:
        raise ValueError(f"unknown side {side!r}")
    return out


def _program(constraints: Sequence[BicoreConstraint], discount_vars, raise_vars) -> LinearProgram:
    names = [f"pi{i}" for i in discount_vars] + [f"mu{i}" for i in raise_vars]
    rows = []
    for c in constraints:
        row = {f"pi{i}": 1 for i in c.discount_set}
        row.update({f"mu{i}": 1 for i in c.raise_set})
        rows.append((row, c.rhs))
    return LinearProgram.build(names, {}, rows)


def _solve(game: CoalitionalGame, constraints, discount_vars, raise_vars, priority) -> FeedbackVector:
    discounts = [Fraction(0)] * game.n
    raises = [Fraction(0)] * game.n
    if discount_vars or raise_vars:
        lp = _program(constraints, discount_vars, raise_vars)
        pis = [f"pi{i}" for i in discount_vars]
        mus = [f"mu{i}" for i in raise_vars]
        groups = {"raises": [mus, pis], "discounts": [pis, mus], "joint": None}[priority]
        point = leximin_max(lp, groups)
        for i in discount_vars:
            discounts[i] = point[f"pi{i}"]
        for i in raise_vars:
            raises[i] = point[f"mu{i}"]
    return FeedbackVector.build(game, discounts, raises)


def _members(game: CoalitionalGame, status: AgentStatus) -> list[int]:
    return [i for i, s in enumerate(game.statuses) if s is status]


def core_feedback(
    instance: AuctionInstance,
    bids: Bids | None = None,
    side: str = "both",
    game: CoalitionalGame | None = None,
) -> FeedbackVector:
    """Leximin-maximal core discounts (winners) and/or core raises (losers).

    The two cores are independent polytopes, so ``side="both"`` solves each
    separately and merges the vectors.
    """
    game = game or CoalitionalGame(instance, bids)
    if side == "both":
        w = core_feedback(instance, bids, "winners", game)
        lo = core_feedback(instance, bids, "losers", game)
        return FeedbackVector.build(game, w.discounts, lo.raises)
    if side == "winners":
        return _solve(game, core_constraints(game, side), _members(game, AgentStatus.STRICT_WINNER), [], "joint")
    if side == "losers":
        return _solve(game, core_constraints(game, side), [], _members(game, AgentStatus.STRICT_LOSER), "joint")
    raise ValueError(f"unknown side {side!r}")


def bicore_feedback(
    instance: AuctionInstance,
    bids: Bids | None = None,
    game: CoalitionalGame | None = None,
    priority: str = "raises",
) -> FeedbackVector:
    """Sum-maximal bicore point, refined by leximin.

    ``priority="raises"`` (default) leximin-maximises the raises first and then
    the discounts; ``"discounts"`` reverses the order; ``"joint"`` takes the
    plain leximin point over all components together.
    """
    game = game or CoalitionalGame(instance, bids)
    return _solve(game, bicore_constraints(game),
                  _members(game, AgentStatus.STRICT_WINNER),
                  _members(game, AgentStatus.STRICT_LOSER), priority)


# --- membership ----------------------------------------------------------------

def in_bicore(game: CoalitionalGame, discounts, raises) -> bool:
    """Exact membership of ``(discounts, raises)`` in the bicore polytope."""
    discounts = [Fraction(x) for x in discounts]
    raises = [Fraction(x) for x in raises]
    if any(x < 0 for x in discounts + raises):
        return False
    for i, s in enumerate(game.statuses):
        if discounts[i] and s is not AgentStatus.STRICT_WINNER:
            return False
        if raises[i] and s is not AgentStatus.STRICT_LOSER:
            return False
    return all(
        sum(discounts[i] for i in c.discount_set) + sum(raises[i] for i in c.raise_set) <= c.rhs
        for c in bicore_constraints(game)
    )


def in_core(game: CoalitionalGame, vector, side: str) -> bool:
    """Membership in the winners' (or losers') core, checking every coalition of N."""
    vector = [Fraction(x) for x in vector]
    if any(x < 0 for x in vector):
        return False
    top = game.optimum
    for r in range(1, game.n + 1):
        for combo in combinations(range(game.n), r):
            s = sum(1 << i for i in combo)
            rest = game.v_w(game.full & ~s) if side == "winners" else game.v(game.full, s)
            if rest == NEG_INF:
                continue
            if sum(vector[i] for i in combo) > top - rest:
                return False
    return True


# --- brute force oracle -----------------------------------------------------------

@lru_cache(maxsize=1024)
def _allocation_matrices(instance: AuctionInstance, bids: Bids):
    """Per feasible allocation: each agent's bid there, and whether it wins there."""
    allocs = enumerate_allocations(instance)
    values = instance.values
    n = instance.n
    bid = [[0] * n for _ in allocs]
    win = [[False] * n for _ in allocs]
    for r, combo in enumerate(allocs):
        for pos, i in enumerate(combo):
            if i >= 0:
                bid[r][i] = bids[i][pos]
                win[r][i] = values[i][pos] > 0
    return bid, win


def is_valid(instance: AuctionInstance, bids: Bids | None, discounts, raises) -> bool:
    """Winners only discount (never past their bid in any optimum); losers only raise."""
    bids = instance.bids if bids is None else bids
    bid, win = _allocation_matrices(instance, bids)
    totals = [sum(row) for row in bid]
    top = max(totals)
    optimal = [r for r, t in enumerate(totals) if t == top]
    for i in range(instance.n):
        pi, mu = Fraction(discounts[i]), Fraction(raises[i])
        if pi < 0 or mu < 0:
            return False
        if any(win[r][i] for r in optimal):
            if mu != 0 or pi > min(bid[r][i] for r in optimal):
                return False
        if any(not win[r][i] for r in optimal) and pi != 0:
            return False
    return True


def bicore_membership_oracle(instance: AuctionInstance, bids: Bids | None, discounts, raises) -> bool:
    """Do the updates keep every optimal allocation optimal, for every coalition pair?

    Checks validity, then for each ``S`` of discounting agents and ``T`` of
    raising agents applies the updates (raises at every positive-value
    position) and re-optimises over all feasible allocations by enumeration.
    """
    if instance.n > ORACLE_MAX_AGENTS:
        raise ValueError("instance too large for the membership oracle")
    bids = instance.bids if bids is None else bids
    if not is_valid(instance, bids, discounts, raises):
        return False
    discounts = [Fraction(x) for x in discounts]
    raises = [Fraction(x) for x in raises]
    scale = lcm(*(x.denominator for x in discounts + raises))
    bid, win = _allocation_matrices(instance, bids)
    big = max(max(max(r) for r in bid), 1) * scale + max(raises) * scale
    dtype = np.int64 if big * (instance.n + 1) < 2 ** 62 else object
    g = np.array(bid, dtype=dtype) * scale
    w = np.array(win, dtype=bool)
    pis = [int(x * scale) for x in discounts]
    mus = [int(x * scale) for x in raises]
    totals = g.sum(axis=1)
    optimal = totals == totals.max()
    dis_mask = sum(1 << i for i, x in enumerate(pis) if x)
    rai_mask = sum(1 << i for i, x in enumerate(mus) if x)
    for s in _submasks(dis_mask):
        for t in _submasks(rai_mask):
            upd = g.copy()
            for i in _bits(s):
                col = upd[:, i] - pis[i]
                upd[:, i] = np.where(col > 0, col, 0)
            for i in _bits(t):
                upd[:, i] = upd[:, i] + mus[i] * w[:, i]
            new = upd.sum(axis=1)
            if (new[optimal] != new.max()).any():
                return False
    return True
