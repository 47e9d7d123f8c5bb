"""Coalitional value functions over a fixed bid profile, and VCG feedback.

``V(S, T)`` is the best bid total collectively attainable by ``S | T`` with
every member of ``T`` forced to win; an infeasible maximisation is ``-inf``.
The winners' function is ``V_w(S) = V(S, {})`` and the losers' function is
``V_l(S) = V(N, N - S)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .model import AgentStatus, AuctionInstance, Bids
from .solver import classify_masks, solve_masks

NEG_INF = float("-inf")

# Either an exact integer amount or NEG_INF.
CoalitionalValue = Union[int, float]


def mask_of(instance: AuctionInstance, agents: Iterable) -> int:
    """Bitmask for a collection of agent ids or indices."""
    mask = 0
    for a in agents:
        mask |= 1 << (a if isinstance(a, int) else instance.index_of(a))
    return mask


class CoalitionalGame:
    """Memoised bicooperative value function for one (instance, bids) pair.

    The memo is a plain dict keyed by ``(excluded, forced)`` masks; inserts are
    idempotent, so concurrent readers at worst recompute an entry.
    """

    def __init__(self, instance: AuctionInstance, bids: Bids | None = None):
        self.instance = instance
        self.bids = instance.bids if bids is None else tuple(tuple(b) for b in bids)
        self.n = instance.n
        self.full = (1 << self.n) - 1
        self._memo: dict[tuple[int, int], CoalitionalValue] = {}
        self._statuses = None

    def solve(self, excluded: int, forced: int) -> CoalitionalValue:
        key = (excluded, forced)
        if key not in self._memo:
            value = solve_masks(self.instance, self.bids, forced, excluded).value
            self._memo[key] = NEG_INF if value is None else value
        return self._memo[key]

    def v(self, s: int, t: int) -> CoalitionalValue:
        """V(S, T) on bitmasks; V(S, T) == V(S - T, T)."""
        return self.solve(self.full & ~(s | t), t)

    def v_w(self, s: int) -> CoalitionalValue:
        return self.v(s, 0)

    def v_l(self, s: int) -> CoalitionalValue:
        return self.v(self.full, self.full & ~s)

    @property
    def optimum(self) -> int:
        return self.v(self.full, 0)

    @property
    def statuses(self) -> tuple[AgentStatus, ...]:
        if self._statuses is None:
            self._statuses = classify_masks(self.instance, self.bids)
        return self._statuses

    def vcg_discount(self, i: int) -> int:
        return self.v_w(self.full) - self.v_w(self.full & ~(1 << i))

    def vcg_raise(self, i: int) -> int:
        # Finite because every agent can win somewhere (validated in the model).
        return self.v_l(self.full) - self.v_l(self.full & ~(1 << i))

    def strict_mask(self, status: AgentStatus) -> int:
        return mask_of(self.instance, [i for i, s in enumerate(self.statuses) if s is status])


def value_bi(instance: AuctionInstance, bids: Bids | None, s: Iterable, t: Iterable) -> CoalitionalValue:
    game = CoalitionalGame(instance, bids)
    return game.v(mask_of(instance, s), mask_of(instance, t))


@dataclass(frozen=True)
class FeedbackVector:
    """Per-agent discounts and raises (agent order), plus the implied seller payoff."""

    discounts: tuple[Fraction, ...]
    raises: tuple[Fraction, ...]
    seller_payoff: Fraction

    @classmethod
    def build(cls, game: CoalitionalGame, discounts, raises) -> FeedbackVector:
        discounts = tuple(Fraction(x) for x in discounts)
        raises = tuple(Fraction(x) for x in raises)
        return cls(discounts, raises, Fraction(game.optimum) - sum(discounts))

    def to_dict(self, ids: Iterable[str]) -> dict:
        ids = list(ids)
        return {
            "discounts": {a: _num(x) for a, x in zip(ids, self.discounts)},
            "raises": {a: _num(x) for a, x in zip(ids, self.raises)},
            "seller_payoff": _num(self.seller_payoff),
        }


def _num(x: Fraction) -> int | str:
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vcg_feedback(instance: AuctionInstance, bids: Bids | None = None, game: CoalitionalGame | None = None) -> FeedbackVector:
    """VCG discounts for strict winners, VCG raises for strict losers, zero for ties."""
    game = game or CoalitionalGame(instance, bids)
    discounts, raises = [], []
    for i, status in enumerate(game.statuses):
        discounts.append(game.vcg_discount(i) if status is AgentStatus.STRICT_WINNER else 0)
        raises.append(game.vcg_raise(i) if status is AgentStatus.STRICT_LOSER else 0)
    return FeedbackVector.build(game, discounts, raises)
