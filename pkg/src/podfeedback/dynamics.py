"""Profit-target bidding dynamics driven by a feedback policy.

Each agent bids ``max(v_i(x) - rho_i, 0)``. After every auction, strict
winners raise their profit target by the reported discount and strict losers
lower it by the reported raise, each nudged by a bid increment ``epsilon`` so
that ties get broken. Runs stop on convergence, on a detected cycle, or at the
round cap.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .coalitional import CoalitionalGame, FeedbackVector, vcg_feedback
from .feedback import bicore_feedback, core_feedback
from .model import AgentStatus, Allocation, AuctionInstance, Bids
from .solver import solve_masks


class Policy(enum.Enum):
    VCG = "vcg"
    CORE = "core"
    BICORE = "bicore"


class Outcome(enum.Enum):
    CONVERGED = "converged"
    CYCLED = "cycled"
    MAX_ROUNDS = "max_rounds"


def policy_feedback(policy: Policy, game: CoalitionalGame) -> FeedbackVector:
    policy = Policy(policy)
    if policy is Policy.VCG:
        return vcg_feedback(game.instance, game.bids, game)
    if policy is Policy.CORE:
        return core_feedback(game.instance, game.bids, "both", game)
    return bicore_feedback(game.instance, game.bids, game)


@dataclass(frozen=True)
class DynamicsConfig:
    max_rounds: int = 20
    convergence_threshold: Fraction = Fraction(1, 100)
    cycle_change_threshold: Fraction = Fraction(1, 10)
    # Per-agent increment in micro-units; None means a tenth of the agent's value.
    epsilon: Union[int, Sequence[int], None] = None
    simultaneous: bool = True
    # "sum": |sum(b') - sum(b)| / sum(b); "l1": sum(|b'_i - b_i|) / sum(b).
    change_measure: str = "sum"

    def __post_init__(self):
        if self.change_measure not in ("sum", "l1"):
            raise ValueError("change_measure must be 'sum' or 'l1'")
        object.__setattr__(self, "convergence_threshold", Fraction(self.convergence_threshold))
        object.__setattr__(self, "cycle_change_threshold", Fraction(self.cycle_change_threshold))
        for name in ("convergence_threshold", "cycle_change_threshold"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")
        if self.epsilon is not None:
            eps = [self.epsilon] if isinstance(self.epsilon, int) else list(self.epsilon)
            if any(e <= 0 for e in eps):
                raise ValueError("epsilon must be positive")

    def epsilons(self, instance: AuctionInstance) -> tuple[int, ...]:
        if self.epsilon is None:
            return tuple(max(a.max_value // 10, 1) for a in instance.agents)
        if isinstance(self.epsilon, int):
            return (self.epsilon,) * instance.n
        if len(self.epsilon) != instance.n:
            raise ValueError("one epsilon per agent is required")
        return tuple(self.epsilon)


@dataclass(frozen=True)
class RandomTargets:
    """Initial profit targets drawn uniformly from ``[0, v_i]``; ``seed`` may be an int or a tuple of ints."""

    seed: Union[int, tuple[int, ...]]


Initial = Union[str, RandomTargets, Sequence[int]]


def initial_targets(instance: AuctionInstance, initial: Initial) -> tuple[int, ...]:
    if isinstance(initial, RandomTargets):
        rng = np.random.default_rng(initial.seed if isinstance(initial.seed, int) else list(initial.seed))
        return tuple(int(rng.integers(0, a.max_value + 1)) for a in instance.agents)
    if initial == "values":
        return (0,) * instance.n
    if initial == "zeros":
        return tuple(a.max_value for a in instance.agents)
    targets = tuple(int(x) for x in initial)
    if len(targets) != instance.n or any(not 0 <= r <= a.max_value for r, a in zip(targets, instance.agents)):
        raise ValueError("targets must lie in [0, v_i] for every agent")
    return targets


def bids_from_targets(instance: AuctionInstance, targets: Sequence[int]) -> Bids:
    return tuple(tuple(max(v - r, 0) for v in a.value) for a, r in zip(instance.agents, targets))


def total_bid(bids: Bids) -> int:
    return sum(max(b) for b in bids)


def update_target(rho: int, status: AgentStatus, discount: Fraction, raise_: Fraction,
                  eps: int, vmax: int) -> int:
    if status is AgentStatus.STRICT_LOSER:
        new = rho - floor(raise_) - eps
    else:
        # Ties receive zero feedback and move by epsilon, like winners.
        new = rho + floor(discount) - eps
    return min(max(new, 0), vmax)


def step(instance: AuctionInstance, targets: Sequence[int], policy: Policy,
         epsilon: Sequence[int], game: CoalitionalGame | None = None) -> tuple[int, ...]:
    """One simultaneous update of every agent's profit target."""
    if game is None:
        game = CoalitionalGame(instance, bids_from_targets(instance, targets))
    fb = policy_feedback(policy, game)
    return tuple(
        update_target(rho, s, fb.discounts[i], fb.raises[i], epsilon[i], instance.agents[i].max_value)
        for i, (rho, s) in enumerate(zip(targets, game.statuses))
    )


@dataclass(frozen=True)
class Round:
    bids: Bids
    statuses: tuple[AgentStatus, ...]
    feedback: Optional[FeedbackVector]
    total: int


@dataclass(frozen=True)
class DynamicsTrace:
    instance: AuctionInstance
    policy: Policy
    rounds: tuple[Round, ...]
    outcome: Outcome
    cycle_round: Optional[int] = None
    final_allocation: Allocation = field(default=None)
    efficiency: Fraction = field(default=None)

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)

    def to_dict(self) -> dict:
        ids = self.instance.ids

        def amounts(vec):
            return vec[0] if len(set(vec)) == 1 else list(vec)

        return {
            "version": 1,
            "policy": self.policy.value,
            "outcome": self.outcome.value,
            "cycle_round": self.cycle_round,
            "num_rounds": self.num_rounds,
            "efficiency_pct": float(self.efficiency),
            "final_allocation": {str(p): a for p, a in sorted(self.final_allocation.placements.items())},
            "rounds": [
                {
                    "round": k + 1,
                    "bids_micro": {a: amounts(b) for a, b in zip(ids, r.bids)},
                    "statuses": {a: s.value for a, s in zip(ids, r.statuses)},
                    "total_micro": r.total,
                    "feedback": None if r.feedback is None else r.feedback.to_dict(ids),
                }
                for k, r in enumerate(self.rounds)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_rows(self) -> list[tuple]:
        """``(round, agent, bid_micro, status)`` rows for plotting bid trajectories."""
        rows = []
        for k, r in enumerate(self.rounds):
            for a, b, s in zip(self.instance.ids, r.bids, r.statuses):
                rows.append((k + 1, a, max(b), s.value))
        return rows


def _relative_change(new: Bids, old: Bids, measure: str = "sum") -> Fraction:
    """Relative change between two rounds' bid profiles (bids taken at their maximum)."""
    base = total_bid(old)
    if measure == "sum":
        moved = abs(total_bid(new) - base)
    else:
        moved = sum(abs(max(a) - max(b)) for a, b in zip(new, old))
    if base == 0:
        return Fraction(0) if moved == 0 else Fraction(10**9)
    return Fraction(moved, base)


def run(
    instance: AuctionInstance,
    policy: Policy,
    config: DynamicsConfig | None = None,
    initial: Initial = "values",
    on_round: Callable[[int, Round], None] | None = None,
) -> DynamicsTrace:
    """Iterate the dynamics until convergence, a cycle, or ``max_rounds``.

    Round 1 holds the initial bids. Round ``k > 1`` has converged when its
    total bid differs from round ``k - 1`` by less than the convergence
    threshold; it has cycled when its bid vector repeats a round other than
    ``k - 1`` and the total moved by at least the cycle threshold.
    """
    policy = Policy(policy)
    config = config or DynamicsConfig()
    eps = config.epsilons(instance)
    targets = initial_targets(instance, initial)
    rounds: list[Round] = []
    seen: dict[Bids, int] = {}
    outcome = Outcome.MAX_ROUNDS
    cycle_round = None
    for k in range(1, config.max_rounds + 1):
        bids = bids_from_targets(instance, targets)
        game = CoalitionalGame(instance, bids)
        total = total_bid(bids)
        stop = None
        if rounds:
            change = _relative_change(bids, rounds[-1].bids, config.change_measure)
            if change < config.convergence_threshold:
                stop = Outcome.CONVERGED
            elif bids in seen and seen[bids] != k - 1 and change >= config.cycle_change_threshold:
                stop = Outcome.CYCLED
                cycle_round = seen[bids]
        last = stop is not None or k == config.max_rounds
        fb = None if last else policy_feedback(policy, game)
        rnd = Round(bids, game.statuses, fb, total)
        rounds.append(rnd)
        if on_round:
            on_round(k, rnd)
        if last:
            if stop is not None:
                outcome = stop
            break
        seen.setdefault(bids, k)
        if config.simultaneous:
            targets = step(instance, targets, policy, eps, game)
        else:
            targets = list(targets)
            for i in range(instance.n):
                sub = CoalitionalGame(instance, bids_from_targets(instance, targets))
                targets[i] = step(instance, targets, policy, eps, sub)[i]
            targets = tuple(targets)
    final = solve_masks(instance, rounds[-1].bids, 0, 0).witness
    trace = DynamicsTrace(instance, policy, tuple(rounds), outcome, cycle_round, final)
    return DynamicsTrace(instance, policy, trace.rounds, outcome, cycle_round, final,
                         efficiency_of(trace, instance))


def efficiency_of(trace: DynamicsTrace, instance: AuctionInstance) -> Fraction:
    """Percentage of the efficient value realised by the final round's optimal allocation."""
    alloc = trace.final_allocation
    if alloc is None:
        alloc = solve_masks(instance, trace.rounds[-1].bids, 0, 0).witness
    values = instance.values
    realised = sum(values[instance.index_of(a)][pos] for pos, a in alloc.placements.items())
    best = solve_masks(instance, values, 0, 0).value
    return Fraction(100 * realised, best)
