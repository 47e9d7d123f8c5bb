"""Synthetic pod auction instances for the dynamics experiments.

Instance ``k`` of a stream depends only on ``(seed, k)``, so streams can be
sliced and generated in parallel.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .model import AgentProfile, AuctionInstance, PodSpec


class RejectionBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    min_bidders: int = 3
    max_bidders: int = 5
    # Log-uniform values, in micro-units; amounts are rounded to multiples of 10.
    min_value_micro: int = 1_000_000
    max_value_micro: int = 3_000_000
    durations: tuple[int, ...] = (15, 30)
    positions: tuple[int, ...] = (2, 3)
    max_durations: tuple[int, ...] = (30, 60)
    exclusion_prob: float = 0.0
    require_binding: bool = True
    seed: int = 0
    max_attempts: int = 1000

    def __post_init__(self):
        if not 1 <= self.min_bidders <= self.max_bidders:
            raise ValueError("bidder range must be nonempty")
        if not 0 < self.min_value_micro <= self.max_value_micro:
            raise ValueError("value range must be nonempty and positive")
        for name in ("durations", "positions", "max_durations"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if min(self.max_durations) < max(self.durations):
            raise ValueError("every duration must fit the shortest pod")

    @classmethod
    def from_dict(cls, doc: dict) -> GeneratorParams:
        doc = dict(doc)
        for key in ("durations", "positions", "max_durations"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> GeneratorParams:
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def is_binding(instance: AuctionInstance) -> bool:
    """Whether the pod cannot hold every ad at once."""
    pod = instance.pod
    return (instance.n > min(pod.max_ads, pod.num_positions)
            or sum(a.duration for a in instance.agents) > pod.max_duration)


def _draw(params: GeneratorParams, rng: np.random.Generator, bidders: int | None) -> AuctionInstance:
    n = bidders if bidders is not None else int(rng.integers(params.min_bidders, params.max_bidders + 1))
    positions = int(rng.choice(params.positions))
    max_duration = int(rng.choice(params.max_durations))
    lo, hi = math.log(params.min_value_micro), math.log(params.max_value_micro)
    agents = []
    for k in range(n):
        value = int(round(math.exp(rng.uniform(lo, hi)) / 10)) * 10
        value = min(max(value, params.min_value_micro), params.max_value_micro)
        duration = int(rng.choice(params.durations))
        agents.append(AgentProfile(str(k + 1), duration, (value,) * positions, (value,) * positions))
    exclusions = set()
    if params.exclusion_prob > 0:
        for a in range(n):
            for b in range(a + 1, n):
                if rng.random() < params.exclusion_prob:
                    exclusions.add(frozenset((str(a + 1), str(b + 1))))
    return AuctionInstance(PodSpec(positions, positions, max_duration, frozenset(exclusions)), tuple(agents))


def generate_instance(params: GeneratorParams, index: int, bidders: int | None = None) -> AuctionInstance:
    """Instance ``index`` of the stream; ``bidders`` pins the bidder count.

    With ``require_binding`` the draw is repeated until the pod cannot fit all
    ads; bids equal values.
    """
    rng = np.random.default_rng([params.seed, index] if bidders is None else [params.seed, index, bidders])
    for _ in range(params.max_attempts):
        inst = _draw(params, rng, bidders)
        if not params.require_binding or is_binding(inst):
            return inst
    raise RejectionBudgetExceeded(f"no binding instance after {params.max_attempts} draws (index {index})")
