"""Domain types for video pod auctions, validation and JSON (de)serialization.

All monetary amounts are integers in micro-currency units (1e-6 of a unit).
Bids and values are stored per position; a uniform value is a constant vector.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

MICRO = 1_000_000

# A bid profile: one per-position bid vector per agent, in agent order.
Bids = tuple[tuple[int, ...], ...]


class InstanceError(ValueError):
    """Raised for malformed or invalid auction instances.

    ``path`` locates the offending field, e.g. ``agents[2].duration_s``.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


class AgentStatus(enum.Enum):
    STRICT_WINNER = "strict_winner"
    STRICT_LOSER = "strict_loser"
    TIED = "tied"

    @property
    def is_winning(self) -> bool:
        return self is not AgentStatus.STRICT_LOSER

    @property
    def is_losing(self) -> bool:
        return self is not AgentStatus.STRICT_WINNER


@dataclass(frozen=True)
class PodSpec:
    num_positions: int
    max_ads: int
    max_duration: int
    exclusions: frozenset[frozenset[str]] = frozenset()


@dataclass(frozen=True)
class AgentProfile:
    agent_id: str
    duration: int
    value: tuple[int, ...]
    bid: tuple[int, ...]

    @property
    def max_value(self) -> int:
        return max(self.value)

    @property
    def is_uniform(self) -> bool:
        return len(set(self.value)) == 1 and len(set(self.bid)) == 1


@dataclass(frozen=True)
class AuctionInstance:
    pod: PodSpec
    agents: tuple[AgentProfile, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {a.agent_id: k for k, a in enumerate(self.agents)})
        validate_instance(self)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.agent_id for a in self.agents)

    def index_of(self, agent_id: str) -> int:
        try:
            return self._index[agent_id]
        except KeyError:
            raise InstanceError("", f"unknown agent {agent_id!r}") from None

    @property
    def bids(self) -> Bids:
        return tuple(a.bid for a in self.agents)

    @property
    def values(self) -> Bids:
        return tuple(a.value for a in self.agents)

    def with_bids(self, bids: Bids) -> AuctionInstance:
        agents = tuple(
            AgentProfile(a.agent_id, a.duration, a.value, tuple(b))
            for a, b in zip(self.agents, bids)
        )
        return AuctionInstance(self.pod, agents)

    @property
    def exclusion_masks(self) -> tuple[int, ...]:
        """Per agent, a bitmask of the agents it may not share a pod with."""
        masks = [0] * self.n
        for pair in self.pod.exclusions:
            a, b = (self.index_of(x) for x in pair)
            masks[a] |= 1 << b
            masks[b] |= 1 << a
        return tuple(masks)


@dataclass(frozen=True)
class Allocation:
    """Partial injective map from position index to agent id."""

    placements: Mapping[int, str]

    def __hash__(self):
        return hash(frozenset(self.placements.items()))

    def __eq__(self, other):
        return isinstance(other, Allocation) and dict(self.placements) == dict(other.placements)

    @classmethod
    def of(cls, placements: Mapping[int, str] | None = None) -> Allocation:
        return cls(dict(placements or {}))

    @property
    def agents(self) -> frozenset[str]:
        return frozenset(self.placements.values())


def validate_instance(instance: AuctionInstance) -> None:
    pod = instance.pod
    if pod.num_positions < 1:
        raise InstanceError("pod.positions", "must be a positive integer")
    if not 1 <= pod.max_ads <= pod.num_positions:
        raise InstanceError("pod.max_ads", "must be in [1, positions]")
    if pod.max_duration < 1:
        raise InstanceError("pod.max_duration_s", "must be a positive integer")
    if not instance.agents:
        raise InstanceError("agents", "at least one agent is required")
    seen = set()
    for k, a in enumerate(instance.agents):
        path = f"agents[{k}]"
        if a.agent_id in seen:
            raise InstanceError(f"{path}.id", f"duplicate agent id {a.agent_id!r}")
        seen.add(a.agent_id)
        if a.duration < 1:
            raise InstanceError(f"{path}.duration_s", "nonpositive duration")
        for name, vec in (("value_micro", a.value), ("bid_micro", a.bid)):
            if len(vec) != pod.num_positions:
                raise InstanceError(f"{path}.{name}", f"expected {pod.num_positions} entries")
            if any(x < 0 for x in vec):
                raise InstanceError(f"{path}.{name}", "negative amount")
        if max(a.value) <= 0:
            raise InstanceError(f"{path}.value_micro", "value support is empty")
        for j, (b, v) in enumerate(zip(a.bid, a.value)):
            if b > v:
                raise InstanceError(f"{path}.bid_micro[{j}]", "bid exceeds value")
        # An ad longer than the pod can never win anywhere: empty support.
        if a.duration > pod.max_duration:
            raise InstanceError(f"{path}.duration_s", "exceeds pod max duration (agent can never win)")
    for pair in pod.exclusions:
        if len(pair) != 2:
            raise InstanceError("pod.exclusions", "exclusion pairs must reference two distinct agents")
        for x in pair:
            if x not in seen:
                raise InstanceError("pod.exclusions", f"unknown agent {x!r}")


def is_feasible(instance: AuctionInstance, alloc: Allocation) -> bool:
    """True iff ``alloc`` satisfies the pod's count, duration and exclusion limits."""
    pod = instance.pod
    placed = []
    for pos, agent_id in alloc.placements.items():
        if not (isinstance(pos, int) and 0 <= pos < pod.num_positions):
            raise InstanceError("", f"unknown position {pos!r}")
        placed.append(instance.index_of(agent_id))
    if len(set(placed)) != len(placed):
        return False
    if len(placed) > pod.max_ads:
        return False
    if sum(instance.agents[i].duration for i in placed) > pod.max_duration:
        return False
    ids = set(alloc.placements.values())
    return not any(pair <= ids for pair in pod.exclusions)


def allocation_value(instance: AuctionInstance, bids: Bids | None, alloc: Allocation) -> int:
    """Sum over placements of the placed agent's bid for its position."""
    if not is_feasible(instance, alloc):
        raise InstanceError("", "infeasible allocation")
    bids = instance.bids if bids is None else bids
    return sum(bids[instance.index_of(a)][pos] for pos, a in alloc.placements.items())


# --- JSON -----------------------------------------------------------------

def _expect_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(path, "expected an integer")
    return value


def _amounts(raw: Any, positions: int, path: str) -> tuple[int, ...]:
    if isinstance(raw, list):
        return tuple(_expect_int(x, f"{path}[{j}]") for j, x in enumerate(raw))
    return (_expect_int(raw, path),) * positions


def instance_from_dict(doc: Any) -> AuctionInstance:
    if not isinstance(doc, dict):
        raise InstanceError("", "expected a JSON object")
    for key in ("pod", "agents"):
        if key not in doc:
            raise InstanceError(key, "missing field")
    rawpod = doc["pod"]
    if not isinstance(rawpod, dict):
        raise InstanceError("pod", "expected an object")
    for key in ("positions", "max_duration_s"):
        if key not in rawpod:
            raise InstanceError(f"pod.{key}", "missing field")
    positions = _expect_int(rawpod["positions"], "pod.positions")
    max_ads = _expect_int(rawpod.get("max_ads", positions), "pod.max_ads")
    max_dur = _expect_int(rawpod["max_duration_s"], "pod.max_duration_s")
    rawex = rawpod.get("exclusions", [])
    if not isinstance(rawex, list):
        raise InstanceError("pod.exclusions", "expected a list")
    exclusions = set()
    for k, pair in enumerate(rawex):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, str) for x in pair)):
            raise InstanceError(f"pod.exclusions[{k}]", "expected a pair of agent ids")
        if pair[0] == pair[1]:
            raise InstanceError(f"pod.exclusions[{k}]", "pair must reference distinct agents")
        exclusions.add(frozenset(pair))
    rawagents = doc["agents"]
    if not isinstance(rawagents, list):
        raise InstanceError("agents", "expected a list")
    agents = []
    for k, ra in enumerate(rawagents):
        path = f"agents[{k}]"
        if not isinstance(ra, dict):
            raise InstanceError(path, "expected an object")
        for key in ("id", "duration_s", "value_micro"):
            if key not in ra:
                raise InstanceError(f"{path}.{key}", "missing field")
        if not isinstance(ra["id"], str):
            raise InstanceError(f"{path}.id", "expected a string")
        value = _amounts(ra["value_micro"], positions, f"{path}.value_micro")
        bid = _amounts(ra.get("bid_micro", ra["value_micro"]), positions, f"{path}.bid_micro")
        agents.append(AgentProfile(ra["id"], _expect_int(ra["duration_s"], f"{path}.duration_s"), value, bid))
    return AuctionInstance(PodSpec(positions, max_ads, max_dur, frozenset(exclusions)), tuple(agents))


def _compact(vec: tuple[int, ...]) -> int | list[int]:
    return vec[0] if len(set(vec)) == 1 else list(vec)


def instance_to_dict(instance: AuctionInstance) -> dict:
    """Canonical document: scalar amounts when uniform, exclusion pairs in agent order."""
    order = {a: k for k, a in enumerate(instance.ids)}
    pairs = sorted(sorted(p, key=order.__getitem__) for p in instance.pod.exclusions)
    pairs.sort(key=lambda p: (order[p[0]], order[p[1]]))
    return {
        "pod": {
            "positions": instance.pod.num_positions,
            "max_ads": instance.pod.max_ads,
            "max_duration_s": instance.pod.max_duration,
            "exclusions": pairs,
        },
        "agents": [
            {
                "id": a.agent_id,
                "duration_s": a.duration,
                "value_micro": _compact(a.value),
                "bid_micro": _compact(a.bid),
            }
            for a in instance.agents
        ],
    }


def parse_instance(text: str) -> AuctionInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("", f"malformed JSON: {exc}") from exc
    return instance_from_dict(doc)


def serialize_instance(instance: AuctionInstance) -> str:
    return json.dumps(instance_to_dict(instance), sort_keys=False, separators=(",", ":"))


def make_instance(
    positions: int,
    max_duration: int,
    agents: Sequence[tuple],
    max_ads: int | None = None,
    exclusions: Sequence[tuple[str, str]] = (),
) -> AuctionInstance:
    """Convenience constructor; ``agents`` holds ``(id, duration, value[, bid])``.

    Scalar values/bids are broadcast across positions. Bids default to values.
    """
    profiles = []
    for spec in agents:
        agent_id, duration, value = spec[:3]
        bid = spec[3] if len(spec) > 3 else value
        vec = lambda x: tuple(x) if isinstance(x, (list, tuple)) else (x,) * positions  # noqa: E731
        profiles.append(AgentProfile(agent_id, duration, vec(value), vec(bid)))
    pod = PodSpec(positions, positions if max_ads is None else max_ads, max_duration,
                  frozenset(frozenset(p) for p in exclusions))
    return AuctionInstance(pod, tuple(profiles))


def zero_vcg_instance(unit: int = MICRO) -> AuctionInstance:
    """Three ads, two positions, 30s: one 30s ad against two 15s ads, all valued 10."""
    return make_instance(2, 30, [("1", 30, 10 * unit), ("2", 15, 10 * unit), ("3", 15, 10 * unit)])
