"""Randomised cross-checks between independent routes to the same answer.

Each check returns a list of human-readable violations (empty when all agree).
The ``verify`` CLI verb and the test-suite both drive these.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .assignment import (AssignmentInstance, pod_equivalent, submodularity_violations,
                         verify_lattice_and_extremes)
from .coalitional import CoalitionalGame, vcg_feedback
from .feedback import (bicore_constraints, bicore_feedback, bicore_membership_oracle, core_feedback,
                       in_bicore, in_core, is_valid)
from .model import AgentProfile, AgentStatus, AuctionInstance, PodSpec
from .solver import SolveConstraints, brute_force_solve, solve_constrained


def random_pod_instance(
    rng: np.random.Generator,
    max_agents: int = 5,
    max_positions: int = 3,
    per_position: bool = True,
    exclusion_prob: float = 0.15,
    top: int = 12,
) -> AuctionInstance:
    """Small pod instance with ties likely: integer values in ``[0, top]``, bids at or below values."""
    n = int(rng.integers(1, max_agents + 1))
    m = int(rng.integers(1, max_positions + 1))
    durations = [int(rng.integers(1, 4)) for _ in range(n)]
    max_duration = int(rng.integers(max(durations), sum(durations) + 1))
    agents = []
    for k in range(n):
        if per_position and rng.random() < 0.5:
            value = [int(x) for x in rng.integers(0, top + 1, size=m)]
            if not any(value):
                value[int(rng.integers(0, m))] = int(rng.integers(1, top + 1))
        else:
            value = [int(rng.integers(1, top + 1))] * m
        if rng.random() < 0.5:
            bid = list(value)
        elif len(set(value)) == 1:
            bid = [int(rng.integers(0, value[0] + 1))] * m
        else:
            bid = [int(rng.integers(0, v + 1)) for v in value]
        agents.append(AgentProfile(str(k + 1), durations[k], tuple(value), tuple(bid)))
    exclusions = set()
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < exclusion_prob:
                exclusions.add(frozenset((str(a + 1), str(b + 1))))
    max_ads = int(rng.integers(1, m + 1))
    return AuctionInstance(PodSpec(m, max_ads, max_duration, frozenset(exclusions)), tuple(agents))


def _strict(game: CoalitionalGame, status: AgentStatus) -> list[int]:
    return [i for i, s in enumerate(game.statuses) if s is status]


def bicore_oracle_agreement(instance: AuctionInstance, rng: np.random.Generator,
                            scaled: int = 5, outside: int = 5) -> tuple[list[str], int]:
    """LP membership against the enumeration oracle at the leximin point, below it, and just past a facet.

    Returns the violations and the number of points compared.
    """
    game = CoalitionalGame(instance)
    fb = bicore_feedback(instance, None, game)
    base_pi, base_mu = list(fb.discounts), list(fb.raises)
    points = [(base_pi, base_mu, True)]
    for _ in range(scaled):
        f = [Fraction(int(x), 100) for x in rng.integers(0, 100, size=2 * game.n)]
        points.append(([a * b for a, b in zip(base_pi, f)], [a * b for a, b in zip(base_mu, f[game.n:])], True))
    binding = [c for c in bicore_constraints(game)
               if sum(base_pi[i] for i in c.discount_set) + sum(base_mu[i] for i in c.raise_set) == c.rhs]
    for _ in range(outside if binding else 0):
        c = binding[int(rng.integers(0, len(binding)))]
        members = [("pi", i) for i in sorted(c.discount_set)] + [("mu", i) for i in sorted(c.raise_set)]
        kind, i = members[int(rng.integers(0, len(members)))]
        pi, mu = list(base_pi), list(base_mu)
        step = Fraction(int(rng.integers(1, 10)), 1000)
        (pi if kind == "pi" else mu)[i] += step
        points.append((pi, mu, False))
    bad = []
    for pi, mu, expected in points:
        lp = in_bicore(game, pi, mu)
        oracle = bicore_membership_oracle(instance, None, pi, mu)
        if not lp == oracle == expected:
            bad.append(f"membership lp={lp} oracle={oracle} expected={expected} at pi={pi} mu={mu}")
    return bad, len(points)


def relationship_checks(instance: AuctionInstance, rng: np.random.Generator) -> list[str]:
    """Bicore/core relationships, single-agent sets, and validity of every policy output."""
    game = CoalitionalGame(instance)
    n = game.n
    zero = [Fraction(0)] * n
    bad = []
    vcg = vcg_feedback(instance, None, game)
    core = core_feedback(instance, None, "both", game)
    bic = bicore_feedback(instance, None, game)
    for name, fb in (("vcg", vcg), ("core", core), ("bicore", bic)):
        if not is_valid(instance, None, fb.discounts, fb.raises):
            bad.append(f"{name} feedback is not valid: {fb}")
    # Candidate vectors around the core points: the points themselves, scaled, and pushed up.
    cands_w = [list(core.discounts), list(vcg.discounts)]
    cands_l = [list(core.raises), list(vcg.raises)]
    for _ in range(3):
        f = [Fraction(int(x), 4) for x in rng.integers(0, 6, size=n)]
        cands_w.append([a * b for a, b in zip(core.discounts, f)])
        cands_l.append([a * b for a, b in zip(core.raises, f)])
    for pi in cands_w:
        if in_bicore(game, pi, zero) != in_core(game, pi, "winners"):
            bad.append(f"(pi, 0) bicore/core mismatch at {pi}")
    for mu in cands_l:
        if in_bicore(game, zero, mu) != in_core(game, mu, "losers"):
            bad.append(f"(0, mu) bicore/core mismatch at {mu}")
    for i in range(n):
        for d in (game.vcg_discount(i), game.vcg_discount(i) + 1, Fraction(game.vcg_discount(i), 2)):
            pi = list(zero)
            pi[i] = Fraction(d)
            member = in_core(game, pi, "winners")
            if member != bicore_membership_oracle(instance, None, pi, zero):
                bad.append(f"single discount {d} for agent {i}: core and oracle disagree")
            if member != (d <= game.vcg_discount(i)):
                bad.append(f"single discount {d} for agent {i}: core membership is not the VCG bound")
        for r in (game.vcg_raise(i), game.vcg_raise(i) + 1, Fraction(game.vcg_raise(i), 2)):
            mu = list(zero)
            mu[i] = Fraction(r)
            member = in_core(game, mu, "losers")
            if member != bicore_membership_oracle(instance, None, zero, mu):
                bad.append(f"single raise {r} for agent {i}: core and oracle disagree")
            if member != (r <= game.vcg_raise(i)):
                bad.append(f"single raise {r} for agent {i}: core membership is not the VCG bound")
    return bad


def solver_agreement(instance: AuctionInstance, rng: np.random.Generator, pairs: int = 50) -> list[str]:
    """Pruned solver against brute force under random forced/excluded sets."""
    bad = []
    ids = instance.ids
    for _ in range(pairs):
        roles = rng.integers(0, 3, size=len(ids))
        cons = SolveConstraints(frozenset(a for a, r in zip(ids, roles) if r == 1),
                                frozenset(a for a, r in zip(ids, roles) if r == 2))
        fast = solve_constrained(instance, None, cons).value
        slow = brute_force_solve(instance, None, cons).value
        if fast != slow:
            bad.append(f"solver {fast} vs brute force {slow} under {cons}")
    return bad


def assignment_checks(inst: AssignmentInstance, rng: np.random.Generator, samples: int = 10) -> list[str]:
    report = verify_lattice_and_extremes(inst, samples, rng)
    bad = [f"{what}: {witness}" for what, witness in report.violations]
    for side, viol in submodularity_violations(CoalitionalGame(pod_equivalent(inst))).items():
        bad.extend(f"{side} value function not submodular at {v}" for v in viol)
    return bad


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def run_suites(count: int, seed: int) -> list[SuiteResult]:
    """Run every cross-check on ``count`` random instances each."""
    out = []
    for name in ("bicore-oracle", "relationships", "solver", "assignment"):
        res = SuiteResult(name)
        rng = np.random.default_rng([seed, len(out)])
        for _ in range(count):
            if name == "assignment":
                n = int(rng.integers(1, 6))
                bad = assignment_checks(AssignmentInstance.random(rng, n, int(rng.integers(1, n + 1))), rng)
            elif name == "solver":
                bad = solver_agreement(random_pod_instance(rng, max_agents=6), rng)
            elif name == "relationships":
                bad = relationship_checks(random_pod_instance(rng), rng)
            else:
                bad = bicore_oracle_agreement(random_pod_instance(rng), rng)[0]
            res.instances += 1
            res.violations.extend(bad)
        out.append(res)
    return out
