"""
Three ads, two slots
====================

One 30s ad competes with two 15s ads for a 30s pod. Every ad is worth 10.
The two short ads win. This script prints the feedback each policy sends and
then follows the bids round by round.
"""

from podfeedback import (CoalitionalGame, DynamicsConfig, Policy, bicore_feedback, core_feedback, run,
                         vcg_feedback, zero_vcg_instance)
from podfeedback.cli import format_money

inst = zero_vcg_instance()
game = CoalitionalGame(inst)
print("statuses:", {a: s.value for a, s in zip(inst.ids, game.statuses)})
print("optimal value:", format_money(game.optimum))

# %%
# Feedback. VCG tells each short ad it could bid 0 and still win, and tells
# the long ad to raise by 10. Acting on both at once swaps the winners.
for name, fb in (("vcg", vcg_feedback(inst, None, game)),
                 ("core", core_feedback(inst, None, "both", game)),
                 ("bicore", bicore_feedback(inst, None, game)),
                 ("bicore/joint", bicore_feedback(inst, None, game, priority="joint"))):
    print(f"{name:>13}: discounts", [format_money(x) for x in fb.discounts],
          "raises", [format_money(x) for x in fb.raises])

# %%
# Dynamics with a one-micro-unit increment, starting from truthful bids.
for policy in Policy:
    trace = run(inst, policy, DynamicsConfig(epsilon=1))
    print(f"\n{policy.value}: {trace.outcome.value} after {trace.num_rounds} rounds, "
          f"efficiency {float(trace.efficiency):.0f}%")
    for k, r in enumerate(trace.rounds, 1):
        print(f"  round {k}:", "  ".join(format_money(max(b)) for b in r.bids))
