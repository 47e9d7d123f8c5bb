"""
Dual prices of a small assignment problem
=========================================

Optimal duals of the assignment LP carry a discount per agent, a raise per
agent and a price per item. This script samples a few, takes meets and joins,
and compares the two extreme points with VCG feedback on the matching pod.
"""

import numpy as np

from podfeedback import CoalitionalGame, vcg_feedback
from podfeedback.assignment import (AssignmentInstance, extend_to_dual, lattice_meet_join, optimal_value,
                                    pod_equivalent, sample_optimal_duals, solve_assignment_dual)
from podfeedback.feedback import in_bicore


def show(label, d):
    fmt = lambda xs: "(" + ", ".join(str(x) for x in xs) + ")"  # noqa: E731
    print(f"{label:>10}: pi={fmt(d.pi)} mu={fmt(d.mu)} p={fmt(d.p)}")


inst = AssignmentInstance(((9, 4, 1), (7, 6, 2), (3, 5, 4), (2, 2, 6)))
print("optimal value:", optimal_value(inst))

lo = solve_assignment_dual(inst, "min_point")
hi = solve_assignment_dual(inst, "max_point")
show("smallest", lo)
show("largest", hi)

pod = pod_equivalent(inst)
vcg = vcg_feedback(pod)
print("VCG discounts:", [str(x) for x in vcg.discounts], " VCG raises:", [str(x) for x in vcg.raises])

# %%
# Meets and joins of sampled optima stay optimal.
rng = np.random.default_rng(3)
a, b = sample_optimal_duals(inst, 2, rng)
meet, join = lattice_meet_join(a, b)
for label, d in (("a", a), ("b", b), ("meet", meet), ("join", join)):
    show(label, d)

# %%
# Each optimal dual's (pi, mu) lies in the bicore of the pod, and prices can be
# recovered from (pi, mu) alone.
game = CoalitionalGame(pod)
for d in (lo, hi, meet, join):
    assert in_bicore(game, d.pi, d.mu)
    assert extend_to_dual(inst, d.pi, d.mu) is not None
print("all four points are bicore members with optimal price extensions")
