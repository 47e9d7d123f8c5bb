"""
Comparing policies on synthetic pods
====================================

Runs the bidding dynamics under each policy on generated instances and prints
the summary table. The default size is small so the script finishes quickly;
pass a larger count as the first argument for the full experiment.
"""

import sys

from podfeedback import GeneratorParams
from podfeedback.cli import run_batch

count = int(sys.argv[1]) if len(sys.argv) > 1 else 100
report = run_batch(GeneratorParams(seed=0), count, ("vcg", "core", "bicore"), (3, 4, 5))

print(f"{'policy':<8}{'n':>3}{'rounds':>9}{'eff %':>9}{'conv %':>9}{'cycle %':>9}{'max %':>8}{'cycle eff':>11}")
for r in report.rows:
    cyc = "" if r.avg_cycle_eff is None else f"{r.avg_cycle_eff:.1f}"
    print(f"{r.policy:<8}{r.bidders:>3}{r.avg_rounds:>9.2f}{r.avg_eff:>9.2f}{r.pct(r.converged):>9.1f}"
          f"{r.pct(r.cycled):>9.1f}{r.pct(r.max_rounds):>8.1f}{cyc:>11}")
