"""
One bid trajectory
==================

Writes per-round bids for a generated instance to CSV, ready for plotting.
"""

import csv
import sys

from podfeedback import GeneratorParams, Policy, RandomTargets, generate_instance, run

inst = generate_instance(GeneratorParams(seed=0), index=12, bidders=4)
trace = run(inst, Policy.CORE, initial=RandomTargets(12))
print(f"{trace.outcome.value} in {trace.num_rounds} rounds")

writer = csv.writer(sys.stdout)
writer.writerow(["round", "agent", "bid_micro", "status"])
writer.writerows(trace.csv_rows())
