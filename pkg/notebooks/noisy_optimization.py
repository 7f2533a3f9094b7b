"""
NSGA-II on a noisy benchmark
============================

Runs the optimizer on UDTLZ2 with the reduced empirical comparison and
follows the front quality over the generations. The full protocol
(25 individuals, 400 generations, 10 runs) is

    probdom optimize --problem udtlz2 --op reduce --gamma 0.7 --runs 10

which writes every run plus the median metric traces to the output folder.
"""

import numpy as np

from probdom import OperatorConfig, harness
from probdom.benchmarks import UncertainProblem
from probdom.metrics import final_front
from probdom.optimizer import OptimizerConfig

problem = UncertainProblem("udtlz2")
cfg = OptimizerConfig(pop_size=25, generations=60, samples=100, operator="reduce",
                      op_config=OperatorConfig(gamma=0.7), seed=0)
records = harness.run_seeds(problem, cfg, runs=3)

# %%
# The reference front is the non-dominated union of the final fronts.
reference = harness.reference_front(records)
traces, medians, kind = harness.summarize_runs(records, reference, divisions=20, eps="auto")
print(f"reference front: {len(reference)} points, epsilon kind: {kind}")
print(f"{'gen':>4} {'eps':>8} {'dci':>8} {'diag':>8}")
for gen, eps, dci_value, diag in medians[::10] + [medians[-1]]:
    print(f"{gen:4d} {eps:8.4f} {dci_value:8.4f} {diag:8.4f}")

# %%
# Mean objective values of the final front. On the true front the squares
# sum to one; noise and the truncated series keep the estimates a little above.
front = final_front(records[0])
print("\nsum of squared mean objectives on the last front of run 0:")
print(np.round(np.sum(front**2, axis=1), 3))
