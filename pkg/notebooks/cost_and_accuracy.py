"""
Cost against accuracy
=====================

Small versions of the two harness experiments: the 99th-percentile error
of each operator against the integrated reference value, and the median
comparison time as the population grows. Full-size runs go through the
``probdom scenario-error`` and ``probdom timing`` commands.
"""

from probdom import harness

scenarios = harness.load_scenarios()
for sc in scenarios:
    print(f"{sc.name:>18}: P(x1 > x2) = {sc.oracle:.6f}   x1 = {sc.x1}, x2 = {sc.x2}")

# %%
# Error table, 50 repetitions per cell to keep this quick.
ops = ["pw", "emp", "reduce", "gauss", "hist:0.01"]
sizes = [100, 1000, 10000]
rows = harness.error_sweep(scenarios, ops, sizes, repetitions=50)
err = {(r[0], r[1], r[2]): r[3] for r in rows}
print("\n99th-percentile absolute error")
print(f"{'scenario':>18} {'op':>10}" + "".join(f"{n:>10d}" for n in sizes))
for sc in scenarios:
    for op in ops:
        print(f"{sc.name:>18} {op:>10}" + "".join(f"{err[sc.name, op, n]:10.4f}" for n in sizes))

# gauss stays off on the skewed beta scenario however many samples it sees,
# while the sample-based operators keep improving.

# %%
# Timing. Comparison cost of pw and emp grows with N; reduce grows with its
# square root; the moment-based operators stay flat.
timing_ops = ["mean", "gauss", "uni2", "reduce", "emp", "pw"]
sizes = [100, 1000, 10000]
rows = harness.timing(timing_ops, sizes, iterations=50, warmup=5, pin=False)
cmp_us = {(r[0], r[1]): r[3] for r in rows}
print("\nmedian comparison time (microseconds)")
print(f"{'op':>8}" + "".join(f"{n:>12d}" for n in sizes))
for op in timing_ops:
    print(f"{op:>8}" + "".join(f"{cmp_us[op, n]:12.2f}" for n in sizes))
