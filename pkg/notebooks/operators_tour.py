"""
Comparing uncertain values
==========================

Walks through the comparison operators on one pair of uncertain values:
closed-form distributions first, then sample populations of growing size.
"""

import numpy as np

from probdom import DistributionSpec, OperatorConfig, UncertainValue, get_operator, oracle_dominance

# Two overlapping random variables. A is a flat uniform, B a tight Gaussian.
a_spec = DistributionSpec.uniform(0.2, 1.0)
b_spec = DistributionSpec.gaussian(0.45, 0.02)
truth = oracle_dominance(a_spec, b_spec)
print(f"P(A > B) by numerical integration: {truth:.6f}")

# Closed forms. uni1 needs bounded support on both sides, so it is left out.
# emp and reduce see closed forms as 20 equiprobable quantile points.
a, b = UncertainValue.from_spec(a_spec), UncertainValue.from_spec(b_spec)
for op_id in ("gauss", "uni2", "emp", "reduce"):
    p = get_operator(op_id).p_greater(a, b)
    print(f"{op_id:>7}: {p:.6f}  (error {p - truth:+.6f})")

# %%
# Sample populations. The exact empirical estimate tightens like 1/sqrt(N);
# the reduced one works on ceil(sqrt(N)) points and pays for it in accuracy.
rng = np.random.default_rng(0)
print("\n     N      emp   reduce       pw")
for n in (10, 100, 1000, 10000):
    xa = a_spec.sample(rng, n)
    xb = b_spec.sample(rng, n)
    va, vb = UncertainValue.from_samples(xa), UncertainValue.from_samples(xb)
    pa, pb = UncertainValue.from_samples(xa, keep_order=True), UncertainValue.from_samples(xb, keep_order=True)
    errs = [
        get_operator("emp").p_greater(va, vb) - truth,
        get_operator("reduce").p_greater(va, vb) - truth,
        get_operator("pw").p_greater(pa, pb) - truth,
    ]
    print(f"{n:6d}" + "".join(f"{e:+9.4f}" for e in errs))

# %%
# Decisions. With gamma = 0.7 a probability of about 0.68 is not enough to
# call A better, so the pair is indifferent.
for gamma in (0.5, 0.7):
    op = get_operator("emp", OperatorConfig(gamma=gamma))
    print(f"gamma={gamma}: {op.decision(a, b).value}")
