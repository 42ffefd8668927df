"""
===========================================
Randomized sets from a single distribution
===========================================

With one predictive distribution, the smallest set family that reaches a
target coverage in expectation is a fractional knapsack: include labels in
order of decreasing probability and take the boundary label with just
enough probability. Randomized APS builds exactly the same inclusion
probabilities, which this demo checks numerically.
"""

# %%
# Setup
# -----
import numpy as np

from bernoulli_sets import (
    SecondOrderPrediction,
    aps_params,
    aps_set,
    bps_params,
    expected_coverage,
    expected_size,
    make_probability_vector,
    sample_set,
)

rng = np.random.default_rng(0)
p = make_probability_vector([0.45, 0.25, 0.15, 0.10, 0.05])

# %%
# Inclusion probabilities
# -----------------------
# At target 0.8 the first two labels are always included and the third is
# included with probability (0.8 - 0.7) / 0.15.
t = 0.8
bps = bps_params(SecondOrderPrediction.from_vectors([p.probs]), t)
aps = aps_params(p, t)
print("BPS b:", np.round(bps.b, 4))
print("APS b:", np.round(aps.b, 4))
print("max |BPS - APS|:", np.max(np.abs(bps.b - aps.b)))
print(f"expected size {expected_size(bps):.4f}, expected coverage {expected_coverage(bps, p):.4f}")

# %%
# Drawing sets
# ------------
# A BPS set includes label j independently with probability b_j. An APS set
# uses a single uniform draw to decide whether to drop the boundary label.
for _ in range(3):
    print("BPS set:", sample_set(bps, rng).members)
for u in (0.1, 0.5, 0.9):
    s, decision = aps_set(p, t, u)
    print(f"APS set at u={u}: {s.members}  (boundary rank {decision.boundary_rank}, "
          f"removal prob {decision.removal_prob:.3f})")

# %%
# Monte Carlo check
# -----------------
# The realized coverage over many draws matches t.
labels = rng.choice(p.k, size=20_000, p=p.probs)
hits = np.mean([lab in sample_set(bps, rng) for lab in labels])
print(f"Monte Carlo coverage {hits:.4f} (target {t})")

# %%
# Takeaways
# ---------
# - A single distribution reduces the optimization to a greedy knapsack.
# - Independent Bernoulli draws and APS randomization share the same marginals.
