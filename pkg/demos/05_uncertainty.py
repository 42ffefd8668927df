"""
===========================================
Aleatoric and epistemic uncertainty metrics
===========================================

Entropy of the mean prediction splits into the mean member entropy
(aleatoric) and the disagreement between members (epistemic). Grouping
test points by set size or by epistemic uncertainty exposes where
coverage is worst.
"""

# %%
# Setup
# -----
import numpy as np

from bernoulli_sets import (
    bps_params,
    calibrate_risk_control,
    eusc_groups,
    groupwise_worst_coverage,
    ssc_groups,
    uncertainty_decomposition,
)
from bernoulli_sets.data import gen_aps_synthetic, split
from bernoulli_sets.metrics import au_eu_heatmap

ds = gen_aps_synthetic(3000, k=10, seed=5, noise=1.0, m=5)
cal, test = split(ds, [0.3, 0.7], seed=5)
t = calibrate_risk_control(cal.calibration_pairs(), 0.1).t_star
params = [bps_params(p, t) for p in test.predictions]

# %%
# Decomposition
# -------------
triples = [uncertainty_decomposition(p) for p in test.predictions]
eu = np.array([u.epistemic for u in triples])
print(f"mean total {np.mean([u.total for u in triples]):.3f}, "
      f"aleatoric {np.mean([u.aleatoric for u in triples]):.3f}, epistemic {eu.mean():.3f}")

# %%
# Worst-group coverage
# --------------------
worst_ssc, _ = groupwise_worst_coverage(params, test.labels, ssc_groups(params))
worst_eusc, per = groupwise_worst_coverage(params, test.labels, eusc_groups(eu, 5))
print(f"size-stratified worst coverage {worst_ssc:.3f}")
print(f"EU-stratified worst coverage {worst_eusc:.3f}; per quintile:",
      {g: round(c, 3) for g, c in per.items()})

# %%
# Heatmap
# -------
hm = au_eu_heatmap(triples, params, test.labels, n_bins_per_axis=4)
print("counts (rows AU, cols EU):\n", hm.counts)
print("coverage:\n", np.round(hm.coverage, 2))

# %%
# Takeaways
# ---------
# - Epistemic uncertainty is never negative by concavity of entropy.
# - Stratified coverage reveals regions the marginal average hides.
