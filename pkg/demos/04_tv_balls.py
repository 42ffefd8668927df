"""
======================================
Total-variation credal sets and depth
======================================

A TV ball around a point prediction has a polytope intersection with the
simplex. Its corners are obtained by moving mass ``d`` from one label to
another. When the ball contains the true distribution, BPS sets over the
corners cover it at the nominal level, while APS on the center does not.
Tukey depth gives a way to rank distributions inside a credal set.
"""

# %%
# Setup
# -----
import numpy as np

from bernoulli_sets import TvBall, estimate_tukey_depth, make_probability_vector, sample_in_tv_ball, tv_ball_vertices
from bernoulli_sets.data import gen_tv_synthetic
from bernoulli_sets.metrics import conditional_coverages, summary_metrics
from bernoulli_sets.sets import nominal_params

rng = np.random.default_rng(4)

# %%
# Corners of a ball
# -----------------
ball = TvBall(make_probability_vector([0.5, 0.3, 0.2]), 0.1)
print("corners:\n", np.round(tv_ball_vertices(ball).vertices, 3))

# %%
# Valid credal sets
# -----------------
# Each synthetic record's ball contains its true distribution. BPS uses the
# corners; APS only sees the center.
for d in (0.05, 0.1, 0.2):
    credal, centers = gen_tv_synthetic(1000, 3, d, seed=0)
    bps = [nominal_params(p, 0.1, "bps") for p in credal.predictions]
    aps = [nominal_params(p, 0.1, "aps") for p in centers.predictions]
    cb = conditional_coverages(bps, credal.oracles)
    ca = conditional_coverages(aps, credal.oracles)
    print(f"d={d}: BPS min coverage {cb.min():.3f}, APS below 0.9 for {np.mean(ca < 0.9):.1%}, "
          f"sizes {summary_metrics(bps, credal.labels)['set_size']:.3f} vs "
          f"{summary_metrics(aps, centers.labels)['set_size']:.3f}")

# %%
# Tukey depth
# -----------
# The center of a ball is deep in a cloud sampled from the ball, and a corner is shallow.
cloud = np.array([sample_in_tv_ball(ball, rng).probs for _ in range(2000)])
corner = tv_ball_vertices(ball).vertices[0]
print(f"depth of center {estimate_tukey_depth(ball.center.probs, cloud, 500, rng):.3f}")
print(f"depth of a corner {estimate_tukey_depth(corner, cloud, 500, rng):.3f}")

# %%
# Takeaways
# ---------
# - TV balls have at most K(K-1) corners.
# - Covering the corners covers every distribution in the ball.
