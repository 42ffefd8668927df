"""
================================================
Covering every distribution in a credal set
================================================

A second-order prediction is a finite set of probability vectors, for
example the members of an ensemble. Bernoulli prediction sets choose
inclusion probabilities ``b`` of minimal expected size so that every
distribution in the convex hull is covered with probability at least ``t``.
This is a small linear program solved here with a bounded simplex.
"""

# %%
# Setup
# -----
import numpy as np

from bernoulli_sets import SecondOrderPrediction, expected_size, solve_bps

rng = np.random.default_rng(1)
pred = SecondOrderPrediction.from_vectors([
    [0.70, 0.20, 0.05, 0.05],
    [0.30, 0.50, 0.10, 0.10],
    [0.40, 0.15, 0.40, 0.05],
])

# %%
# Solving the LP
# --------------
# The active constraints are the ensemble members whose coverage sits
# exactly on the target.
t = 0.9
sol = solve_bps(pred, t)
print("b =", np.round(sol.b, 4))
print(f"expected size {sol.objective:.4f}, pivots {sol.iterations}, active members {sol.active_constraints}")
print("coverage per member:", np.round(pred.vertices @ sol.b, 4))

# %%
# Coverage over the hull
# ----------------------
# Coverage is linear in the distribution, so it is minimized at a vertex.
# Random mixtures of the members therefore never fall below t.
mixtures = rng.dirichlet(np.ones(pred.m), size=10_000) @ pred.vertices
print(f"worst coverage over 10k mixtures: {(mixtures @ sol.b).min():.6f}")

# %%
# More disagreement, larger sets
# ------------------------------
# Adding a member adds a constraint to the LP, so the optimal expected set
# size never shrinks.
extra = SecondOrderPrediction.from_vectors(list(pred.vertices) + [[0.10, 0.10, 0.10, 0.70]])
print(f"size with 3 members: {expected_size(sol.params):.4f}")
print(f"size with 4 members: {expected_size(solve_bps(extra, t).params):.4f}")

# %%
# Takeaways
# ---------
# - Only the hull vertices matter for coverage.
# - Epistemic disagreement between members turns directly into set size.
