"""Minimum expected-size Bernoulli parameters under per-vertex coverage
constraints.

The program is::

    minimize    sum(b)
    subject to  b @ pi_j >= t   for every vertex pi_j
                0 <= b <= 1

It is always feasible (``b = 1`` gives ``b @ pi_j = 1``), so the simplex
starts from that point with every label at its upper bound and the surplus
variables basic. No phase one is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BernoulliParams, ProbabilityVector, SecondOrderPrediction

PIVOT_TOL = 1e-9
ACTIVE_TOL = 1e-9
# cumulative mass within this of the target counts as reaching it
CUM_TOL = 1e-12
# boundary fractions this close to one are reported as one
SNAP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LpSolution:
    params: BernoulliParams
    objective: float
    active_constraints: tuple[int, ...]
    iterations: int

    @property
    def b(self) -> np.ndarray:
        return self.params.b


def _check_target(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"coverage target must lie in [0, 1], got {t}")
    return t


def _solution(b: np.ndarray, vertices: np.ndarray, t: float, iterations: int) -> LpSolution:
    b = np.clip(b, 0.0, 1.0)
    cov = vertices @ b
    active = tuple(int(j) for j in np.flatnonzero(np.abs(cov - t) <= ACTIVE_TOL))
    return LpSolution(BernoulliParams(b), float(b.sum()), active, iterations)


def _bounded_simplex(P: np.ndarray, t: float, max_iter: int | None = None) -> tuple[np.ndarray, int]:
    """Bounded-variable primal simplex with Bland's rule.

    ``P`` is ``(m, K)``. Columns are the K labels (bounds [0, 1]) followed by
    m surplus variables (bounds [0, inf)), with ``P b - s = t``. Returns the
    label block of the optimal vertex and the pivot count.
    """
    m, k = P.shape
    n = k + m
    A = np.hstack([P, -np.eye(m)])
    c = np.concatenate([np.ones(k), np.zeros(m)])
    upper = np.concatenate([np.ones(k), np.full(m, np.inf)])
    rhs = np.full(m, t)

    x = np.concatenate([np.ones(k), np.zeros(m)])
    at_upper = np.zeros(n, dtype=bool)
    at_upper[:k] = True
    basis = list(range(k, n))
    is_basic = np.zeros(n, dtype=bool)
    is_basic[basis] = True

    if max_iter is None:
        max_iter = 50 * n + 1000
    for it in range(max_iter):
        B = A[:, basis]
        nb = ~is_basic
        x[basis] = np.linalg.solve(B, rhs - A[:, nb] @ x[nb])
        y = np.linalg.solve(B.T, c[basis])
        d = c - A.T @ y

        improving = nb & ((~at_upper & (d < -PIVOT_TOL)) | (at_upper & (d > PIVOT_TOL)))
        cand = np.flatnonzero(improving)
        if cand.size == 0:
            return x[:k].copy(), it
        j = int(cand[0])
        direction = -1.0 if at_upper[j] else 1.0
        w = np.linalg.solve(B, A[:, j])

        # step length: the entering variable's own range competes with every
        # basic variable hitting a bound; ties go to the lowest index
        best_theta, best_var, best_row = upper[j], j, -1
        for row, var in enumerate(basis):
            rate = -direction * w[row]
            if rate < -PIVOT_TOL:
                lim = x[var] / -rate
            elif rate > PIVOT_TOL and np.isfinite(upper[var]):
                lim = (upper[var] - x[var]) / rate
            else:
                continue
            lim = max(lim, 0.0)
            if lim < best_theta - 1e-14 or (abs(lim - best_theta) <= 1e-14 and var < best_var):
                best_theta, best_var, best_row = lim, var, row
        if not np.isfinite(best_theta):
            raise RuntimeError("unbounded direction in a bounded program")

        if best_row < 0:
            at_upper[j] = not at_upper[j]
            x[j] = upper[j] if at_upper[j] else 0.0
            continue
        rate = -direction * w[best_row]
        leaving_to_upper = rate > 0
        basis[best_row] = j
        is_basic[j] = True
        is_basic[best_var] = False
        at_upper[j] = False
        at_upper[best_var] = leaving_to_upper
        x[best_var] = upper[best_var] if leaving_to_upper else 0.0
    raise RuntimeError(f"simplex did not converge in {max_iter} iterations")


def solve_fractional_knapsack(dist: ProbabilityVector | np.ndarray, t: float) -> LpSolution:
    """Greedy optimum for a single coverage constraint.

    Labels are taken in descending probability (ties by ascending index) and
    included with probability one until the next label would overshoot
    ``t``; that boundary label gets ``(t - cum) / p``. Zero-probability
    labels always get zero.
    """
    t = _check_target(t)
    p = dist.probs if isinstance(dist, ProbabilityVector) else np.asarray(dist, dtype=float)
    k = p.shape[0]
    order = np.lexsort((np.arange(k), -p))
    order = order[p[order] > 0]
    b = np.zeros(k)
    cum = 0.0
    for label in order:
        pj = p[label]
        if cum + pj >= t - CUM_TOL:
            frac = (t - cum) / pj
            b[label] = 1.0 if frac > 1.0 - SNAP_TOL else max(0.0, frac)
            break
        b[label] = 1.0
        cum += pj
    return _solution(b, p[None, :], t, 0)


def solve_bps(prediction: SecondOrderPrediction, t: float) -> LpSolution:
    """Smallest Bernoulli set covering every vertex with probability ``t``.

    A single-vertex prediction goes through :func:`solve_fractional_knapsack`
    so the tie rule among equal probabilities is the same on both paths.
    Labels with zero mass in every vertex are fixed at zero before solving.
    At ``t == 1`` every supported label is forced to one, so the support
    indicator is returned directly instead of a float-rounded simplex vertex.
    """
    t = _check_target(t)
    P = prediction.vertices
    if P.shape[0] == 1:
        return solve_fractional_knapsack(P[0], t)
    support = np.flatnonzero(P.max(axis=0) > 0)
    b = np.zeros(P.shape[1])
    if t == 1.0:
        b[support] = 1.0
        return _solution(b, P, t, 0)
    b_support, iterations = _bounded_simplex(P[:, support], t)
    b[support] = b_support
    return _solution(b, P, t, iterations)
