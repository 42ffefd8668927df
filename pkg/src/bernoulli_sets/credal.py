"""Credal-set geometry: total-variation balls and a Tukey-depth estimate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ProbabilityVector, SecondOrderPrediction, dedup_rows, make_probability_vector


@dataclass(frozen=True)
class TvBall:
    center: ProbabilityVector
    radius: float

    def __post_init__(self):
        if not 0.0 <= self.radius <= 1.0:
            raise ValueError(f"radius must lie in [0, 1], got {self.radius}")


@dataclass(frozen=True, eq=False)
class TvCorner:
    """Corner for the ordered pair (gain, loss): mass moves from ``loss`` to ``gain``."""

    gain: int
    loss: int
    eta: float
    point: np.ndarray


def tv_distance(p, q) -> float:
    """Half the L1 distance, i.e. the largest gap in mass over label subsets."""
    p = p.probs if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=float)
    q = q.probs if isinstance(q, ProbabilityVector) else np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    return 0.5 * float(np.abs(p - q).sum())


def tv_ball_corners(ball: TvBall) -> list[TvCorner]:
    """All ``K(K-1)`` corners ``p + eta * d * (e_i - e_j)``, pulled back onto
    the simplex with ``eta = min(1, (1 - p_i)/d, p_j/d)``."""
    p = ball.center.probs
    d = ball.radius
    k = p.shape[0]
    corners = []
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if d == 0:
                eta = 0.0
            else:
                eta = min(1.0, (1.0 - p[i]) / d, p[j] / d)
            step = eta * d
            q = p.copy()
            q[i] += step
            q[j] -= step
            q[j] = max(q[j], 0.0)
            q[i] = min(q[i], 1.0)
            corners.append(TvCorner(i, j, eta, q))
    return corners


def tv_ball_vertices(ball: TvBall) -> SecondOrderPrediction:
    """Corner points of the TV ball as a second-order prediction.

    When no corner is clipped (``d <= p_j`` and ``d <= 1 - p_i`` for every
    pair) their hull is exactly the ball. Clipped corners give a hull inside
    the ball that can miss part of it near the simplex boundary.
    """
    if ball.radius == 0:
        return SecondOrderPrediction(ball.center.probs[None, :])
    rows = np.vstack([c.point for c in tv_ball_corners(ball)])
    return SecondOrderPrediction(dedup_rows(rows))


def is_unclipped(ball: TvBall) -> bool:
    p = ball.center.probs
    return ball.radius <= p.min() and ball.radius <= 1.0 - p.max()


def sample_in_tv_ball(ball: TvBall, rng: np.random.Generator) -> ProbabilityVector:
    """A Dirichlet(1)-weighted mixture of the ball's corner points.

    This is not uniform over the ball. It always lands inside the ball
    (TV balls are convex) and inside the corner hull.
    """
    if ball.radius == 0:
        return ball.center
    v = tv_ball_vertices(ball).vertices
    w = rng.dirichlet(np.ones(v.shape[0]))
    return make_probability_vector(w @ v)


def _tangent_directions(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    out = np.empty((n, k))
    filled = 0
    while filled < n:
        s = rng.standard_normal(k)
        s -= s.mean()
        norm = np.linalg.norm(s)
        if norm < 1e-12:
            continue
        out[filled] = s / norm
        filled += 1
    return out


def estimate_tukey_depth(
    p,
    samples: SecondOrderPrediction | np.ndarray,
    n_directions: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo upper estimate of the halfspace depth of ``p`` among ``samples``.

    Directions are Gaussian, projected onto the zero-sum hyperplane and
    normalized; the estimate is the smallest fraction of samples strictly on
    the negative side over the drawn directions.
    """
    if n_directions < 1:
        raise ValueError("n_directions must be >= 1")
    p = p.probs if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=float)
    pts = samples.vertices if isinstance(samples, SecondOrderPrediction) else np.atleast_2d(samples)
    if pts.shape[0] == 0:
        raise ValueError("no samples")
    dirs = _tangent_directions(rng, n_directions, p.shape[0])
    proj = (pts - p) @ dirs.T
    return float((proj < 0).mean(axis=0).min())
