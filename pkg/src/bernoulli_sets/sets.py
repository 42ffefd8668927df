"""BPS and APS prediction-set parameters at a coverage target."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BernoulliParams, LabelSet, ProbabilityVector, SecondOrderPrediction
from .lp import CUM_TOL, SNAP_TOL, solve_bps

MODES = ("bps", "aps")


@dataclass(frozen=True)
class ApsDecision:
    """``boundary_rank`` is the 1-based rank of the label at which the
    sorted cumulative mass first reaches the target."""

    boundary_rank: int
    include_top: int
    u: float
    removal_prob: float


def _as_probs(dist) -> np.ndarray:
    return dist.probs if isinstance(dist, ProbabilityVector) else np.asarray(dist, dtype=float)


def _check_unit(name: str, v: float) -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v}")
    return v


def aps_ranking(dist) -> np.ndarray:
    """Labels by descending probability, equal probabilities by ascending index."""
    p = _as_probs(dist)
    return np.lexsort((np.arange(p.shape[0]), -p))


def _aps_boundary(p: np.ndarray, order: np.ndarray, tau: float) -> tuple[int, float]:
    sorted_p = p[order]
    cum = np.cumsum(sorted_p)
    hits = np.flatnonzero(cum >= tau - CUM_TOL)
    rank = int(hits[0]) + 1 if hits.size else p.shape[0]
    p_boundary = sorted_p[rank - 1]
    if p_boundary <= 0:
        # undefined in the original rule; never drop a zero-mass boundary label
        return rank, 0.0
    removal = (cum[rank - 1] - tau) / p_boundary
    if removal < SNAP_TOL:
        removal = 0.0
    return rank, float(min(1.0, removal))


def aps_set(dist, tau: float, u: float) -> tuple[LabelSet, ApsDecision]:
    """Realize the APS randomized set for noise ``u``.

    Returns the top ``L - 1`` labels when ``u`` is at most the removal
    probability of the boundary label, otherwise the top ``L``.
    """
    tau = _check_unit("tau", tau)
    u = _check_unit("u", u)
    p = _as_probs(dist)
    order = aps_ranking(p)
    rank, removal = _aps_boundary(p, order, tau)
    top = rank - 1 if u <= removal else rank
    return LabelSet(tuple(order[:top].tolist()), p.shape[0]), ApsDecision(rank, top, u, removal)


def aps_params(dist, tau: float) -> BernoulliParams:
    """Per-label inclusion probabilities of the APS set, marginalized over ``u``."""
    tau = _check_unit("tau", tau)
    p = _as_probs(dist)
    order = aps_ranking(p)
    rank, removal = _aps_boundary(p, order, tau)
    b = np.zeros(p.shape[0])
    b[order[: rank - 1]] = 1.0
    b[order[rank - 1]] = 1.0 - removal
    return BernoulliParams(b)


def bps_params(prediction: SecondOrderPrediction, t: float) -> BernoulliParams:
    return solve_bps(prediction, t).params


def params_for(prediction: SecondOrderPrediction, t: float, mode: str = "bps") -> BernoulliParams:
    """BPS on the vertices, or APS on their arithmetic mean."""
    if mode == "bps":
        return bps_params(prediction, t)
    if mode == "aps":
        return aps_params(prediction.mean(), t)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def nominal_params(prediction: SecondOrderPrediction, alpha: float, mode: str = "bps") -> BernoulliParams:
    """Sets at the uncalibrated target ``1 - alpha``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return params_for(prediction, 1.0 - alpha, mode)
