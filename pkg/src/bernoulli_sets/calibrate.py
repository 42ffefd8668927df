"""Conformal calibration of the coverage target.

Everything is parametrized by the coverage target ``t``: the right-hand
side of the per-vertex constraints ``b @ pi >= t``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import BernoulliParams, SecondOrderPrediction
from .sets import params_for

CalibrationPair = tuple[SecondOrderPrediction, int]
ParamsFn = Callable[[SecondOrderPrediction, float], BernoulliParams]

MAX_ITER = 60


@dataclass
class CalibrationResult:
    t_star: float
    conservative: bool
    saturated: bool
    iterations: int
    ceiling: int
    n: int
    trace: list[tuple[float, float]] = field(default_factory=list)


def coverage_ceiling(n: int, alpha: float) -> int:
    """``ceil((1 - alpha)(n + 1))``, guarded against float round-up."""
    x = (1.0 - alpha) * (n + 1)
    c = math.ceil(x)
    if c - x > 1 - 1e-9:
        c -= 1
    return c


def _bps(prediction, t):
    return params_for(prediction, t, "bps")


def empirical_coverage_sum(
    cal: Sequence[CalibrationPair],
    t: float,
    params_fn: ParamsFn = _bps,
    executor: ThreadPoolExecutor | None = None,
) -> float:
    """Sum over records of the inclusion probability of the true label.

    Per-record terms are always added in record order, so threaded and
    sequential evaluation give identical floats.
    """
    def term(pair):
        prediction, label = pair
        return params_fn(prediction, t).b[label]

    terms = list(executor.map(term, cal)) if executor is not None else [term(p) for p in cal]
    total = 0.0
    for v in terms:
        total += float(v)
    return total


def calibrate_risk_control(
    cal: Sequence[CalibrationPair],
    alpha: float,
    tol: float = 1e-6,
    params_fn: ParamsFn = _bps,
    jobs: int = 1,
) -> CalibrationResult:
    """Smallest target whose calibration coverage sum reaches the ceiling.

    Binary search on [0, 1]; the returned ``t_star`` is the upper end of the
    final bracket, so the ceiling condition holds at it. When even ``t = 1``
    falls short the result is ``t_star = 1`` with ``saturated`` set.
    """
    n = len(cal)
    if n == 0:
        raise ValueError("calibration set is empty")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    ceiling = coverage_ceiling(n, alpha)

    executor = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        def total(t):
            return empirical_coverage_sum(cal, t, params_fn, executor)

        trace = []
        top = total(1.0)
        trace.append((1.0, top))
        if top < ceiling:
            return CalibrationResult(1.0, False, True, 0, ceiling, n, trace)

        lo, hi = 0.0, 1.0
        it = 0
        while hi - lo > tol and it < MAX_ITER:
            mid = 0.5 * (lo + hi)
            s = total(mid)
            trace.append((mid, s))
            if s >= ceiling:
                hi = mid
            else:
                lo = mid
            it += 1
    finally:
        if executor is not None:
            executor.shutdown()
    return CalibrationResult(hi, False, False, it, ceiling, n, trace)


def conservative_threshold(t_cp: float, alpha: float) -> float:
    """Never go below the nominal target ``1 - alpha``."""
    return max(float(t_cp), 1.0 - alpha)


def conformal_quantile(scores: Sequence[float], alpha: float) -> tuple[float, bool]:
    """The ``ceil((1 - alpha)(n + 1))``-th smallest score.

    Returns ``(value, saturated)``; when the rank exceeds ``n`` the value is
    ``inf`` and ``saturated`` is true.
    """
    s = np.sort(np.asarray(scores, dtype=float))
    n = s.size
    if n == 0:
        raise ValueError("no scores")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    rank = coverage_ceiling(n, alpha)
    if rank > n:
        return math.inf, True
    return float(s[rank - 1]), False
