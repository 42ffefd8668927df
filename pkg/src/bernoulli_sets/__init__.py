"""Bernoulli prediction sets for credal (second-order) predictions."""

from .calibrate import (
    CalibrationResult,
    calibrate_risk_control,
    conformal_quantile,
    conservative_threshold,
    empirical_coverage_sum,
)
from .core import (
    BernoulliParams,
    DatasetRecord,
    LabelSet,
    ProbabilityVector,
    SecondOrderPrediction,
    expected_coverage,
    expected_size,
    make_probability_vector,
    sample_set,
)
from .credal import (
    TvBall,
    estimate_tukey_depth,
    sample_in_tv_ball,
    tv_ball_vertices,
    tv_distance,
)
from .lp import LpSolution, solve_bps, solve_fractional_knapsack
from .metrics import (
    UncertaintyTriple,
    entropy,
    eusc_groups,
    groupwise_worst_coverage,
    ssc_groups,
    summary_metrics,
    uncertainty_decomposition,
)
from .sets import ApsDecision, aps_params, aps_set, bps_params, nominal_params

__version__ = "0.1.0"
