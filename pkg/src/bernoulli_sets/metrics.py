"""Coverage, efficiency and uncertainty metrics for randomized sets."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BernoulliParams, ProbabilityVector, SecondOrderPrediction

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UncertaintyTriple:
    total: float
    aleatoric: float
    epistemic: float


def _entropy_rows(P: np.ndarray) -> np.ndarray:
    k = P.shape[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * np.log(P), 0.0)
    return -terms.sum(axis=-1) / np.log(k)


def entropy(dist) -> float:
    """Shannon entropy in base K, so the uniform distribution scores 1."""
    p = dist.probs if isinstance(dist, ProbabilityVector) else np.asarray(dist, dtype=float)
    if np.all(p == p[0]):
        # exact for uniform inputs; the generic path can land one ulp off
        return 1.0
    return float(min(1.0, max(0.0, _entropy_rows(p))))


def uncertainty_decomposition(prediction: SecondOrderPrediction) -> UncertaintyTriple:
    """Entropy of the mean (total), mean entropy (aleatoric), and their gap."""
    V = prediction.vertices
    mean = V.mean(axis=0)
    total = entropy(mean / mean.sum())
    aleatoric = float(np.mean([entropy(v) for v in V]))
    return UncertaintyTriple(total, aleatoric, total - aleatoric)


def _b_matrix(params_list: Sequence[BernoulliParams]) -> np.ndarray:
    return np.vstack([np.asarray(p.b if isinstance(p, BernoulliParams) else p, dtype=float)
                      for p in params_list])


def true_label_coverage(params_list, labels) -> np.ndarray:
    """``b_i[y_i]`` for every record."""
    B = _b_matrix(params_list)
    y = np.asarray(labels, dtype=int)
    if B.shape[0] != y.shape[0]:
        raise ValueError(f"{B.shape[0]} parameter vectors but {y.shape[0]} labels")
    return B[np.arange(y.shape[0]), y]


def summary_metrics(params_list, labels, oracles=None) -> dict[str, float]:
    """Marginal coverage, mean expected size and, given oracles, mean
    conditional coverage ``b_i @ p_i``."""
    B = _b_matrix(params_list)
    out = {
        "marg_cvg": float(true_label_coverage(B, labels).mean()),
        "set_size": float(B.sum(axis=1).mean()),
    }
    if oracles is not None:
        O = np.vstack([o.probs if isinstance(o, ProbabilityVector) else np.asarray(o, dtype=float)
                       for o in oracles])
        if O.shape != B.shape:
            raise ValueError("oracles do not align with parameter vectors")
        out["cond_cvg"] = float(np.einsum("ij,ij->i", B, O).mean())
    return out


def conditional_coverages(params_list, oracles) -> np.ndarray:
    B = _b_matrix(params_list)
    O = np.vstack([o.probs if isinstance(o, ProbabilityVector) else o for o in oracles])
    return np.einsum("ij,ij->i", B, O)


def groupwise_worst_coverage(params_list, labels, group_ids) -> tuple[float, dict]:
    cov = true_label_coverage(params_list, labels)
    g = np.asarray(group_ids)
    if g.shape[0] != cov.shape[0]:
        raise ValueError("group ids do not align with records")
    if cov.size == 0:
        raise ValueError("no records to group")
    per_group = {}
    for gid in np.unique(g):
        members = cov[g == gid]
        per_group[gid.item()] = float(members.mean())
    return min(per_group.values()), per_group


def ssc_groups(params_list) -> np.ndarray:
    """Group by expected set size rounded half-up to an integer."""
    sizes = _b_matrix(params_list).sum(axis=1)
    return np.floor(sizes + 0.5).astype(int)


def eusc_groups(eu_values, n_bins: int = 10) -> np.ndarray:
    """Equal-frequency bins over epistemic uncertainty, ties by index."""
    eu = np.asarray(eu_values, dtype=float)
    n = eu.shape[0]
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if n < n_bins:
        log.warning("only %d records for %d EU bins; using %d bins", n, n_bins, n)
        n_bins = max(n, 1)
    ranks = np.empty(n, dtype=int)
    ranks[np.argsort(eu, kind="stable")] = np.arange(n)
    return (ranks * n_bins) // max(n, 1)


@dataclass(frozen=True, eq=False)
class Heatmap:
    counts: np.ndarray
    coverage: np.ndarray  # nan where the cell is empty
    au_edges: np.ndarray
    eu_edges: np.ndarray

    def rows(self):
        """``(au_bin, eu_bin, au_lo, au_hi, eu_lo, eu_hi, count, coverage)`` per cell."""
        n_au, n_eu = self.counts.shape
        for a in range(n_au):
            for e in range(n_eu):
                yield (a, e, self.au_edges[a], self.au_edges[a + 1],
                       self.eu_edges[e], self.eu_edges[e + 1],
                       int(self.counts[a, e]), float(self.coverage[a, e]))


def _edges(values: np.ndarray, n_bins: int, equal_count: bool) -> np.ndarray:
    if equal_count:
        return np.quantile(values, np.linspace(0, 1, n_bins + 1))
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        hi = lo + 1e-12
    return np.linspace(lo, hi, n_bins + 1)


def _digitize(values, edges):
    n_bins = edges.shape[0] - 1
    idx = np.searchsorted(edges, values, side="right") - 1
    return np.clip(idx, 0, n_bins - 1)


def au_eu_heatmap(triples: Sequence[UncertaintyTriple], params_list, labels,
                  n_bins_per_axis: int = 10, equal_count: bool = False) -> Heatmap:
    """2-D bins over observed aleatoric and epistemic ranges with the
    per-cell count and mean true-label coverage."""
    if n_bins_per_axis < 1:
        raise ValueError("n_bins_per_axis must be >= 1")
    au = np.array([t.aleatoric for t in triples])
    eu = np.array([t.epistemic for t in triples])
    cov = true_label_coverage(params_list, labels)
    au_edges = _edges(au, n_bins_per_axis, equal_count)
    eu_edges = _edges(eu, n_bins_per_axis, equal_count)
    ai, ei = _digitize(au, au_edges), _digitize(eu, eu_edges)
    counts = np.zeros((n_bins_per_axis, n_bins_per_axis), dtype=int)
    sums = np.zeros((n_bins_per_axis, n_bins_per_axis))
    np.add.at(counts, (ai, ei), 1)
    np.add.at(sums, (ai, ei), cov)
    with np.errstate(invalid="ignore", divide="ignore"):
        coverage = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return Heatmap(counts, coverage, au_edges, eu_edges)
