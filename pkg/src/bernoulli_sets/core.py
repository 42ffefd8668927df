"""Value types for first-order distributions, credal predictions and
randomized (Bernoulli) prediction sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-6
DEDUP_TOL = 1e-12
RENORM_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """A point on the probability simplex over ``K >= 2`` labels.

    Build instances with :func:`make_probability_vector`, which validates and
    renormalizes raw input. The constructor trusts its argument.
    """

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen(self.probs))

    @property
    def k(self) -> int:
        return self.probs.shape[0]

    def __len__(self) -> int:
        return self.k

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, ProbabilityVector):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"ProbabilityVector({self.probs.tolist()})"


def make_probability_vector(raw: Iterable[float], tol: float = DEFAULT_TOL) -> ProbabilityVector:
    """Validate ``raw`` as a categorical distribution.

    Entries down to ``-tol`` are clamped to zero and the vector is divided by
    its sum, so float drift in exported softmax outputs is absorbed rather
    than rejected.

    Raises
    ------
    ValueError
        If there are fewer than two entries, an entry is below ``-tol``, or
        the sum is further than ``tol`` from one.
    """
    a = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=float).ravel()
    if a.size < 2:
        raise ValueError(f"need at least 2 labels, got {a.size}")
    if not np.all(np.isfinite(a)):
        raise ValueError("probabilities must be finite")
    if a.min() < -tol:
        raise ValueError(f"negative probability {a.min():.3g} beyond tolerance {tol:g}")
    s = a.sum()
    if abs(s - 1.0) > tol:
        raise ValueError(f"probabilities sum to {s:.12g}, not 1 (tol {tol:g})")
    a = np.clip(a, 0.0, None)
    s = a.sum()
    # already-normalized input passes through bit-for-bit
    if abs(s - 1.0) > RENORM_TOL:
        a = a / s
    return ProbabilityVector(np.minimum(a, 1.0))


@dataclass(frozen=True, eq=False)
class SecondOrderPrediction:
    """A finite set of first-order distributions; its convex hull is the
    credal set. Rows of :attr:`vertices` are the distributions."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.shape[0] == 0:
            raise ValueError("a second-order prediction needs at least one vertex")
        object.__setattr__(self, "vertices", _frozen(v))

    @classmethod
    def from_vectors(
        cls, vectors: Sequence[ProbabilityVector | Sequence[float]], tol: float = DEFAULT_TOL
    ) -> "SecondOrderPrediction":
        """Validate each row, check equal dimension and drop duplicates."""
        if len(vectors) == 0:
            raise ValueError("a second-order prediction needs at least one vertex")
        rows = [v.probs if isinstance(v, ProbabilityVector) else make_probability_vector(v, tol).probs
                for v in vectors]
        k = rows[0].shape[0]
        for r in rows:
            if r.shape[0] != k:
                raise ValueError(f"vertices disagree on dimension: {r.shape[0]} vs {k}")
        return cls(dedup_rows(np.vstack(rows)))

    @property
    def k(self) -> int:
        return self.vertices.shape[1]

    @property
    def m(self) -> int:
        return self.vertices.shape[0]

    def __len__(self) -> int:
        return self.m

    def __iter__(self):
        for row in self.vertices:
            yield ProbabilityVector(row)

    def mean(self) -> ProbabilityVector:
        """Arithmetic mean of the stored vertices."""
        mu = self.vertices.mean(axis=0)
        return ProbabilityVector(mu / mu.sum())

    def __eq__(self, other):
        if not isinstance(other, SecondOrderPrediction):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    def __repr__(self):
        return f"SecondOrderPrediction(m={self.m}, k={self.k})"


def dedup_rows(rows: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    """Keep the first of every group of rows within L-inf distance ``tol``."""
    kept: list[np.ndarray] = []
    for r in rows:
        if not any(np.max(np.abs(r - q)) <= tol for q in kept):
            kept.append(r)
    return np.vstack(kept)


@dataclass(frozen=True, eq=False)
class BernoulliParams:
    """Per-label inclusion probabilities of a randomized prediction set."""

    b: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).ravel()
        if b.size and (np.any(~np.isfinite(b)) or b.min() < 0.0 or b.max() > 1.0):
            raise ValueError("inclusion probabilities must lie in [0, 1]")
        object.__setattr__(self, "b", _frozen(b))

    @property
    def k(self) -> int:
        return self.b.shape[0]

    def __len__(self) -> int:
        return self.k

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.b, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, BernoulliParams):
            return NotImplemented
        return np.array_equal(self.b, other.b)

    def __repr__(self):
        return f"BernoulliParams({self.b.tolist()})"


@dataclass(frozen=True)
class LabelSet:
    """One realized prediction set: sorted 0-indexed labels."""

    members: tuple[int, ...]
    k: int

    def __post_init__(self):
        members = tuple(sorted(int(j) for j in self.members))
        if len(set(members)) != len(members):
            raise ValueError("duplicate labels in set")
        if members and (members[0] < 0 or members[-1] >= self.k):
            raise ValueError(f"labels must lie in [0, {self.k})")
        object.__setattr__(self, "members", members)

    def __contains__(self, label) -> bool:
        return int(label) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True, eq=False)
class DatasetRecord:
    id: str
    prediction: SecondOrderPrediction
    label: int | None = None
    oracle: ProbabilityVector | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        k = self.prediction.k
        if self.label is not None and not (0 <= self.label < k):
            raise ValueError(f"record {self.id!r}: label {self.label} outside [0, {k})")
        if self.oracle is not None and self.oracle.k != k:
            raise ValueError(f"record {self.id!r}: oracle has {self.oracle.k} labels, expected {k}")

    def __eq__(self, other):
        if not isinstance(other, DatasetRecord):
            return NotImplemented
        return (
            self.id == other.id
            and self.prediction == other.prediction
            and self.label == other.label
            and self.oracle == other.oracle
            and self.meta == other.meta
        )


def sample_set(params: BernoulliParams, rng: np.random.Generator) -> LabelSet:
    """Draw one set, including label ``j`` independently with probability ``b[j]``."""
    u = rng.random(params.k)
    return LabelSet(tuple(np.flatnonzero(u < params.b).tolist()), params.k)


def sample_sets(params: BernoulliParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` sets at once as an ``(n, K)`` boolean membership matrix."""
    return rng.random((n, params.k)) < params.b


def expected_size(params: BernoulliParams) -> float:
    return float(np.sum(params.b))


def expected_coverage(params: BernoulliParams, dist: ProbabilityVector | np.ndarray) -> float:
    """Probability that a label drawn from ``dist`` lands in the set."""
    p = dist.probs if isinstance(dist, ProbabilityVector) else np.asarray(dist, dtype=float)
    if p.shape != params.b.shape:
        raise ValueError(f"dimension mismatch: {params.k} params vs {p.shape[0]} probabilities")
    return float(params.b @ p)
