"""Line-oriented JSON I/O, seeded splitting and synthetic generators.

Prediction file::

    {"k": K, "meta": {...}}
    {"id": "...", "preds": [[K floats], ...], "label": 3, "oracle": [K floats]}

``label``, ``oracle`` and ``meta`` are optional per record. Parameter files
share the header and carry ``{"id": ..., "b": [K floats]}`` rows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Sequence

import numpy as np

from .core import (
    BernoulliParams,
    DatasetRecord,
    LabelSet,
    ProbabilityVector,
    SecondOrderPrediction,
    make_probability_vector,
)
from .credal import TvBall, sample_in_tv_ball, tv_ball_vertices

N_FEATURES = 10


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(eq=False)
class Dataset:
    records: list[DatasetRecord]
    k: int
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for r in self.records:
            if r.prediction.k != self.k:
                raise ValueError(f"record {r.id!r} has {r.prediction.k} labels, dataset has {self.k}")
            if r.id in seen:
                raise ValueError(f"duplicate id {r.id!r}")
            seen.add(r.id)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.k == other.k and self.meta == other.meta and self.records == other.records

    @property
    def labels(self) -> np.ndarray:
        if any(r.label is None for r in self.records):
            raise ValueError("dataset has unlabeled records")
        return np.array([r.label for r in self.records], dtype=int)

    @property
    def oracles(self) -> list[ProbabilityVector] | None:
        if not self.records or any(r.oracle is None for r in self.records):
            return None
        return [r.oracle for r in self.records]

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    @property
    def predictions(self) -> list[SecondOrderPrediction]:
        return [r.prediction for r in self.records]

    def calibration_pairs(self) -> list[tuple[SecondOrderPrediction, int]]:
        return list(zip(self.predictions, self.labels.tolist()))


def _dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False)


def _record_to_json(r: DatasetRecord) -> dict:
    out: dict[str, Any] = {"id": r.id, "preds": r.prediction.vertices.tolist()}
    if r.label is not None:
        out["label"] = int(r.label)
    if r.oracle is not None:
        out["oracle"] = r.oracle.probs.tolist()
    if r.meta:
        out["meta"] = r.meta
    return out


def write_predictions(stream: IO[str], ds: Dataset) -> None:
    stream.write(_dumps({"k": ds.k, "meta": ds.meta}) + "\n")
    for r in ds.records:
        stream.write(_dumps(_record_to_json(r)) + "\n")


def _read_header(lines, what: str) -> tuple[int | None, dict, int]:
    for lineno, line in lines:
        if not line.strip():
            continue
        try:
            head = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(f"malformed header: {e.msg}", lineno) from None
        if not isinstance(head, dict) or "k" not in head:
            raise FormatError(f"{what} header must be an object with a 'k' field", lineno)
        k = head["k"]
        if k is not None and (not isinstance(k, int) or k < 2):
            raise FormatError(f"invalid k {k!r}", lineno)
        return k, dict(head.get("meta") or {}), lineno
    raise FormatError(f"empty {what} file")


def load_predictions(stream: IO[str]) -> Dataset:
    """Parse a prediction file, validating every row.

    Raises
    ------
    FormatError
        On malformed JSON, a dimension that disagrees with the header, a
        duplicate id, an out-of-range label or an invalid distribution. The
        message carries the 1-based line number.
    """
    lines = enumerate(stream, start=1)
    k, meta, _ = _read_header(lines, "prediction")
    if k is None:
        raise FormatError("prediction header needs an integer k", 1)
    records: list[DatasetRecord] = []
    seen: set[str] = set()
    for lineno, line in lines:
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            rid = str(row["id"])
            preds = row["preds"]
            if not isinstance(preds, list) or not preds:
                raise ValueError("'preds' must be a nonempty list of vectors")
            for v in preds:
                if len(v) != k:
                    raise ValueError(f"vector of length {len(v)}, header says k={k}")
            prediction = SecondOrderPrediction.from_vectors(preds)
            oracle = row.get("oracle")
            if oracle is not None:
                if len(oracle) != k:
                    raise ValueError(f"oracle of length {len(oracle)}, header says k={k}")
                oracle = make_probability_vector(oracle)
            label = row.get("label")
            if label is not None and (not isinstance(label, int) or isinstance(label, bool)):
                raise ValueError(f"label must be an integer, got {label!r}")
            if rid in seen:
                raise ValueError(f"duplicate id {rid!r}")
            record = DatasetRecord(rid, prediction, label, oracle, dict(row.get("meta") or {}))
        except json.JSONDecodeError as e:
            raise FormatError(f"malformed JSON: {e.msg}", lineno) from None
        except (KeyError, TypeError) as e:
            raise FormatError(f"missing or mistyped field: {e}", lineno) from None
        except ValueError as e:
            raise FormatError(str(e), lineno) from None
        seen.add(rid)
        records.append(record)
    return Dataset(records, k, meta)


def write_params(stream: IO[str], ids: Sequence[str], params_list: Sequence[BernoulliParams],
                 k: int | None = None, meta: dict | None = None,
                 sets: Sequence[LabelSet] | None = None) -> None:
    if len(ids) != len(params_list):
        raise ValueError("ids and parameter vectors differ in length")
    if k is None and params_list:
        k = params_list[0].k
    stream.write(_dumps({"k": k, "meta": meta or {}}) + "\n")
    for n, (rid, p) in enumerate(zip(ids, params_list)):
        row: dict[str, Any] = {"id": rid, "b": p.b.tolist()}
        if sets is not None:
            row["set"] = list(sets[n].members)
        stream.write(_dumps(row) + "\n")


def load_params(stream: IO[str]) -> tuple[list[str], list[BernoulliParams], dict]:
    lines = enumerate(stream, start=1)
    k, meta, _ = _read_header(lines, "parameter")
    ids, params = [], []
    for lineno, line in lines:
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            b = BernoulliParams(row["b"])
            if k is not None and b.k != k:
                raise ValueError(f"vector of length {b.k}, header says k={k}")
            ids.append(str(row["id"]))
            params.append(b)
        except json.JSONDecodeError as e:
            raise FormatError(f"malformed JSON: {e.msg}", lineno) from None
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(str(e), lineno) from None
    meta.setdefault("k", k)
    return ids, params, meta


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, np.generic):
        return _clean(v.item())
    if isinstance(v, dict):
        return {str(a): _clean(b) for a, b in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def write_metrics(stream: IO[str], record: dict) -> None:
    """One JSON object, keys sorted; non-finite floats become null."""
    stream.write(json.dumps(_clean(record), indent=2, sort_keys=True, allow_nan=False) + "\n")


def split(ds: Dataset, fractions: Sequence[float], seed) -> list[Dataset]:
    """Seeded shuffle, then contiguous blocks of the requested fractions."""
    n = len(ds)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    fr = np.asarray(fractions, dtype=float)
    if fr.size == 0 or np.any(fr <= 0) or abs(fr.sum() - 1.0) > 1e-9:
        raise ValueError(f"fractions must be positive and sum to 1, got {list(fractions)}")
    perm = np.random.default_rng(seed).permutation(n)
    bounds = np.concatenate([[0], np.round(np.cumsum(fr) * n).astype(int)])
    bounds[-1] = n
    parts = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        parts.append(Dataset([ds.records[i] for i in perm[a:b]], ds.k, dict(ds.meta)))
    return parts


def _draw_label(rng: np.random.Generator, p: np.ndarray) -> int:
    cdf = np.cumsum(p)
    y = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    y = min(y, p.shape[0] - 1)
    while p[y] == 0:  # float edge at the top of the cdf
        y -= 1
    return y


def gen_tv_synthetic(n: int, k: int = 3, d: float = 0.1, seed=0) -> tuple[Dataset, Dataset]:
    """Valid credal sets from total-variation balls.

    Centers are Dirichlet(1); each record's prediction is the ball's corner
    points, its oracle a random point of the corner hull and its label a draw
    from the oracle. The second dataset holds the same records with the
    center as the only vertex.
    """
    if n < 1 or k < 2 or not 0.0 < d < 1.0:
        raise ValueError(f"invalid generator parameters n={n}, k={k}, d={d}")
    rng = np.random.default_rng(seed)
    meta = {"generator": "tv", "n": n, "k": k, "d": d, "seed": seed,
            "center_law": "dirichlet(1)", "oracle_law": "dirichlet(1) mixture of ball corners"}
    width = len(str(n - 1))
    credal, centers = [], []
    for i in range(n):
        center = make_probability_vector(rng.dirichlet(np.ones(k)))
        ball = TvBall(center, d)
        oracle = sample_in_tv_ball(ball, rng)
        y = _draw_label(rng, oracle.probs)
        rid = f"tv-{i:0{width}d}"
        credal.append(DatasetRecord(rid, tv_ball_vertices(ball), y, oracle))
        centers.append(DatasetRecord(rid, SecondOrderPrediction(center.probs[None, :]), y, oracle))
    return Dataset(credal, k, meta), Dataset(centers, k, {**meta, "role": "centers"})


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def gen_aps_synthetic(n: int, k: int = 10, seed=0, noise: float = 0.0, m: int = 1) -> Dataset:
    """Features with ``x1 = 1`` w.p. 1/20 (else -8) and nine standard normals;
    labels follow ``softmax(x @ beta)`` with one Gaussian ``beta`` per dataset.

    The raw ratio ``z_j / sum(z)`` is not a distribution once ``z`` goes
    negative, hence the softmax. Predictions are ``m`` softmaxes of the
    logits plus ``noise``-scaled Gaussian perturbations; with the defaults the
    single prediction equals the oracle.
    """
    if n < 1 or k < 2 or m < 1 or noise < 0:
        raise ValueError(f"invalid generator parameters n={n}, k={k}, m={m}, noise={noise}")
    rng = np.random.default_rng(seed)
    beta = rng.standard_normal((N_FEATURES, k))
    x = np.empty((n, N_FEATURES))
    x[:, 0] = np.where(rng.random(n) < 1 / 20, 1.0, -8.0)
    x[:, 1:] = rng.standard_normal((n, N_FEATURES - 1))
    logits = x @ beta
    oracle = _softmax(logits)
    meta = {"generator": "aps-synth", "n": n, "k": k, "seed": seed, "noise": noise, "m": m,
            "normalization": "softmax", "beta": beta.tolist()}
    width = len(str(n - 1))
    records = []
    for i in range(n):
        p = make_probability_vector(oracle[i])
        y = _draw_label(rng, p.probs)
        if noise == 0 and m == 1:
            preds = [p.probs]
        else:
            preds = list(_softmax(logits[i] + noise * rng.standard_normal((m, k))))
        rec_meta = {"x1_group": int(x[i, 0] == 1.0), "x": x[i].tolist()}
        records.append(DatasetRecord(f"aps-{i:0{width}d}", SecondOrderPrediction.from_vectors(preds),
                                     y, p, rec_meta))
    return Dataset(records, k, meta)
