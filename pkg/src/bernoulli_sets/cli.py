"""Command-line entry point: ``bernoulli-sets <command> ...``.

Data goes to ``--out`` (or stdout); warnings go to stderr. Exit codes:
0 success, 2 invalid input, 3 I/O failure, 4 saturated calibration when
``--strict-saturation`` is given.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .calibrate import calibrate_risk_control, conservative_threshold
from .core import make_probability_vector, sample_set
from .credal import TvBall, estimate_tukey_depth, tv_ball_corners, tv_distance
from .data import (
    FormatError,
    gen_aps_synthetic,
    gen_tv_synthetic,
    load_params,
    load_predictions,
    write_metrics,
    write_params,
    write_predictions,
)
from .metrics import (
    au_eu_heatmap,
    eusc_groups,
    groupwise_worst_coverage,
    ssc_groups,
    summary_metrics,
    uncertainty_decomposition,
)
from .sets import params_for

log = logging.getLogger("bernoulli_sets")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_SATURATED = 4

MODES = ("bps", "aps", "bps-nom", "aps-nom")


class Saturated(Exception):
    pass


@dataclass
class RunConfig:
    alpha: float = 0.1
    mode: str = "bps"
    conservative: bool = False
    seed: int = 0
    tol: float = 1e-6
    bins: int = 10
    jobs: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if self.tol <= 0:
            raise ValueError("--tol must be positive")
        if self.bins < 1:
            raise ValueError("--bins must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"--mode must be one of {MODES}")

    @property
    def base_mode(self) -> str:
        return self.mode.split("-")[0]

    @property
    def nominal(self) -> bool:
        return self.mode.endswith("-nom")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(**{f: getattr(args, f) for f in cls.__dataclass_fields__ if hasattr(args, f)})


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _text(path: str):
    import io
    return io.StringIO(_read(path).decode("utf-8"))


@contextlib.contextmanager
def _out(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _map(fn, items, jobs: int):
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def cmd_calibrate(args) -> int:
    cfg = RunConfig.from_args(args)
    raw = _read(args.inp)
    ds = load_predictions(_text(args.inp))
    if any(r.label is None for r in ds):
        raise ValueError("calibration file has records without a label")
    doc = {
        "alpha": cfg.alpha,
        "mode": cfg.mode,
        "conservative": cfg.conservative,
        "tol": cfg.tol,
        "k": ds.k,
        "n": len(ds),
        "input_sha256": hashlib.sha256(raw).hexdigest(),
    }
    if cfg.nominal:
        doc.update(t_cp=None, t=1.0 - cfg.alpha, saturated=False, iterations=0, ceiling=None, trace=[])
    else:
        mode = cfg.base_mode
        res = calibrate_risk_control(
            ds.calibration_pairs(), cfg.alpha, cfg.tol,
            params_fn=lambda pred, t: params_for(pred, t, mode), jobs=cfg.jobs,
        )
        t = conservative_threshold(res.t_star, cfg.alpha) if cfg.conservative else res.t_star
        doc.update(t_cp=res.t_star, t=t, saturated=res.saturated, iterations=res.iterations,
                   ceiling=res.ceiling, trace=[list(p) for p in res.trace])
        if res.saturated:
            log.warning("calibration saturated: ceiling %d unreachable with %d records; "
                        "using t=1 (full-support sets)", res.ceiling, len(ds))
    with _out(args.out) as fh:
        fh.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")
    if doc["saturated"] and args.strict_saturation:
        raise Saturated()
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = RunConfig.from_args(args)
    ds = load_predictions(_text(args.inp))
    meta = {"mode": cfg.mode, "alpha": cfg.alpha, "seed": cfg.seed, "saturated": False}
    if cfg.nominal:
        t = 1.0 - cfg.alpha
    elif args.calibration is not None:
        doc = json.loads(_read(args.calibration))
        if doc.get("k") != ds.k:
            raise ValueError(f"calibration was fit on k={doc.get('k')}, input has k={ds.k}")
        if doc.get("mode") != cfg.mode:
            raise ValueError(f"calibration was fit in mode {doc.get('mode')!r}, predicting in {cfg.mode!r}")
        t = float(doc["t"])
        meta.update(alpha=doc["alpha"], saturated=bool(doc["saturated"]),
                    calibration_sha256=doc.get("input_sha256"))
    elif args.t is not None:
        t = args.t
    else:
        raise ValueError("need --t or --calibration (or a -nom mode)")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"coverage target must lie in [0, 1], got {t}")
    meta["t"] = t
    mode = cfg.base_mode
    params = _map(lambda pred: params_for(pred, t, mode), ds.predictions, cfg.jobs)
    sets = None
    if args.sample:
        rng = np.random.default_rng(cfg.seed)
        sets = [sample_set(p, rng) for p in params]
    with _out(args.out) as fh:
        write_params(fh, ds.ids, params, k=ds.k, meta=meta, sets=sets)
    return EXIT_OK


def evaluate(ids, params, meta, truth, bins: int = 10, heatmap_bins: int = 10):
    """Metrics document and heatmap for parameters aligned to ``truth`` by id."""
    by_id = {r.id: r for r in truth}
    if sorted(ids) != sorted(by_id):
        missing = set(ids) ^ set(by_id)
        raise ValueError(f"ids differ between parameter and truth files, e.g. {sorted(missing)[:3]}")
    records = [by_id[i] for i in ids]
    if any(r.label is None for r in records):
        raise ValueError("truth file has records without a label")
    labels = np.array([r.label for r in records])
    oracles = [r.oracle for r in records] if all(r.oracle is not None for r in records) else None
    doc = dict(summary_metrics(params, labels, oracles))
    ssc, ssc_per = groupwise_worst_coverage(params, labels, ssc_groups(params))
    triples = [uncertainty_decomposition(r.prediction) for r in records]
    eu = [t.epistemic for t in triples]
    eusc, eusc_per = groupwise_worst_coverage(params, labels, eusc_groups(eu, bins))
    doc.update(ssc=ssc, eusc=eusc, ssc_groups=ssc_per, eusc_groups=eusc_per, n=len(ids), bins=bins)
    for key in ("t", "saturated", "seed", "mode", "alpha"):
        if key in meta:
            doc["t_star" if key == "t" else key] = meta[key]
    heat = au_eu_heatmap(triples, params, labels, heatmap_bins)
    return doc, heat


def cmd_evaluate(args) -> int:
    ids, params, meta = load_params(_text(args.params))
    truth = load_predictions(_text(args.truth))
    doc, heat = evaluate(ids, params, meta, truth, args.bins, args.heatmap_bins)
    with _out(args.out) as fh:
        write_metrics(fh, doc)
    if args.heatmap:
        with open(args.heatmap, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["au_bin", "eu_bin", "au_lo", "au_hi", "eu_lo", "eu_hi", "count", "coverage"])
            for row in heat.rows():
                *head, count, cov = row
                w.writerow([*(repr(float(v)) if isinstance(v, float) else v for v in head),
                            count, "" if count == 0 else repr(cov)])
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.generator == "tv":
        credal, centers = gen_tv_synthetic(args.n, args.k or 3, args.d, args.seed)
        with _out(args.out) as fh:
            write_predictions(fh, credal)
        if args.centers_out:
            with _out(args.centers_out) as fh:
                write_predictions(fh, centers)
    else:
        ds = gen_aps_synthetic(args.n, args.k or 10, args.seed, args.noise, args.m)
        log.info("aps-synth labels use softmax(x @ beta) in place of the raw ratio z_j / sum(z)")
        with _out(args.out) as fh:
            write_predictions(fh, ds)
    return EXIT_OK


def cmd_vertices(args) -> int:
    p = make_probability_vector([float(v) for v in args.p.split(",")])
    if not 0.0 < args.d < 1.0:
        raise ValueError("--d must lie in (0, 1)")
    ball = TvBall(p, args.d)
    seen: list[np.ndarray] = []
    with _out(args.out) as fh:
        for c in tv_ball_corners(ball):
            if any(np.max(np.abs(c.point - q)) <= 1e-12 for q in seen):
                continue
            seen.append(c.point)
            fh.write(json.dumps({"gain": c.gain, "loss": c.loss, "eta": c.eta,
                                 "vertex": c.point.tolist(), "tv": tv_distance(p, c.point)}) + "\n")
    return EXIT_OK


def cmd_depth(args) -> int:
    ds = load_predictions(_text(args.inp))
    rng = np.random.default_rng(args.seed)
    with _out(args.out) as fh:
        for r in ds:
            if r.oracle is None:
                raise ValueError(f"record {r.id!r} has no oracle to measure depth of")
            depth = estimate_tukey_depth(r.oracle, r.prediction, args.directions, rng)
            fh.write(json.dumps({"id": r.id, "depth": depth}) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bernoulli-sets", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *, alpha=True, mode=True):
        if alpha:
            p.add_argument("--alpha", type=float, default=0.1)
        if mode:
            p.add_argument("--mode", choices=MODES, default="bps")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("calibrate", help="fit the coverage target on labeled predictions")
    common(p)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--conservative", action="store_true", help="never go below 1 - alpha")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict-saturation", action="store_true", help="exit 4 when saturated")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("predict", help="inclusion probabilities for every record")
    common(p)
    p.add_argument("--in", dest="inp", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t", type=float, default=None, help="coverage target")
    g.add_argument("--calibration", default=None, help="document written by calibrate")
    p.add_argument("--sample", action="store_true", help="also draw one set per record")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="coverage and size metrics")
    p.add_argument("--params", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--bins", type=int, default=10, help="EU bins for EUSC")
    p.add_argument("--heatmap-bins", type=int, default=10)
    p.add_argument("--heatmap", default=None, help="CSV path for the AU/EU grid")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="write a synthetic prediction file")
    common(p, alpha=False, mode=False)
    p.add_argument("--generator", choices=("tv", "aps-synth"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--d", type=float, default=0.1, help="TV radius (tv)")
    p.add_argument("--noise", type=float, default=0.0, help="logit noise (aps-synth)")
    p.add_argument("--m", type=int, default=1, help="predictions per record (aps-synth)")
    p.add_argument("--centers-out", default=None, help="ball centers as 1-vertex file (tv)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("vertices", help="corner points of a TV ball")
    p.add_argument("--p", required=True, help="comma-separated distribution")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("depth", help="Tukey depth of each oracle among its vertices")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--directions", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_depth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except Saturated:
        return EXIT_SATURATED
    except (FormatError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"error: {e.filename or ''}: {e.strerror or e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
