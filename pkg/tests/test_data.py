import io
import json

import numpy as np
import pytest

from bernoulli_sets import BernoulliParams, LabelSet
from bernoulli_sets.credal import tv_distance
from bernoulli_sets.data import (
    FormatError,
    gen_aps_synthetic,
    gen_tv_synthetic,
    load_params,
    load_predictions,
    split,
    write_metrics,
    write_params,
    write_predictions,
)


def parse(text):
    return load_predictions(io.StringIO(text))


HEADER = '{"k": 3, "meta": {"source": "test"}}\n'


def test_load_one_record():
    ds = parse(HEADER + '{"id": "a", "preds": [[0.5, 0.2, 0.3], [0.4, 0.3, 0.3]], "label": 1}\n')
    assert len(ds) == 1 and ds.k == 3 and ds.meta == {"source": "test"}
    r = ds[0]
    assert r.prediction.m == 2 and r.label == 1 and r.oracle is None


@pytest.mark.parametrize("line,msg", [
    ('{"id": "a", "preds": [[0.5, 0.2, 0.5]]}', "sum"),
    ('{"id": "a", "preds": [[0.5, 0.5]]}', "length 2"),
    ('{"id": "a", "preds": [[0.5, 0.2, 0.3]], "label": 3}', "label"),
    ('{"id": "a", "preds": [[0.5, 0.2, 0.3]], "label": 1.5}', "integer"),
    ('{"id": "a", "preds": [[0.5, 0.2, 0.3]], "oracle": [1, 0]}', "oracle"),
    ('{"id": "a", "preds": []}', "nonempty"),
    ('{"id": "a"}', "preds"),
    ('{"id": "a", "preds": [[0.5, 0.2, 0.3]]', "malformed"),
])
def test_bad_rows_name_the_line(line, msg):
    with pytest.raises(FormatError, match=msg) as err:
        parse(HEADER + '{"id": "ok", "preds": [[1, 0, 0]]}\n' + line + "\n")
    assert err.value.line == 3


def test_duplicate_id():
    row = '{"id": "a", "preds": [[1, 0, 0]]}\n'
    with pytest.raises(FormatError, match="duplicate"):
        parse(HEADER + row + row)


def test_bad_headers():
    with pytest.raises(FormatError):
        parse("")
    with pytest.raises(FormatError):
        parse('{"meta": {}}\n')
    with pytest.raises(FormatError):
        parse('{"k": 1}\n')


def roundtrip(ds):
    buf = io.StringIO()
    write_predictions(buf, ds)
    buf.seek(0)
    return load_predictions(buf)


def test_roundtrip_generators():
    credal, centers = gen_tv_synthetic(50, 4, 0.2, seed=3)
    assert roundtrip(credal) == credal
    assert roundtrip(centers) == centers
    aps = gen_aps_synthetic(40, 6, seed=1, noise=0.5, m=3)
    assert roundtrip(aps) == aps


def test_split_sizes_and_determinism():
    ds = gen_aps_synthetic(10, 3, seed=0)
    a, b = split(ds, [0.2, 0.8], seed=5)
    assert (len(a), len(b)) == (2, 8)
    assert sorted(a.ids + b.ids) == sorted(ds.ids)
    again = split(ds, [0.2, 0.8], seed=5)
    assert again[0].ids == a.ids and again[1].ids == b.ids
    (whole,) = split(ds, [1.0], seed=0)
    assert sorted(whole.ids) == sorted(ds.ids)
    big = gen_aps_synthetic(997, 3, seed=0)
    parts = split(big, [0.5, 0.1, 0.4], seed=1)
    for part, f in zip(parts, [0.5, 0.1, 0.4]):
        assert abs(len(part) - f * 997) < 1


def test_split_errors():
    ds = gen_aps_synthetic(10, 3, seed=0)
    with pytest.raises(ValueError):
        split(ds, [0.5, 0.4], seed=0)
    with pytest.raises(ValueError):
        split(ds, [1.2, -0.2], seed=0)


def test_tv_generator_validity_and_determinism():
    credal, centers = gen_tv_synthetic(300, 3, 0.1, seed=0)
    again, _ = gen_tv_synthetic(300, 3, 0.1, seed=0)
    assert credal == again
    for r, c in zip(credal, centers):
        assert c.prediction.m == 1
        assert tv_distance(c.prediction.vertices[0], r.oracle) <= 0.1 + 1e-12
        assert r.oracle.probs[r.label] > 0
        assert r.id == c.id and r.label == c.label
    with pytest.raises(ValueError):
        gen_tv_synthetic(0, 3, 0.1)
    with pytest.raises(ValueError):
        gen_tv_synthetic(10, 3, 0.0)


def test_tiny_radius_oracle_is_center():
    credal, centers = gen_tv_synthetic(20, 3, 1e-9, seed=0)
    for r, c in zip(credal, centers):
        assert tv_distance(r.oracle, c.prediction.vertices[0]) <= 1e-9


def test_aps_generator():
    ds = gen_aps_synthetic(4000, 10, seed=0)
    assert len(ds) == 4000 and ds.k == 10
    assert ds.meta["normalization"] == "softmax"
    assert np.array(ds.meta["beta"]).shape == (10, 10)
    r = ds[0]
    assert len(r.meta["x"]) == 10 and r.meta["x1_group"] in (0, 1)
    assert r.prediction.m == 1 and np.array_equal(r.prediction.vertices[0], r.oracle.probs)
    again = gen_aps_synthetic(4000, 10, seed=0)
    assert again == ds


def test_aps_generator_x1_law():
    ds = gen_aps_synthetic(100_000, 3, seed=11)
    share = np.mean([r.meta["x1_group"] for r in ds])
    assert abs(share - 0.05) <= 0.003
    xs = {r.meta["x"][0] for r in ds}
    assert xs == {1.0, -8.0}


def test_params_roundtrip():
    ids = ["a", "b"]
    params = [BernoulliParams([1 / 3, 0.1 + 0.2, 1.0]), BernoulliParams([0.0, 2 / 7, 1e-17])]
    buf = io.StringIO()
    write_params(buf, ids, params, meta={"t": 0.9}, sets=[LabelSet((0,), 3), LabelSet((), 3)])
    buf.seek(0)
    got_ids, got, meta = load_params(buf)
    assert got_ids == ids and all(a == b for a, b in zip(got, params))
    assert meta["t"] == 0.9 and meta["k"] == 3


def test_params_empty_is_header_only():
    buf = io.StringIO()
    write_params(buf, [], [], k=4)
    assert buf.getvalue().count("\n") == 1
    buf.seek(0)
    assert load_params(buf)[:2] == ([], [])


def test_params_revalidated_on_read():
    with pytest.raises(FormatError):
        load_params(io.StringIO('{"k": 2}\n{"id": "a", "b": [0.5, 1.5]}\n'))


def test_write_metrics_flat_json():
    buf = io.StringIO()
    write_metrics(buf, {"marg_cvg": 0.9, "cond": float("nan"), "eusc_groups": {0: 0.8}})
    doc = json.loads(buf.getvalue())
    assert doc == {"marg_cvg": 0.9, "cond": None, "eusc_groups": {"0": 0.8}}
