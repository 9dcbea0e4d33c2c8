import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyflow.flow import CriticalCluster, StepRecord
from polyflow.io import (
    DocumentError,
    PolygonDocument,
    TrajectoryWriter,
    TruncatedStream,
    iter_trajectory,
    read_clusters,
    read_polygon,
    read_trajectory,
    write_clusters,
    write_polygon,
)

coords = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(coords, coords), min_size=3, max_size=12))
def test_polygon_round_trip_is_bitwise(pairs):
    z = np.array([complex(x, y) for x, y in pairs])
    doc = PolygonDocument(z, meta={"seed": 3})
    back = PolygonDocument.from_dict(json.loads(json.dumps(doc.to_dict())))
    assert np.array_equal(back.vertices, z)
    assert back.meta == {"seed": 3}


def test_polygon_file_round_trip(tmp_path, rng):
    z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    ell = rng.uniform(0.5, 2, 5)
    write_polygon(tmp_path / "p.json", PolygonDocument(z, ell))
    doc = read_polygon(tmp_path / "p.json")
    assert np.array_equal(doc.vertices, z) and np.array_equal(doc.lengths, ell)


@pytest.mark.parametrize(
    "data",
    [
        [1, 2],
        {"vertices": [[0, 0], [1, 0], [0, 1]]},
        {"n": 4, "vertices": [[0, 0], [1, 0], [0, 1]]},
        {"n": 3.0, "vertices": [[0, 0], [1, 0], [0, 1]]},
        {"n": 2, "vertices": [[0, 0], [1, 0]]},
        {"n": 3, "vertices": [[0, 0], [1, 0], [0]]},
        {"n": 3, "vertices": [[0, 0], [1, 0], [0, 1]], "lengths": [1, 1]},
        {"n": 3, "vertices": [[0, 0], [1, 0], [0, 1]], "lengths": [1, -1, 1]},
    ],
)
def test_invalid_documents(data):
    with pytest.raises(DocumentError):
        PolygonDocument.from_dict(data)


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3,,}')
    with pytest.raises(DocumentError):
        read_polygon(path)


def record(step, dp=0.5, residual=0.1):
    return StepRecord(step, 1.0 + step, residual, dp, 1e-12, 0.01)


def test_trajectory_stream_round_trip(tmp_path):
    path = tmp_path / "t.jsonl"
    with open(path, "w") as fh:
        w = TrajectoryWriter(fh, {"lengths": [1, 1, 1]})
        w.write(record(0, dp=math.inf), vertices=np.array([0, 1, 1j]))
        w.write(record(1, residual=float("nan")))
    header, recs = read_trajectory(path)
    assert header["type"] == "header" and header["lengths"] == [1, 1, 1]
    assert recs[0]["developed_perimeter"] == math.inf
    assert np.array_equal(recs[0]["vertices"], [0, 1, 1j])
    assert recs[1]["residual"] is None
    assert '"inf"' in path.read_text()


def test_truncated_stream_keeps_earlier_lines():
    buf = io.StringIO()
    w = TrajectoryWriter(buf, {})
    for k in range(3):
        w.write(record(k))
    text = buf.getvalue()
    cut = text[: len(text) - 10]
    with pytest.raises(TruncatedStream) as info:
        list(iter_trajectory(io.StringIO(cut).readlines()))
    assert [r["step"] for r in info.value.records] == [0, 1]
    assert info.value.header["type"] == "header"
    # a complete line that merely lacks its newline is reported too
    with pytest.raises(TruncatedStream):
        list(iter_trajectory(io.StringIO(text.rstrip("\n")).readlines()))


def test_stream_needs_header():
    with pytest.raises(DocumentError):
        list(iter_trajectory(['{"step": 0}\n']))


def test_cluster_file(tmp_path):
    c = CriticalCluster(np.array([0, 1, 1j]), [0.5, 0.5], 1e-10)
    write_clusters(tmp_path / "c.json", [c], [1, 1, 1], 1, 2, extra={"seed": 4})
    data = read_clusters(tmp_path / "c.json")
    assert data["delta_n"] == 1 and data["betti_sum_bound"] == 2 and data["seed"] == 4
    (cl,) = data["clusters"]
    assert cl["count"] == 2 and cl["area"] == 0.5
    assert np.array_equal(cl["vertices"], [0, 1, 1j])
