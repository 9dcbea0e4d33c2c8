"""JSON polygon documents, JSON-lines trajectories and cluster files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator

import numpy as np

from .cyclic import MIN_VERTICES

INF_SENTINEL = "inf"


class DocumentError(ValueError):
    """A file parsed but does not satisfy the document invariants."""


class TruncatedStream(ValueError):
    """The last line of a trajectory stream is incomplete."""

    def __init__(self, message: str, header: dict, records: list[dict]):
        super().__init__(message)
        self.header = header
        self.records = records


# --------------------------------------------------------------------------
# polygon documents
# --------------------------------------------------------------------------


@dataclass
class PolygonDocument:
    vertices: np.ndarray
    lengths: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=complex).reshape(-1)
        if len(self.vertices) < MIN_VERTICES:
            raise DocumentError(f"a polygon needs at least {MIN_VERTICES} vertices")
        if not np.all(np.isfinite(self.vertices)):
            raise DocumentError("vertex coordinates must be finite")
        if self.lengths is not None:
            self.lengths = np.asarray(self.lengths, dtype=float).reshape(-1)
            if len(self.lengths) != len(self.vertices):
                raise DocumentError(
                    f"lengths has {len(self.lengths)} entries but n = {len(self.vertices)}"
                )
            if not np.all(self.lengths > 0) or not np.all(np.isfinite(self.lengths)):
                raise DocumentError("lengths must be finite and positive")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> dict:
        out = {"n": self.n, "vertices": vertices_to_pairs(self.vertices)}
        if self.lengths is not None:
            out["lengths"] = [float(x) for x in self.lengths]
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_dict(cls, data) -> "PolygonDocument":
        if not isinstance(data, dict):
            raise DocumentError("polygon document must be a JSON object")
        for key in ("n", "vertices"):
            if key not in data:
                raise DocumentError(f"missing field {key!r}")
        n, verts = data["n"], data["vertices"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise DocumentError("field 'n' must be an integer")
        if not isinstance(verts, list) or len(verts) != n:
            raise DocumentError(f"'vertices' must be a list of n = {n} points")
        return cls(
            vertices=pairs_to_vertices(verts),
            lengths=data.get("lengths"),
            meta=data.get("meta") or {},
        )


def vertices_to_pairs(z) -> list[list[float]]:
    # json writes floats with repr(), i.e. the shortest round-tripping decimal
    return [[float(v.real), float(v.imag)] for v in np.asarray(z, dtype=complex)]


def pairs_to_vertices(pairs) -> np.ndarray:
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"vertices must be [x, y] number pairs ({exc})") from None
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DocumentError("vertices must be [x, y] number pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def write_polygon(path, doc: PolygonDocument) -> None:
    Path(path).write_text(json.dumps(doc.to_dict(), indent=1) + "\n", encoding="utf-8")


def read_polygon(path) -> PolygonDocument:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: malformed JSON ({exc})") from None
    return PolygonDocument.from_dict(data)


# --------------------------------------------------------------------------
# trajectory streams
# --------------------------------------------------------------------------


def _encode_float(x: float):
    if math.isinf(x) and x > 0:
        return INF_SENTINEL
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} cannot be serialized")
    return float(x)


def record_to_dict(rec, vertices=None) -> dict:
    out = {
        "step": int(rec.step),
        "area": _encode_float(rec.area),
        "residual": _encode_float(rec.residual) if math.isfinite(rec.residual) else None,
        "developed_perimeter": _encode_float(rec.developed_perimeter),
        "membership_residual": _encode_float(rec.membership_residual),
        "dt": _encode_float(rec.dt),
    }
    if vertices is not None:
        out["vertices"] = vertices_to_pairs(vertices)
    return out


class TrajectoryWriter:
    """Append-only JSON-lines writer: one header line, then one line per step."""

    def __init__(self, fh: IO[str], header: dict):
        self._fh = fh
        self._write({"type": "header", **header})

    def _write(self, obj: dict) -> None:
        self._fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
        self._fh.flush()

    def write(self, rec, vertices=None) -> None:
        self._write(record_to_dict(rec, vertices))


def _decode_record(obj: dict) -> dict:
    dp = obj.get("developed_perimeter")
    if dp == INF_SENTINEL:
        obj["developed_perimeter"] = math.inf
    elif not isinstance(dp, (int, float)):
        raise DocumentError(f"bad developed_perimeter {dp!r}")
    if "vertices" in obj:
        obj["vertices"] = pairs_to_vertices(obj["vertices"])
    return obj


def iter_trajectory(lines) -> Iterator[dict]:
    """Yield the header, then the records of a trajectory stream.

    A last line that lacks its newline or does not parse raises
    :class:`TruncatedStream` carrying everything read before it.
    """
    header: dict | None = None
    records: list[dict] = []
    lines = list(lines)
    for k, line in enumerate(lines):
        last = k == len(lines) - 1
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            if last:
                raise TruncatedStream(
                    f"truncated final line {k + 1}", header or {}, records
                ) from None
            raise DocumentError(f"line {k + 1} is not valid JSON") from None
        if last and not line.endswith("\n"):
            raise TruncatedStream(f"final line {k + 1} has no newline", header or {}, records)
        if header is None:
            if obj.get("type") != "header":
                raise DocumentError("trajectory stream must start with a header line")
            header = obj
            yield obj
            continue
        rec = _decode_record(obj)
        records.append(rec)
        yield rec


def read_trajectory(path) -> tuple[dict, list[dict]]:
    with open(path, encoding="utf-8") as fh:
        items = list(iter_trajectory(fh.readlines()))
    if not items:
        raise DocumentError(f"{path}: empty trajectory stream")
    return items[0], items[1:]


# --------------------------------------------------------------------------
# cluster files
# --------------------------------------------------------------------------


def clusters_to_dict(clusters, lengths, delta: int, betti: int) -> dict:
    return {
        "lengths": [float(x) for x in lengths],
        "clusters": [
            {
                "area": float(c.area),
                "count": int(c.count),
                "residual": float(c.residual),
                "vertices": vertices_to_pairs(c.representative),
            }
            for c in clusters
        ],
        "delta_n": int(delta),
        "betti_sum_bound": int(betti),
    }


def write_clusters(path, clusters, lengths, delta: int, betti: int, extra: dict | None = None) -> None:
    data = clusters_to_dict(clusters, lengths, delta, betti)
    if extra:
        data.update(extra)
    Path(path).write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")


def read_clusters(path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    for c in data.get("clusters", []):
        c["vertices"] = pairs_to_vertices(c["vertices"])
    return data
