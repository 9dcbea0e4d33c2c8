"""Planar polygon geometry in complex coordinates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .calculus import VertexField
from .errors import CollinearPoints, DuplicatePoints

COLLINEAR_TOL = 1e-9


class Infinity(enum.Enum):
    AT_INFINITY = "at_infinity"

    def __repr__(self):
        return "AT_INFINITY"


AT_INFINITY = Infinity.AT_INFINITY


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class CircleFit:
    circle: Circle
    relative_residual: float

    @property
    def center(self) -> complex:
        return self.circle.center

    @property
    def radius(self) -> float:
        return self.circle.radius


def as_vertices(z) -> np.ndarray:
    """Vertex array of a polygon given as a VertexField or any complex sequence."""
    if isinstance(z, VertexField):
        return z.values
    arr = np.asarray(z, dtype=complex).reshape(-1)
    return arr


def perimeter(z) -> float:
    z = as_vertices(z)
    return float(np.abs(np.roll(z, -1) - z).sum())


def diameter(z) -> float:
    z = as_vertices(z)
    return float(np.abs(z[:, None] - z[None, :]).max())


def oriented_area(z) -> float:
    """Signed area ``(1/4i) sum_k (z[k+1] - z[k-1]) conj(z[k])``."""
    z = as_vertices(z)
    s = ((np.roll(z, -1) - np.roll(z, 1)) * np.conj(z)).sum()
    return float((s / 4j).real)


def area_differential(z, t) -> float:
    """Derivative of the signed area at ``z`` in direction ``t``."""
    z = as_vertices(z)
    t = as_vertices(t)
    return float(0.5 * np.imag((np.roll(z, -1) - np.roll(z, 1)) * np.conj(t)).sum())


def _cc_formula(u, v, w):
    c = ((w - v) / np.conj(w - v) - (u - v) / np.conj(u - v)) / (w - u)
    return v + 1.0 / np.conj(c)


def circumcenter(u: complex, v: complex, w: complex, tol: float = COLLINEAR_TOL) -> complex:
    """Center of the circle through three points.

    Raises DuplicatePoints if two inputs coincide and CollinearPoints when the
    triple is flat relative to its own scale.
    """
    u, v, w = complex(u), complex(v), complex(w)
    scale = max(abs(u - v), abs(v - w), abs(w - u))
    if scale == 0 or min(abs(u - v), abs(v - w), abs(w - u)) <= 1e-15 * scale:
        raise DuplicatePoints(f"repeated point among {u}, {v}, {w}")
    det = (np.conj(u - v) * (w - v) - np.conj(w - v) * (u - v))
    if abs(det) <= tol * scale * scale:
        raise CollinearPoints(f"{u}, {v}, {w} are collinear")
    return complex(_cc_formula(u, v, w))


def _circumcenters(z: np.ndarray, tol: float = COLLINEAR_TOL) -> np.ndarray:
    """Vectorised circumcenters of (z[n-1], z[n], z[n+1]); NaN where degenerate."""
    u, v, w = np.roll(z, 1), z, np.roll(z, -1)
    d_uv, d_vw, d_wu = np.abs(u - v), np.abs(v - w), np.abs(w - u)
    scale = np.maximum(np.maximum(d_uv, d_vw), d_wu)
    det = np.abs(np.conj(u - v) * (w - v) - np.conj(w - v) * (u - v))
    bad = (np.minimum(np.minimum(d_uv, d_vw), d_wu) <= 1e-15 * scale) | (det <= tol * scale * scale)
    out = np.full(len(z), np.nan + 0j)
    ok = ~bad
    if ok.any():
        out[ok] = _cc_formula(u[ok], v[ok], w[ok])
    return out


def developed_polygon(z) -> list:
    """Circumcenters of consecutive vertex triples.

    Slot ``n`` holds the center of the circle through ``z[n-1], z[n], z[n+1]``
    or AT_INFINITY when that triple is collinear or has a repeated point.
    """
    centers = _circumcenters(as_vertices(z))
    return [AT_INFINITY if np.isnan(c) else complex(c) for c in centers]


def developed_perimeter(z) -> float:
    """Perimeter of the developed polygon; ``math.inf`` if a center is at infinity."""
    centers = _circumcenters(as_vertices(z))
    if np.isnan(centers).any():
        return math.inf
    return float(np.abs(np.roll(centers, -1) - centers).sum())


def _line_distances(z: np.ndarray) -> np.ndarray:
    pts = np.column_stack([z.real, z.imag])
    pts = pts - pts.mean(axis=0)
    _, vecs = np.linalg.eigh(pts.T @ pts)
    normal = vecs[:, 0]
    return np.abs(pts @ normal)


def is_collinear(z, tol: float = COLLINEAR_TOL) -> bool:
    """True when every vertex is within ``tol * diameter`` of the least-squares line."""
    z = as_vertices(z)
    d = diameter(z)
    if d == 0:
        return True
    return bool(_line_distances(z).max() <= tol * d)


def fit_circle(z) -> CircleFit:
    """Algebraic least-squares circle refined by one Gauss-Newton step."""
    z = as_vertices(z)
    if is_collinear(z):
        raise CollinearPoints("cannot fit a circle to collinear points")
    shift = z.mean()
    scale = diameter(z)
    p = (z - shift) / scale
    x, y = p.real, p.imag
    a = np.column_stack([2 * x, 2 * y, np.ones_like(x)])
    (cx, cy, c), *_ = np.linalg.lstsq(a, x * x + y * y, rcond=None)
    o = complex(cx, cy)
    r = math.sqrt(max(c + cx * cx + cy * cy, 0.0))

    d = np.abs(p - o)
    jac = np.column_stack([-(x - o.real) / d, -(y - o.imag) / d, -np.ones_like(x)])
    step, *_ = np.linalg.lstsq(jac, -(d - r), rcond=None)
    o += complex(step[0], step[1])
    r += step[2]

    center = shift + scale * o
    radius = scale * abs(r)
    resid = float(np.max(np.abs(np.abs(z - center) - radius)) / radius)
    return CircleFit(Circle(complex(center), float(radius)), resid)
