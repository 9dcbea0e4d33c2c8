"""Discrete calculus on the N-cycle.

Two layers live here.  The ndarray primitives (``dv2e``, ``ie2v``, ...) act on
plain complex arrays and are what the numerical code calls in its inner
loops.  The field layer (:class:`VertexField`, :class:`EdgeField` and the
operators ``D``, ``M``, ``I``, ``K``, ...) carries the kind and size of every
value and refuses to mix them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Union

import numpy as np

from .cyclic import check_size, half_integer_weights, integer_weights
from .errors import FieldMismatch

# --------------------------------------------------------------------------
# ndarray primitives
# --------------------------------------------------------------------------


def dv2e(z: np.ndarray) -> np.ndarray:
    """``(Dz)[n] = z[n+1] - z[n]``."""
    return np.concatenate((z[1:], z[:1])) - z


def de2v(zeta: np.ndarray) -> np.ndarray:
    """``(D zeta)[n] = zeta[n] - zeta[n-1]``."""
    return zeta - np.concatenate((zeta[-1:], zeta[:-1]))


def mv2e(z: np.ndarray) -> np.ndarray:
    return 0.5 * (np.roll(z, -1) + z)


def me2v(zeta: np.ndarray) -> np.ndarray:
    return 0.5 * (zeta + np.roll(zeta, 1))


def centered(x: np.ndarray) -> np.ndarray:
    return x - x.mean()


@lru_cache(maxsize=None)
def _ie2v_matrix(n: int) -> np.ndarray:
    # (I zeta)[v] = sum_j B(j + 1/2) zeta[v - j - 1]
    w = half_integer_weights(n)
    idx = np.arange(n)
    j = (idx[:, None] - idx[None, :] - 1) % n
    mat = w[j]
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=None)
def _iv2e_matrix(n: int) -> np.ndarray:
    # (I z)[e] = sum_j B(j + 1/2) z[e - j]
    w = half_integer_weights(n)
    idx = np.arange(n)
    mat = w[(idx[:, None] - idx[None, :]) % n]
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=None)
def _k_matrix(n: int) -> np.ndarray:
    # (K x)[m] = sum_k B(k) x[m - k], same stencil on vertices and edges
    w = integer_weights(n)
    idx = np.arange(n)
    mat = w[(idx[:, None] - idx[None, :]) % n]
    mat.setflags(write=False)
    return mat


def ie2v(zeta: np.ndarray) -> np.ndarray:
    """Zero-sum primitive of an edge field, by convolution with the B kernel."""
    return _ie2v_matrix(len(zeta)) @ zeta


def iv2e(z: np.ndarray) -> np.ndarray:
    return _iv2e_matrix(len(z)) @ z


def k_apply(x: np.ndarray) -> np.ndarray:
    return _k_matrix(len(x)) @ x


def ie2v_solve(zeta: np.ndarray) -> np.ndarray:
    """Same contract as :func:`ie2v`, by a dense least-squares solve.

    Solves ``D w = center(zeta)`` together with ``sum(w) = 0``.  Kept as an
    independent check on the kernel indexing.
    """
    zeta = np.asarray(zeta, dtype=complex)
    n = len(zeta)
    dmat = np.roll(np.eye(n), 1, axis=1) - np.eye(n)
    system = np.vstack([dmat, np.ones((1, n))])
    rhs = np.concatenate([centered(zeta), [0.0]])
    w, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return w


# --------------------------------------------------------------------------
# typed fields
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Field:
    values: np.ndarray
    kind: ClassVar[str] = ""

    def __post_init__(self):
        arr = np.array(self.values, dtype=complex).reshape(-1)
        check_size(len(arr))
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i % self.n]

    def __iter__(self):
        return iter(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __repr__(self):
        return f"{type(self).__name__}({np.array2string(self.values, precision=6)})"

    def _like(self, values) -> "_Field":
        return type(self)(values)

    def _peer(self, other) -> np.ndarray:
        _check_compatible(self, other)
        return other.values

    def __add__(self, other):
        return self._like(self.values + self._peer(other))

    def __sub__(self, other):
        return self._like(self.values - self._peer(other))

    def __neg__(self):
        return self._like(-self.values)

    def __mul__(self, scalar):
        if isinstance(scalar, _Field):
            raise TypeError("use diag() for slotwise products of fields")
        return self._like(self.values * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._like(self.values / complex(scalar))

    def conj(self):
        return self._like(np.conj(self.values))

    def sum(self) -> complex:
        return complex(self.values.sum())

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def allclose(self, other, rtol=1e-10, atol=1e-12) -> bool:
        return bool(np.allclose(self.values, self._peer(other), rtol=rtol, atol=atol))

    @classmethod
    def ones(cls, n: int):
        return cls(np.ones(n))

    @classmethod
    def zeros(cls, n: int):
        return cls(np.zeros(n))


class VertexField(_Field):
    """Complex values indexed by the vertices of the cycle."""

    kind = "vertex"


class EdgeField(_Field):
    """Complex values indexed by the edges; edge ``n + 1/2`` lives at slot ``n``."""

    kind = "edge"


Field = Union[VertexField, EdgeField]

def _check_compatible(a, b) -> None:
    if not isinstance(b, _Field) or type(a) is not type(b):
        raise FieldMismatch(
            f"cannot combine {type(a).__name__} with {type(b).__name__}"
        )
    if a.n != b.n:
        raise FieldMismatch(f"size mismatch: N={a.n} vs N={b.n}")


def _require(x, cls) -> None:
    if not isinstance(x, cls):
        raise FieldMismatch(f"expected {cls.__name__}, got {type(x).__name__}")


# spec-named operators ------------------------------------------------------


def derivative_v2e(z: VertexField) -> EdgeField:
    _require(z, VertexField)
    return EdgeField(dv2e(z.values))


def derivative_e2v(zeta: EdgeField) -> VertexField:
    _require(zeta, EdgeField)
    return VertexField(de2v(zeta.values))


def midpoint_v2e(z: VertexField) -> EdgeField:
    _require(z, VertexField)
    return EdgeField(mv2e(z.values))


def midpoint_e2v(zeta: EdgeField) -> VertexField:
    _require(zeta, EdgeField)
    return VertexField(me2v(zeta.values))


def integrate_e2v(zeta: EdgeField) -> VertexField:
    _require(zeta, EdgeField)
    return VertexField(ie2v(zeta.values))


def integrate_v2e(z: VertexField) -> EdgeField:
    _require(z, VertexField)
    return EdgeField(iv2e(z.values))


def integrate_e2v_solve(zeta: EdgeField) -> VertexField:
    _require(zeta, EdgeField)
    return VertexField(ie2v_solve(zeta.values))


# kind-dispatching operators ------------------------------------------------


def D(x: Field) -> Field:
    """Difference operator, vertex -> edge or edge -> vertex."""
    if isinstance(x, VertexField):
        return derivative_v2e(x)
    _require(x, EdgeField)
    return derivative_e2v(x)


def M(x: Field) -> Field:
    if isinstance(x, VertexField):
        return midpoint_v2e(x)
    _require(x, EdgeField)
    return midpoint_e2v(x)


def I(x: Field) -> Field:  # noqa: E743
    """Inverse of ``D`` on zero-sum fields, extended by ``I(1) = 0``."""
    if isinstance(x, VertexField):
        return integrate_v2e(x)
    _require(x, EdgeField)
    return integrate_e2v(x)


def smooth_k(x: Field) -> Field:
    """``K = M I``, evaluated by its own convolution kernel."""
    _require(x, _Field)
    return x._like(k_apply(x.values))


K = smooth_k


def center(x):
    """Remove the mean; accepts a field or a bare array."""
    if isinstance(x, _Field):
        return x._like(centered(x.values))
    return centered(np.asarray(x, dtype=complex))


pi0 = center


def diag(alpha: Field, x: Field) -> Field:
    _check_compatible(alpha, x)
    return x._like(alpha.values * x.values)


def conj_c(x: Field) -> Field:
    _require(x, _Field)
    return x.conj()


def hermitian(x: Field, y: Field) -> complex:
    _check_compatible(x, y)
    return complex(np.vdot(y.values, x.values))


def real_inner(x: Field, y: Field) -> float:
    return hermitian(x, y).real
