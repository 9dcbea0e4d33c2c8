"""The space of centered polygons with prescribed edge lengths.

Covers admissibility and regularity of a length vector, the turning data of a
polygon, the parametrisation of its tangent space, the criticality vector of
the signed area together with its Riemannian gradient, and the Lagrange
multiplier checks for the fixed-lengths, free-edge and fixed-perimeter
problems.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import EdgeField, VertexField, dv2e, ie2v
from .errors import (
    CollinearPolygon,
    ConstraintViolation,
    NonPositiveLength,
    NotCocyclic,
    ZeroEdge,
)
from .geometry import Circle, as_vertices, fit_circle, is_collinear

EXHAUSTIVE_MAX_N = 24
MEET_IN_MIDDLE_MAX_N = 48
ZERO_EDGE_FLOOR = 1e-14
MEMBERSHIP_TOL = 1e-6
COCYCLIC_TOL = 1e-6


# --------------------------------------------------------------------------
# length vectors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LengthSpec:
    lengths: tuple[float, ...]
    admissible: bool
    regular: bool
    witness: tuple[int, ...] | None = None
    violations: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return len(self.lengths)

    @property
    def total(self) -> float:
        return float(sum(self.lengths))

    def array(self) -> np.ndarray:
        return np.asarray(self.lengths, dtype=float)

    def describe_failure(self) -> str:
        """Human-readable statement of the first failed condition, or ''."""
        half = 0.5 * self.total
        if not self.admissible:
            i = self.violations[0]
            return (
                f"inadmissible lengths: l[{i}] = {self.lengths[i]:g} is not < "
                f"half the perimeter {half:g}"
            )
        if not self.regular:
            signs = "(" + ",".join("+" if e > 0 else "-" for e in self.witness) + ")"
            return (
                f"non-regular lengths: sum eps_k l_k = 0 for eps = {signs}; "
                "the shape space contains collinear (singular) polygons"
            )
        return ""


def _sign_changes(signs: np.ndarray) -> np.ndarray:
    return (signs != np.roll(signs, -1, axis=-1)).sum(axis=-1)


def _witness_exhaustive(lengths: np.ndarray, tol: float) -> tuple[int, ...] | None:
    n = len(lengths)
    sums = np.array([lengths[0]])
    for ell in lengths[1:]:
        sums = np.concatenate([sums + ell, sums - ell])
    hits = np.flatnonzero(np.abs(sums) <= tol)
    if hits.size == 0:
        return None
    bits = (hits[:, None] >> np.arange(n - 1)[None, :]) & 1
    signs = np.column_stack([np.ones(len(hits), dtype=int), 1 - 2 * bits])
    # most folded witness first; ties broken lexicographically with + before -
    order = np.lexsort(tuple(-signs[:, ::-1].T) + (-_sign_changes(signs),))
    return tuple(int(e) for e in signs[order[0]])


def _half_sums(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sums = np.zeros(1)
    for v in values:
        sums = np.concatenate([sums + v, sums - v])
    return sums, np.arange(len(sums))


def _witness_meet_in_middle(lengths: np.ndarray, tol: float) -> tuple[int, ...] | None:
    n = len(lengths)
    k = n // 2
    left, right = lengths[1:k], lengths[k:]
    sa, ia = _half_sums(left)
    sa = sa + lengths[0]
    sb, ib = _half_sums(right)
    order = np.argsort(sb)
    sb, ib = sb[order], ib[order]
    pos = np.clip(np.searchsorted(sb, -sa), 1, len(sb) - 1)
    for cand in (pos - 1, pos):
        close = np.abs(sa + sb[cand]) <= tol
        if close.any():
            a = int(np.flatnonzero(close)[0])
            b = int(ib[cand[a]])
            signs = [1]
            signs += [1 - 2 * ((ia[a] >> j) & 1) for j in range(len(left))]
            signs += [1 - 2 * ((b >> j) & 1) for j in range(len(right))]
            return tuple(int(s) for s in signs)
    return None


def sign_witness(lengths) -> tuple[int, ...] | None:
    """A sign vector ``eps`` with ``sum eps_k l_k = 0``, or None if none exists.

    Sums are compared against ``1e-12 * sum(l)``.
    """
    lengths = np.asarray(lengths, dtype=float)
    n = len(lengths)
    tol = 1e-12 * lengths.sum()
    if n <= EXHAUSTIVE_MAX_N:
        return _witness_exhaustive(lengths, tol)
    if n <= MEET_IN_MIDDLE_MAX_N:
        return _witness_meet_in_middle(lengths, tol)
    raise ValueError(f"regularity test supports N <= {MEET_IN_MIDDLE_MAX_N}, got {n}")


def make_length_spec(lengths) -> LengthSpec:
    arr = np.asarray(lengths, dtype=float).reshape(-1)
    if len(arr) < 3:
        raise ValueError("need at least 3 edge lengths")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise NonPositiveLength(f"edge lengths must be positive and finite: {arr.tolist()}")
    half = 0.5 * arr.sum()
    violations = tuple(int(i) for i in np.flatnonzero(arr >= half))
    witness = sign_witness(arr)
    return LengthSpec(
        lengths=tuple(float(x) for x in arr),
        admissible=not violations,
        regular=witness is None,
        witness=witness,
        violations=violations,
    )


def _as_length_array(lengths) -> np.ndarray:
    if isinstance(lengths, LengthSpec):
        return lengths.array()
    return np.asarray(lengths, dtype=float).reshape(-1)


def membership_residual(z, lengths) -> float:
    """Worst relative squared-length error, or centering error over the perimeter."""
    z = as_vertices(z)
    ell2 = _as_length_array(lengths) ** 2
    len2 = np.abs(dv2e(z)) ** 2
    rel = np.max(np.abs(len2 - ell2) / ell2)
    centering = abs(z.sum()) / np.sqrt(ell2).sum()
    return float(max(rel, centering))


# --------------------------------------------------------------------------
# turning data and the tangent space
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TurningData:
    """Squared unit edge directions ``alpha = zeta / conj(zeta)``."""

    alpha: EdgeField

    @property
    def values(self) -> np.ndarray:
        return self.alpha.values

    @property
    def u(self) -> np.ndarray:
        """``conj(D alpha)``, the vector cut out of the parameter space."""
        a = self.alpha.values
        return np.conj(a - np.roll(a, 1))


def _alpha(z: np.ndarray) -> np.ndarray:
    zeta = dv2e(z)
    mod = np.abs(zeta)
    scale = max(float(np.abs(z - z.mean()).max()), 1e-300)
    if np.any(mod <= ZERO_EDGE_FLOOR * scale):
        raise ZeroEdge(f"edge {int(np.argmin(mod))} has (near) zero length")
    return zeta / np.conj(zeta)


def turning(z, lengths=None, tol: float = MEMBERSHIP_TOL) -> TurningData:
    z = as_vertices(z)
    alpha = _alpha(z)
    if lengths is not None:
        res = membership_residual(z, lengths)
        if res > tol:
            raise ConstraintViolation(f"membership residual {res:.3e} exceeds {tol:.1e}")
    return TurningData(EdgeField(alpha))


def _alpha_values(alpha) -> np.ndarray:
    if isinstance(alpha, TurningData):
        return alpha.values
    if isinstance(alpha, EdgeField):
        return alpha.values
    return np.asarray(alpha, dtype=complex)


def _j_alpha(alpha: np.ndarray, s: np.ndarray) -> np.ndarray:
    return ie2v(alpha * dv2e(s))


def j_alpha_apply(alpha, s) -> VertexField:
    """``J_alpha s = I diag(alpha) D s``."""
    return VertexField(_j_alpha(_alpha_values(alpha), as_vertices(s)))


def _u(alpha: np.ndarray) -> np.ndarray:
    return np.conj(alpha - np.roll(alpha, 1))


def _project_params(alpha: np.ndarray, s: np.ndarray) -> np.ndarray:
    s = s - s.mean()
    u = _u(alpha)
    uu = np.vdot(u, u).real
    if uu > 0:
        s = s - (np.vdot(u, s) / uu) * u
    return s


def project_params(alpha, s) -> VertexField:
    """Orthogonal projection onto ``{s : sum s = 0, <s, conj(D alpha)> = 0}``."""
    return VertexField(_project_params(_alpha_values(alpha), as_vertices(s)))


def _lift(alpha: np.ndarray, s: np.ndarray) -> np.ndarray:
    return -_j_alpha(alpha, s) + np.conj(s)


def tangent_lift(alpha, s, project: bool = True) -> VertexField:
    """Tangent vector ``-J_alpha s + conj(s)``; ``s`` is projected into the parameter space first."""
    a = _alpha_values(alpha)
    s = as_vertices(s)
    if project:
        s = _project_params(a, s)
    return VertexField(_lift(a, s))


def linearized_constraint_residual(z, t) -> float:
    """Largest violation of the linearised length and centering constraints at ``z``."""
    z, t = as_vertices(z), as_vertices(t)
    zeta = dv2e(z)
    per_edge = np.abs(np.real(np.conj(zeta) * dv2e(t)))
    scale = np.abs(zeta).max() * max(np.abs(t).max(), 1e-300)
    return float(max(per_edge.max() / scale, abs(t.sum()) / (len(t) * max(np.abs(t).max(), 1e-300))))


def tangent_dimension(alpha, tol: float = 1e-10) -> int:
    a = _alpha_values(alpha)
    n = len(a)
    return n - 1 if np.all(np.abs(a - a[0]) <= tol) else n - 2


# --------------------------------------------------------------------------
# criticality and gradient
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalityData:
    a_tilde: VertexField
    a: VertexField
    residual: float
    gradient: VertexField
    turning: TurningData
    mean_component: complex = field(default=0j)


def _criticality_arrays(z: np.ndarray, alpha: np.ndarray):
    dz = np.roll(z, -1) - np.roll(z, 1)
    u = _u(alpha)
    a_tilde = 1j * (np.conj(dz) + z * u)
    uu = np.vdot(u, u).real
    a = a_tilde - (np.vdot(u, a_tilde) / uu) * u
    return a_tilde, a


def criticality(z, lengths=None, membership_tol: float = MEMBERSHIP_TOL) -> CriticalityData:
    """Criticality vector ``a_z`` and gradient of the signed area at ``z``.

    ``residual`` is ``|a_z|``; it vanishes exactly at cocyclic, non-collinear
    polygons.  Pass ``lengths`` to have membership checked first.
    """
    z = as_vertices(z)
    if is_collinear(z):
        raise CollinearPolygon("criticality is undefined at collinear polygons")
    turn = turning(z, lengths, membership_tol)
    alpha = turn.values
    a_tilde, a = _criticality_arrays(z, alpha)
    grad = _lift(alpha, a)
    return CriticalityData(
        a_tilde=VertexField(a_tilde),
        a=VertexField(a),
        residual=float(np.linalg.norm(a)),
        gradient=VertexField(grad),
        turning=turn,
        mean_component=complex(a_tilde.mean()),
    )


def area_gradient(z) -> np.ndarray:
    """Riemannian gradient as a bare array; no membership check."""
    return criticality(z).gradient.values


# --------------------------------------------------------------------------
# Lagrange multipliers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiplierReport:
    lambdas: tuple[float, ...]
    mu: complex
    max_stationarity_residual: float
    max_imag_part: float
    circle: Circle


def _cocyclic_circle(z: np.ndarray, circle: Circle | None, tol: float) -> Circle:
    if circle is None:
        circle = fit_circle(z).circle
    dev = np.max(np.abs(np.abs(z - circle.center) - circle.radius)) / circle.radius
    if dev > tol:
        raise NotCocyclic(f"vertices deviate from the circle by {dev:.3e} (relative)")
    return circle


def stationarity_residual(z, lambdas, mu: complex = 0j) -> np.ndarray:
    """Per-vertex residual of the Lagrangian stationarity equation."""
    z = as_vertices(z)
    lam = np.asarray(lambdas, dtype=float)
    z_next, z_prev = np.roll(z, -1), np.roll(z, 1)
    lam_prev = np.roll(lam, 1)
    return -1j * (z_next - z_prev) + lam_prev * (z - z_prev) - lam * (z_next - z) + mu


def lagrange_multipliers(z, circle: Circle | None = None, cocyclic_tol: float = COCYCLIC_TOL) -> MultiplierReport:
    """Multipliers of the fixed-lengths problem at a cocyclic polygon.

    ``lambda_k = -cot(half the central angle of edge k)``, read off as the
    real part of ``-i (z[k+1] + z[k] - 2o) / (z[k+1] - z[k])``.
    """
    z = as_vertices(z)
    circle = _cocyclic_circle(z, circle, cocyclic_tol)
    o = circle.center
    zeta = dv2e(z)
    if np.any(np.abs(zeta) <= ZERO_EDGE_FLOOR * circle.radius):
        raise ZeroEdge("a zero-length edge has no multiplier")
    ratio = -1j * ((np.roll(z, -1) - o) + (z - o)) / zeta
    lam = ratio.real
    res = stationarity_residual(z, lam, 0j)
    return MultiplierReport(
        lambdas=tuple(float(x) for x in lam),
        mu=0j,
        max_stationarity_residual=float(np.abs(res).max()),
        max_imag_part=float(np.abs(ratio.imag).max()),
        circle=circle,
    )


def check_free_edge_critical(z, edge: int, tol: float = 1e-8, cocyclic_tol: float = COCYCLIC_TOL) -> bool:
    """True iff edge ``edge`` is a diameter of the circumscribed circle."""
    z = as_vertices(z)
    circle = _cocyclic_circle(z, None, cocyclic_tol)
    n = len(z)
    a, b = z[edge % n], z[(edge + 1) % n]
    if abs(b - a) <= ZERO_EDGE_FLOOR * circle.radius:
        raise ZeroEdge(f"edge {edge} has zero length")
    return bool(abs(0.5 * (a + b) - circle.center) <= tol * circle.radius)


def check_perimeter_constrained_critical(z, tol: float = 1e-8, cocyclic_tol: float = COCYCLIC_TOL) -> bool:
    """True iff consecutive central angles are all equal mod 2 pi (regular, possibly star)."""
    z = as_vertices(z)
    circle = _cocyclic_circle(z, None, cocyclic_tol)
    p = (z - circle.center) / np.abs(z - circle.center)
    steps = np.roll(p, -1) * np.conj(p)
    return bool(np.all(np.abs(steps - steps[0]) <= tol))


def central_angles(z, circle: Circle) -> np.ndarray:
    z = as_vertices(z)
    return np.angle(z - circle.center)


def cot_multipliers(z, circle: Circle) -> np.ndarray:
    """``-cot((theta[k+1] - theta[k]) / 2)`` computed from the angles directly."""
    theta = central_angles(z, circle)
    half = 0.5 * (np.roll(theta, -1) - theta)
    return -np.cos(half) / np.sin(half)


__all__ = [
    "LengthSpec",
    "make_length_spec",
    "sign_witness",
    "membership_residual",
    "TurningData",
    "turning",
    "j_alpha_apply",
    "project_params",
    "tangent_lift",
    "linearized_constraint_residual",
    "tangent_dimension",
    "CriticalityData",
    "criticality",
    "area_gradient",
    "MultiplierReport",
    "lagrange_multipliers",
    "stationarity_residual",
    "check_free_edge_critical",
    "check_perimeter_constrained_critical",
    "cot_multipliers",
]
