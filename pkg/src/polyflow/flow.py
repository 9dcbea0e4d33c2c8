"""Gradient ascent of the signed area on a fixed-lengths polygon space.

Each step is an explicit Euler move along the Riemannian gradient followed by
a Babylonian-style fixed-point reprojection back onto the length constraints.
"""

from __future__ import annotations

import enum
import logging
from functools import lru_cache
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .calculus import dv2e, ie2v
from .errors import (
    CollinearPolygon,
    ConstraintViolation,
    InadmissibleLengths,
    InitFailure,
    NewtonDivergence,
    ZeroEdge,
)
from .geometry import (
    as_vertices,
    developed_perimeter,
    is_collinear,
    oriented_area,
)
from .shape_space import (
    LengthSpec,
    _alpha,
    _criticality_arrays,
    _lift,
    make_length_spec,
    membership_residual,
)

log = logging.getLogger(__name__)


class StopReason(enum.Enum):
    CONVERGED = "converged"
    MAX_STEPS = "max_steps"
    SINGULAR = "singular"
    STEP_UNDERFLOW = "step_underflow"


@dataclass(frozen=True)
class FlowConfig:
    """Step control for :func:`run_flow`.

    ``dt`` is dimensionless (the gradient scales like a length).  ``grad_tol``
    is compared to the criticality residual divided by the perimeter.
    """

    dt: float = 1e-2
    eps_constraint: float = 1e-10
    newton_max_iter: int = 50
    max_steps: int = 50_000
    grad_tol: float = 1e-8
    dt_backoff: float = 0.5
    snapshot_stride: int = 10
    min_dt: float = 1e-12

    def __post_init__(self):
        for name in ("dt", "eps_constraint", "grad_tol", "min_dt"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value}")
        for name in ("newton_max_iter", "max_steps", "snapshot_stride"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if not 0 < self.dt_backoff < 1:
            raise ValueError(f"dt_backoff must lie in (0, 1), got {self.dt_backoff}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StepRecord:
    step: int
    area: float
    residual: float
    developed_perimeter: float
    membership_residual: float
    dt: float
    # exact increments of the Euler move (A and |zeta|^2 are quadratic forms)
    euler_area_gain: float = 0.0
    euler_min_len2_gain: float = 0.0


@dataclass
class FlowTrajectory:
    records: list[StepRecord] = field(default_factory=list)
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def steps(self) -> np.ndarray:
        return np.array([r.step for r in self.records], dtype=int)


class FlowResult(NamedTuple):
    polygon: np.ndarray
    trajectory: FlowTrajectory
    reason: StopReason


def _lengths(lengths) -> np.ndarray:
    if isinstance(lengths, LengthSpec):
        return lengths.array()
    return np.asarray(lengths, dtype=float).reshape(-1)


def _len2_error(w: np.ndarray, ell2: np.ndarray) -> float:
    return float(np.max(np.abs(np.abs(dv2e(w)) ** 2 - ell2) / ell2))


def newton_reproject(
    w,
    lengths,
    eps: float = 1e-10,
    max_iter: int = 50,
    give_up_early: bool = False,
) -> np.ndarray:
    """Pull ``w`` back onto the length constraints.

    Iterates ``W <- (W + I diag(l^2 / L^2(W)) D W) / 2``, the vector form of
    the Babylonian square-root iteration, until every squared length is within
    relative ``eps`` of its target.  The result is centered.  With
    ``give_up_early`` the iteration stops as soon as its observed contraction
    rate cannot reach ``eps`` within the remaining budget.
    """
    w = as_vertices(w)
    ell2 = _lengths(lengths) ** 2
    per = float(np.sqrt(ell2).sum())
    err = _len2_error(w, ell2)
    if err <= eps and abs(w.sum()) <= eps * per:
        return w.copy()
    w = w - w.mean()
    floor2 = (1e-14 * per) ** 2
    for k in range(max_iter):
        if err <= eps:
            return w
        zeta = dv2e(w)
        len2 = zeta.real**2 + zeta.imag**2
        if len2.min() <= floor2:
            raise ZeroEdge("an edge collapsed during reprojection")
        w = 0.5 * (w + ie2v(ell2 / len2 * zeta))
        prev, err = err, _len2_error(w, ell2)
        if give_up_early and k >= 4 and err > eps:
            rate = err / prev
            if rate >= 1 or np.log(eps / err) / np.log(rate) > max_iter - k - 1:
                break
    if err <= eps:
        return w
    raise NewtonDivergence(
        f"reprojection missed eps={eps:g} after {max_iter} iterations (error {err:.3e})"
    )


@lru_cache(maxsize=None)
def _gn_blocks(n: int) -> tuple[np.ndarray, np.ndarray]:
    eye = np.eye(n)
    dmat = np.roll(eye, -1, axis=0) - eye  # (D w)[k] = w[k+1] - w[k]
    zeros, ones = np.zeros((1, n)), np.ones((1, n))
    center_rows = np.block([[ones, zeros], [zeros, ones]])
    return dmat, center_rows


def _gauss_newton(w: np.ndarray, ell2: np.ndarray, eps: float, max_iter: int):
    n = len(w)
    dmat, center_rows = _gn_blocks(n)
    floor = 1e-14 * float(np.sqrt(ell2).sum())
    err = _len2_error(w, ell2)
    for _ in range(max_iter):
        if err <= eps:
            break
        zeta = dv2e(w)
        if np.abs(zeta).min() <= floor:
            raise ZeroEdge("an edge collapsed during reprojection")
        # 2 Re(conj(zeta) D delta) with delta = x + i y
        jac = np.hstack([zeta.real[:, None] * dmat, zeta.imag[:, None] * dmat])
        system = np.vstack([2.0 * jac, center_rows])
        rhs = np.concatenate([ell2 - np.abs(zeta) ** 2, [0.0, 0.0]])
        step, *_ = np.linalg.lstsq(system, rhs, rcond=None)
        nxt = w + step[:n] + 1j * step[n:]
        nerr = _len2_error(nxt, ell2)
        if not nerr < err:
            break
        w, err = nxt, nerr
    return w, err


def gauss_newton_reproject(w, lengths, eps: float = 1e-10, max_iter: int = 20) -> np.ndarray:
    """Minimum-norm Gauss-Newton projection onto the same constraint set.

    Each iterate solves ``2 Re(conj(zeta) D delta) = l^2 - |zeta|^2`` with
    ``sum(delta) = 0`` in the least-norm sense, so the correction is normal to
    the constraint set and converges quadratically.
    """
    w = as_vertices(w)
    ell2 = _lengths(lengths) ** 2
    w, err = _gauss_newton(w - w.mean(), ell2, eps, max_iter)
    if err > eps:
        raise NewtonDivergence(f"Gauss-Newton projection stalled at error {err:.3e}")
    return w


def _reproject(w, ell, cfg: "FlowConfig") -> np.ndarray:
    # The fixed-point map does the work.  Near flat polygons it contracts
    # slowly, and Gauss-Newton takes over.  A final Gauss-Newton polish removes
    # the eps-sized length error, whose area noise would otherwise swamp the
    # tiny per-step gains close to a critical point.
    ell2 = ell * ell
    try:
        w = newton_reproject(w, ell, cfg.eps_constraint, cfg.newton_max_iter, give_up_early=True)
    except NewtonDivergence:
        w = gauss_newton_reproject(w, ell, cfg.eps_constraint)
    w, _ = _gauss_newton(w, ell2, 0.0, 3)
    return w - w.mean()


def _gradient(z: np.ndarray):
    if is_collinear(z):
        raise CollinearPolygon("gradient undefined at collinear polygons")
    alpha = _alpha(z)
    _, a = _criticality_arrays(z, alpha)
    return _lift(alpha, a), float(np.linalg.norm(a))


def euler_step(z, lengths, dt: float) -> np.ndarray:
    """One explicit step ``z + dt * grad A``; leaves the constraint set slightly."""
    z = as_vertices(z)
    if lengths is not None and membership_residual(z, lengths) > 1e-6:
        raise ConstraintViolation("euler_step needs an on-constraint polygon")
    grad, _ = _gradient(z)
    return z + dt * grad


def _euler_gains(z: np.ndarray, g: np.ndarray, dt: float, ell2: np.ndarray):
    # A(z + h) = A(z) + dA_z(h) + A(h) and |zeta + dh|^2 = |zeta|^2 + 2Re(conj(zeta) dh) + |dh|^2
    da = 0.5 * np.imag((np.roll(z, -1) - np.roll(z, 1)) * np.conj(g)).sum()
    area_gain = dt * da + dt * dt * oriented_area(g)
    zeta, dg = dv2e(z), dv2e(g)
    len_gain = 2 * dt * np.real(np.conj(zeta) * dg) + dt * dt * np.abs(dg) ** 2
    return float(area_gain), float(np.min(len_gain / ell2))


def run_flow(
    z0,
    lengths,
    cfg: FlowConfig | None = None,
    on_record: Callable[[StepRecord, np.ndarray | None], None] | None = None,
) -> FlowResult:
    """Integrate the area gradient flow from ``z0``.

    Steps whose reprojection fails or whose area drops are retried with a
    smaller ``dt``; the nominal ``dt`` is restored after every accepted step.
    ``on_record`` is called with each record and, on snapshot steps, the
    vertices.
    """
    cfg = cfg or FlowConfig()
    ell = _lengths(lengths)
    ell2 = ell**2
    per = float(ell.sum())
    area_tol = 1e-12 * per * per

    z = _reproject(as_vertices(z0), ell, cfg)
    traj = FlowTrajectory()

    def emit(step, grad_res, dt, gains=(0.0, 0.0), force_snapshot=False):
        rec = StepRecord(
            step=step,
            area=oriented_area(z),
            residual=grad_res,
            developed_perimeter=developed_perimeter(z),
            membership_residual=membership_residual(z, ell),
            dt=dt,
            euler_area_gain=gains[0],
            euler_min_len2_gain=gains[1],
        )
        traj.records.append(rec)
        snap = None
        if force_snapshot or step % cfg.snapshot_stride == 0:
            snap = z.copy()
            traj.snapshots.append((step, snap))
        if on_record is not None:
            on_record(rec, snap)

    try:
        grad, res = _gradient(z)
    except (CollinearPolygon, ZeroEdge):
        emit(0, float("nan"), 0.0, force_snapshot=True)
        return FlowResult(z, traj, StopReason.SINGULAR)
    emit(0, res, 0.0, force_snapshot=True)

    reason = StopReason.MAX_STEPS
    area = oriented_area(z)
    step = 0
    while True:
        if res <= cfg.grad_tol * per:
            reason = StopReason.CONVERGED
            break
        if step >= cfg.max_steps:
            break
        dt = cfg.dt
        while True:
            if dt < cfg.min_dt:
                reason = StopReason.STEP_UNDERFLOW
                break
            gains = _euler_gains(z, grad, dt, ell2)
            if gains[0] <= 0:
                dt *= cfg.dt_backoff
                continue
            try:
                z_new = _reproject(z + dt * grad, ell, cfg)
            except (NewtonDivergence, ZeroEdge):
                dt *= cfg.dt_backoff
                continue
            area_new = oriented_area(z_new)
            if area_new < area - area_tol:
                dt *= cfg.dt_backoff
                continue
            break
        if reason is StopReason.STEP_UNDERFLOW:
            break
        step += 1
        z, area = z_new, area_new
        try:
            grad, res = _gradient(z)
        except (CollinearPolygon, ZeroEdge):
            emit(step, float("nan"), dt, gains, force_snapshot=True)
            return FlowResult(z, traj, StopReason.SINGULAR)
        emit(step, res, dt, gains)

    if traj.snapshots[-1][0] != traj.records[-1].step:
        traj.snapshots.append((traj.records[-1].step, z.copy()))
    log.debug("flow stopped: %s after %d steps", reason.value, step)
    return FlowResult(z, traj, reason)


def random_constrained_polygon(lengths, seed=None, max_tries: int = 100, eps: float = 1e-10) -> np.ndarray:
    """A random centered polygon with the given edge lengths.

    Edge directions are drawn uniformly, the closure defect is spread over the
    edges in proportion to their lengths, and the result is reprojected.
    """
    spec = lengths if isinstance(lengths, LengthSpec) else make_length_spec(lengths)
    if not spec.admissible:
        raise InadmissibleLengths(spec.describe_failure())
    ell = spec.array()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _ in range(max_tries):
        theta = rng.uniform(0.0, 2 * np.pi, size=len(ell))
        zeta = ell * np.exp(1j * theta)
        zeta = zeta - zeta.sum() * ell / ell.sum()
        try:
            z = newton_reproject(ie2v(zeta), ell, eps)
        except (NewtonDivergence, ZeroEdge):
            continue
        if not is_collinear(z):
            return z
    raise InitFailure(f"no constrained polygon found in {max_tries} draws")


def rotation_normalize(z) -> np.ndarray:
    """Rotate so the first non-degenerate edge points along the positive real axis."""
    z = as_vertices(z)
    z = z - z.mean()
    zeta = dv2e(z)
    scale = np.abs(zeta).max()
    k = int(np.flatnonzero(np.abs(zeta) > 1e-12 * scale)[0])
    return z * (np.conj(zeta[k]) / abs(zeta[k]))


@dataclass
class CriticalCluster:
    representative: np.ndarray
    areas: list[float] = field(default_factory=list)
    residual: float = 0.0

    @property
    def area(self) -> float:
        return float(np.mean(self.areas))

    @property
    def count(self) -> int:
        return len(self.areas)


class EnumerationResult(list):
    """Clusters sorted by mean area, descending, plus run bookkeeping."""

    def __init__(self, clusters=(), n_starts: int = 0, n_failed: int = 0, reasons=None):
        super().__init__(clusters)
        self.n_starts = n_starts
        self.n_failed = n_failed
        self.reasons = reasons or {}


def enumerate_critical(
    lengths,
    n_starts: int,
    cfg: FlowConfig | None = None,
    seed=None,
    cluster_tol: float = 1e-4,
    both_directions: bool = True,
) -> EnumerationResult:
    """Collect critical configurations reached by flows from random starts.

    With ``both_directions`` every odd-numbered start runs the descending flow
    (as the mirror image of an ascending one), so minima are reached as well
    as maxima.  Mirror images are never identified with each other.
    """
    spec = lengths if isinstance(lengths, LengthSpec) else make_length_spec(lengths)
    if not (spec.admissible and spec.regular):
        raise InadmissibleLengths(spec.describe_failure())
    cfg = cfg or FlowConfig()
    ell = spec.array()
    per = float(ell.sum())
    clusters: list[CriticalCluster] = []
    reasons: dict[str, int] = {}
    failed = 0
    children = np.random.SeedSequence(seed).spawn(n_starts) if n_starts > 0 else []
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        descend = both_directions and k % 2 == 1
        try:
            z0 = random_constrained_polygon(spec, rng)
        except InitFailure:
            failed += 1
            reasons["init_failure"] = reasons.get("init_failure", 0) + 1
            continue
        if descend:
            z0 = np.conj(z0)
        z, traj, reason = run_flow(z0, ell, cfg)
        reasons[reason.value] = reasons.get(reason.value, 0) + 1
        if reason is not StopReason.CONVERGED:
            failed += 1
            continue
        if descend:
            z = np.conj(z)
        z = rotation_normalize(z)
        area = oriented_area(z)
        res = traj.records[-1].residual
        for c in clusters:
            if np.abs(z - c.representative).max() <= cluster_tol * per:
                c.areas.append(area)
                c.residual = max(c.residual, res)
                break
        else:
            clusters.append(CriticalCluster(z, [area], res))
    clusters.sort(key=lambda c: -c.area)
    return EnumerationResult(clusters, n_starts=n_starts, n_failed=failed, reasons=reasons)
