import numpy as np
import pytest

from polyflow.calculus import dv2e, ie2v
from polyflow.errors import (
    ConstraintViolation,
    InadmissibleLengths,
    NewtonDivergence,
    ZeroEdge,
)
from polyflow.flow import (
    FlowConfig,
    StopReason,
    enumerate_critical,
    euler_step,
    gauss_newton_reproject,
    newton_reproject,
    random_constrained_polygon,
    rotation_normalize,
    run_flow,
)
from polyflow.geometry import fit_circle, is_collinear, oriented_area
from polyflow.shape_space import criticality, membership_residual

from conftest import HEX_LENGTHS, QUAD_LENGTHS, centered_square, regular


def len2_error(w, ell):
    ell2 = np.asarray(ell) ** 2
    return np.max(np.abs(np.abs(dv2e(w)) ** 2 - ell2) / ell2)


# -- reprojection -----------------------------------------------------------


def test_newton_fixed_point():
    sq = centered_square()
    assert np.allclose(newton_reproject(sq, np.ones(4)), sq)


def test_newton_order_on_scaled_square():
    w = 1.05 * centered_square()
    errs = [len2_error(w, np.ones(4))]
    for _ in range(3):
        zeta = dv2e(w)
        w = 0.5 * (w + ie2v(zeta / np.abs(zeta) ** 2))
        errs.append(len2_error(w, np.ones(4)))
    orders = np.log(errs[1:]) / np.log(errs[:-1])
    assert orders[-1] >= 1.8
    out = newton_reproject(1.05 * centered_square(), np.ones(4), eps=1e-12, max_iter=10)
    assert len2_error(out, np.ones(4)) <= 1e-12


def test_newton_result_is_centered(rng):
    z = random_constrained_polygon(HEX_LENGTHS, rng)
    w = z + 3 + 0.01 * (rng.standard_normal(6) + 1j * rng.standard_normal(6))
    out = newton_reproject(w, HEX_LENGTHS)
    assert abs(out.sum()) < 1e-12
    assert membership_residual(out, HEX_LENGTHS) <= 1e-9


def test_newton_errors():
    with pytest.raises(NewtonDivergence):
        newton_reproject(1.5 * centered_square(), np.ones(4), eps=1e-14, max_iter=1)
    with pytest.raises(ZeroEdge):
        newton_reproject(np.array([0, 0, 1, 1j]), np.ones(4))


def test_gauss_newton_matches_constraints(rng):
    z = random_constrained_polygon(QUAD_LENGTHS, rng)
    w = z + 0.05 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    out = gauss_newton_reproject(w, QUAD_LENGTHS, eps=1e-13)
    assert len2_error(out, QUAD_LENGTHS) <= 1e-13
    assert abs(out.sum()) < 1e-12


# -- Euler step -------------------------------------------------------------


def test_euler_step_examples(rng):
    z = regular(6) - 0
    assert np.allclose(euler_step(z, np.full(6, abs(z[1] - z[0])), 0.1), z, atol=1e-12)
    z = random_constrained_polygon(HEX_LENGTHS, rng)
    assert np.array_equal(euler_step(z, HEX_LENGTHS, 0.0), z)
    moved = euler_step(z, HEX_LENGTHS, 1e-4)
    assert oriented_area(moved) > oriented_area(z)
    with pytest.raises(ConstraintViolation):
        euler_step(1.2 * z, HEX_LENGTHS, 0.01)


# -- starting polygons ------------------------------------------------------


def test_random_polygon_is_deterministic_and_valid():
    a = random_constrained_polygon(HEX_LENGTHS, 7)
    b = random_constrained_polygon(HEX_LENGTHS, 7)
    assert np.array_equal(a, b)
    assert membership_residual(a, HEX_LENGTHS) <= 1e-9
    assert not is_collinear(a)
    assert not np.array_equal(a, random_constrained_polygon(HEX_LENGTHS, 8))


def test_random_polygon_rejects_inadmissible():
    with pytest.raises(InadmissibleLengths):
        random_constrained_polygon([1, 1, 1, 5], 0)


def test_rotation_normalize(rng):
    z = random_constrained_polygon(HEX_LENGTHS, rng)
    r = rotation_normalize(np.exp(0.4j) * z + 2)
    assert abs(r.sum()) < 1e-12
    e = dv2e(r)[0]
    assert abs(e.imag) < 1e-12 and e.real > 0


# -- flows ------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(dt=0)
    with pytest.raises(ValueError):
        FlowConfig(dt_backoff=1.0)
    with pytest.raises(ValueError):
        FlowConfig(max_steps=0)


def test_flow_converges_to_cocyclic():
    z0 = random_constrained_polygon(HEX_LENGTHS, 3)
    z, traj, reason = run_flow(z0, HEX_LENGTHS)
    assert reason is StopReason.CONVERGED
    assert fit_circle(z).relative_residual <= 1e-6
    areas = traj.column("area")
    per = HEX_LENGTHS.sum()
    assert np.all(np.diff(areas) >= -1e-12 * per * per)
    assert np.all(traj.column("membership_residual") <= 1e-9)
    assert traj.records[-1].residual <= 1e-8 * per
    assert traj.snapshots[0][0] == 0 and traj.snapshots[-1][0] == traj.records[-1].step


def test_flow_is_deterministic():
    z0 = random_constrained_polygon(QUAD_LENGTHS, 11)
    cfg = FlowConfig(max_steps=200)
    a = run_flow(z0, QUAD_LENGTHS, cfg)
    b = run_flow(z0, QUAD_LENGTHS, cfg)
    assert np.array_equal(a.polygon, b.polygon)
    assert a.trajectory.records == b.trajectory.records


def test_flow_step_budget():
    z0 = random_constrained_polygon(HEX_LENGTHS, 5)
    z, traj, reason = run_flow(z0, HEX_LENGTHS, FlowConfig(max_steps=3))
    assert reason is StopReason.MAX_STEPS
    assert traj.records[-1].step == 3


def test_flow_from_critical_point_stops_immediately():
    z = regular(5)
    ell = np.full(5, abs(z[1] - z[0]))
    out, traj, reason = run_flow(z, ell)
    assert reason is StopReason.CONVERGED and len(traj.records) == 1


def test_flow_on_collinear_start_is_singular():
    z = np.array([0, 1, 2, 1.0]) - 1
    _, traj, reason = run_flow(z, np.ones(4))
    assert reason is StopReason.SINGULAR
    assert np.isnan(traj.records[-1].residual)


def test_area_rate_matches_gradient_norm():
    # (A(z_{k+1}) - A(z_k)) / dt ~ |a_z|^2 for small steps
    z0 = random_constrained_polygon(HEX_LENGTHS, 1)
    cfg = FlowConfig(dt=1e-3, max_steps=10)
    _, traj, _ = run_flow(z0, HEX_LENGTHS, cfg)
    recs = traj.records
    assert len(recs) == 11
    for prev, cur in zip(recs, recs[1:]):
        rate = (cur.area - prev.area) / cur.dt
        assert rate == pytest.approx(prev.residual**2, rel=0.1)


def test_on_record_callback():
    seen = []
    z0 = random_constrained_polygon(HEX_LENGTHS, 2)
    run_flow(z0, HEX_LENGTHS, FlowConfig(max_steps=25, snapshot_stride=10), lambda r, s: seen.append((r.step, s is not None)))
    assert [s for s, _ in seen] == list(range(26))
    assert [s for s, snap in seen if snap] == [0, 10, 20]


# -- enumeration ------------------------------------------------------------


def test_enumerate_zero_starts():
    res = enumerate_critical(QUAD_LENGTHS, 0)
    assert list(res) == [] and res.n_starts == 0 and res.n_failed == 0


def test_enumerate_rejects_nonregular():
    with pytest.raises(InadmissibleLengths):
        enumerate_critical([1, 1, 1, 1], 4)


def test_enumerate_quadrilateral():
    res = enumerate_critical(QUAD_LENGTHS, 8, seed=0)
    assert res.n_failed == 0
    assert len(res) >= 2
    # the convex maximum and its mirror minimum are both found
    areas = [c.area for c in res]
    assert areas[0] == pytest.approx(-areas[-1], rel=1e-8)
    for c in res:
        assert fit_circle(c.representative).relative_residual <= 1e-6
        assert criticality(c.representative).residual <= 1e-6
    again = enumerate_critical(QUAD_LENGTHS, 8, seed=0)
    assert [c.area for c in again] == areas
