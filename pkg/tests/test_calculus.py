import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from polyflow.calculus import (
    D,
    EdgeField,
    FieldMismatch,
    I,
    K,
    M,
    VertexField,
    center,
    conj_c,
    derivative_e2v,
    derivative_v2e,
    diag,
    hermitian,
    ie2v_solve,
    integrate_e2v,
    integrate_e2v_solve,
    midpoint_e2v,
    midpoint_v2e,
    real_inner,
    smooth_k,
)

from conftest import square

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def complex_arrays(n):
    return st.tuples(arrays(float, n, elements=finite), arrays(float, n, elements=finite)).map(
        lambda p: p[0] + 1j * p[1]
    )


sized = st.integers(3, 16).flatmap(lambda n: st.tuples(complex_arrays(n), complex_arrays(n)))


def close(a, b, rel=1e-12):
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, np.abs(a).max(), np.abs(b).max())
    return np.abs(a - b).max() <= rel * scale


# -- worked examples --------------------------------------------------------


def test_derivative_examples(rng):
    assert np.allclose(derivative_v2e(VertexField(np.ones(4))).values, 0)
    assert np.allclose(derivative_v2e(VertexField(square())).values, [1, 1j, -1, -1j])
    assert abs(derivative_v2e(VertexField(rng.standard_normal(7))).sum()) < 1e-12
    assert np.allclose(derivative_e2v(EdgeField(np.ones(4))).values, 0)
    out = derivative_e2v(EdgeField([1, 1j, -1, -1j])).values
    assert np.allclose(out, [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
    assert abs(derivative_e2v(EdgeField(rng.standard_normal(5))).sum()) < 1e-12


def test_midpoint_examples(rng):
    assert np.allclose(midpoint_v2e(VertexField(np.ones(5))).values, 1)
    assert np.allclose(midpoint_v2e(VertexField(square())).values, [0.5, 1 + 0.5j, 0.5 + 1j, 0.5j])
    z = VertexField(rng.standard_normal(6) + 1j * rng.standard_normal(6))
    zv = z.values
    assert M(D(z)).allclose(D(M(z)))
    assert np.allclose(M(D(z)).values, 0.5 * (np.roll(zv, -1) - np.roll(zv, 1)))


def test_center_examples():
    assert np.allclose(center(VertexField(np.ones(4))).values, 0)
    x = VertexField([1, -1, 2, -2])
    assert center(x).allclose(x)
    assert np.allclose(center(VertexField([1, 0, 0, 0])).values, [0.75, -0.25, -0.25, -0.25])


def test_integrate_examples(rng):
    assert np.allclose(integrate_e2v(EdgeField(np.ones(5))).values, 0)
    zeta = EdgeField(rng.standard_normal(6) + 1j * rng.standard_normal(6))
    assert derivative_v2e(integrate_e2v(zeta)).allclose(center(zeta))
    z = center(VertexField(rng.standard_normal(7) + 1j * rng.standard_normal(7)))
    assert integrate_e2v(derivative_v2e(z)).allclose(z)


def test_smooth_k_examples(rng):
    assert np.allclose(smooth_k(VertexField(np.ones(6))).values, 0, atol=1e-15)
    x = VertexField(rng.standard_normal(6) + 1j * rng.standard_normal(6))
    assert smooth_k(x).allclose(M(I(x)))
    y = VertexField(rng.standard_normal(6) + 1j * rng.standard_normal(6))
    assert hermitian(K(x), y) == pytest.approx(-hermitian(x, K(y)), abs=1e-12)


def test_diag_conj_inner(rng):
    x = EdgeField(rng.standard_normal(5) + 1j * rng.standard_normal(5))
    assert diag(EdgeField.ones(5), x).allclose(x)
    assert conj_c(conj_c(x)).allclose(x)
    h = hermitian(x, x)
    assert h.imag == 0 and h.real == pytest.approx(x.norm() ** 2)
    assert real_inner(x * 1j, x) == pytest.approx(0, abs=1e-12)


def test_kind_and_size_checks():
    z4, z5 = VertexField(np.ones(4)), VertexField(np.ones(5))
    e4 = EdgeField(np.ones(4))
    with pytest.raises(FieldMismatch):
        z4 + e4
    with pytest.raises(FieldMismatch):
        z4 + z5
    with pytest.raises(FieldMismatch):
        diag(e4, z4)
    with pytest.raises(FieldMismatch):
        hermitian(z4, e4)
    with pytest.raises(FieldMismatch):
        derivative_v2e(e4)
    with pytest.raises(ValueError):
        VertexField([1, 2])


def test_fields_are_immutable():
    z = VertexField([1, 2, 3])
    with pytest.raises(ValueError):
        z.values[0] = 5


# -- properties -------------------------------------------------------------


@given(sized)
def test_adjointness(pair):
    a, b = pair
    z, zeta = VertexField(a), EdgeField(b)
    assert close(hermitian(D(z), zeta), -hermitian(z, D(zeta)))
    assert close(hermitian(M(z), zeta), hermitian(z, M(zeta)))
    assert close(hermitian(I(zeta), z), -hermitian(zeta, I(z)))
    assert close(hermitian(K(z), VertexField(b)), -hermitian(z, K(VertexField(b))))


@given(sized)
def test_commutation(pair):
    for x in (VertexField(pair[0]), EdgeField(pair[1])):
        assert close(D(center(x)), D(x))
        assert close(center(D(x)), D(x))
        assert close(M(center(x)), center(M(x)))
        assert close(M(D(x)), D(M(x)))


@given(sized)
def test_inversion(pair):
    for x in (VertexField(pair[0]), EdgeField(pair[1])):
        assert close(D(I(x)), center(x))
        assert close(I(D(x)), center(x))


@given(sized)
def test_leibniz(pair):
    a, b = pair
    for cls in (VertexField, EdgeField):
        alpha, x = cls(a), cls(b)
        lhs = D(diag(alpha, x))
        rhs = diag(M(alpha), D(x)) + diag(D(alpha), M(x))
        assert close(lhs, rhs)


@given(sized)
def test_integration_by_parts(pair):
    a, b = pair
    for alpha, x in ((EdgeField(a), VertexField(b)), (VertexField(a), EdgeField(b))):
        assert close(D(diag(alpha, I(x))), diag(M(alpha), center(x)) + diag(D(alpha), K(x)))
        assert close(I(diag(alpha, D(x))), center(diag(M(alpha), x)) - K(diag(D(alpha), x)))


@given(st.integers(3, 32).flatmap(complex_arrays))
def test_kernel_matches_solve(zeta):
    assert close(integrate_e2v(EdgeField(zeta)), integrate_e2v_solve(EdgeField(zeta)), rel=1e-10)


def test_solve_oracle_is_independent():
    # the oracle never touches the kernel matrices
    zeta = np.array([1, 2j, -3, 0.5])
    w = ie2v_solve(zeta)
    assert abs(w.sum()) < 1e-12
    assert np.allclose(np.roll(w, -1) - w, zeta - zeta.mean())
