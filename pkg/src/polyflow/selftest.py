"""Randomised operator and gradient identity checks.

Each suite returns the worst relative error it saw; a suite passes when that
error is at most ``tol``.  :func:`corrupted_kernel` swaps in a mis-indexed B
kernel so callers can confirm the checks are sensitive to it.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import calculus
from .calculus import EdgeField, VertexField, D, I, K, M, center, diag, hermitian
from .flow import random_constrained_polygon
from .geometry import area_differential
from .shape_space import criticality, project_params, tangent_lift

SIZES = (4, 5, 6, 7, 12)


def _rand(rng, n) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _rel(lhs, rhs) -> float:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    scale = max(1.0, float(np.abs(lhs).max()), float(np.abs(rhs).max()))
    return float(np.abs(lhs - rhs).max()) / scale


def _fields(rng, n):
    return VertexField(_rand(rng, n)), EdgeField(_rand(rng, n))


def _adjoint(rng, n):
    z, zeta = _fields(rng, n)
    w, xi = _fields(rng, n)
    return max(
        _rel(hermitian(D(z), zeta), -hermitian(z, D(zeta))),
        _rel(hermitian(M(z), zeta), hermitian(z, M(zeta))),
        _rel(hermitian(I(zeta), z), -hermitian(zeta, I(z))),
        _rel(hermitian(K(z), w), -hermitian(z, K(w))),
        _rel(hermitian(K(zeta), xi), -hermitian(zeta, K(xi))),
    )


def _commute(rng, n):
    z, zeta = _fields(rng, n)
    zv = z.values
    half_diff = 0.5 * (np.roll(zv, -1) - np.roll(zv, 1))
    errs = [
        _rel(M(D(z)), D(M(z))),
        _rel(M(D(z)), half_diff),
        _rel(M(D(zeta)), D(M(zeta))),
    ]
    for x in (z, zeta):
        errs += [
            _rel(D(center(x)), D(x)),
            _rel(center(D(x)), D(x)),
            _rel(M(center(x)), center(M(x))),
        ]
    return max(errs)


def _inversion(rng, n):
    z, zeta = _fields(rng, n)
    return max(
        _rel(D(I(zeta)), center(zeta)),
        _rel(I(D(zeta)), center(zeta)),
        _rel(D(I(z)), center(z)),
        _rel(I(D(z)), center(z)),
        _rel(I(EdgeField.ones(n)), np.zeros(n)),
    )


def _k_is_mi(rng, n):
    z, zeta = _fields(rng, n)
    return max(_rel(K(z), M(I(z))), _rel(K(zeta), M(I(zeta))))


def _leibniz(rng, n):
    errs = []
    for cls in (VertexField, EdgeField):
        alpha, x = cls(_rand(rng, n)), cls(_rand(rng, n))
        lhs = D(diag(alpha, x))
        rhs = diag(M(alpha), D(x)) + diag(D(alpha), M(x))
        errs.append(_rel(lhs, rhs))
    return max(errs)


def _by_parts(rng, n):
    errs = []
    for cls in (VertexField, EdgeField):
        other = EdgeField if cls is VertexField else VertexField
        alpha = other(_rand(rng, n))  # lives where diag acts
        x = cls(_rand(rng, n))
        lhs = D(diag(alpha, I(x)))
        rhs = diag(M(alpha), center(x)) + diag(D(alpha), K(x))
        errs.append(_rel(lhs, rhs))
        lhs = I(diag(alpha, D(x)))
        rhs = center(diag(M(alpha), x)) - K(diag(D(alpha), x))
        errs.append(_rel(lhs, rhs))
    return max(errs)


def _kernel_vs_solve(rng, n):
    zeta = _rand(rng, n)
    return _rel(calculus.ie2v(zeta), calculus.ie2v_solve(zeta))


def _pairing(rng, n):
    # d_z A((-J_alpha + C) s) = Re <a_z, s> on the parameter space
    ell = rng.uniform(0.8, 1.2, size=n)
    z = random_constrained_polygon(ell, rng)
    crit = criticality(z, ell)
    s = project_params(crit.turning, _rand(rng, n))
    t = tangent_lift(crit.turning, s, project=False)
    lhs = area_differential(z, t)
    rhs = hermitian(crit.a, s).real
    scale = max(1.0, crit.a.norm() * s.norm())
    return abs(lhs - rhs) / scale


@dataclass(frozen=True)
class Suite:
    name: str
    check: Callable[[np.random.Generator, int], float]


SUITES = (
    Suite("adjoint", _adjoint),
    Suite("commute", _commute),
    Suite("D.I=pi0", _inversion),
    Suite("K=MI", _k_is_mi),
    Suite("leibniz", _leibniz),
    Suite("by-parts", _by_parts),
    Suite("kernel-vs-solve", _kernel_vs_solve),
    Suite("pairing", _pairing),
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    worst: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.worst) and self.worst <= self.tol)

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag}  {self.name:<16} worst rel err {self.worst:.2e} (tol {self.tol:.0e})"


def run_suites(trials: int = 20, sizes=SIZES, seed: int = 0, tol: float = 1e-10) -> list[SuiteResult]:
    results = []
    for k, suite in enumerate(SUITES):
        rng = np.random.default_rng([seed, k])
        worst = 0.0
        for n in sizes:
            for _ in range(trials):
                try:
                    err = suite.check(rng, n)
                except Exception:  # a blow-up counts as a failure, not a crash
                    err = float("inf")
                worst = max(worst, err)
        results.append(SuiteResult(suite.name, worst, tol))
    return results


@contextlib.contextmanager
def corrupted_kernel():
    """Temporarily replace the B-kernel matrices with ones shifted by a slot."""
    saved = calculus._ie2v_matrix, calculus._iv2e_matrix

    def shifted(build):
        def inner(n):
            return np.roll(build(n), 1, axis=1)

        return inner

    calculus._ie2v_matrix = shifted(saved[0])
    calculus._iv2e_matrix = shifted(saved[1])
    try:
        yield
    finally:
        calculus._ie2v_matrix, calculus._iv2e_matrix = saved
