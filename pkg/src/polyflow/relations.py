"""Area/side-length identities of cocyclic triangles and quadrilaterals, and
the counting formulas that go with them."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np


def _lengths(lengths, n: int) -> np.ndarray:
    arr = np.asarray(lengths, dtype=float).reshape(-1)
    if len(arr) != n:
        raise ValueError(f"expected {n} lengths, got {len(arr)}")
    if np.any(arr <= 0):
        raise ValueError("lengths must be positive")
    return arr


def heron_residual(area: float, lengths) -> float:
    """Heron's relation between ``16 A^2`` and squared sides, over perimeter**4."""
    a2, b2, c2 = _lengths(lengths, 3) ** 2
    lhs = 16.0 * area * area - 2.0 * (a2 * b2 + b2 * c2 + c2 * a2) + a2 * a2 + b2 * b2 + c2 * c2
    return float(lhs / np.sqrt([a2, b2, c2]).sum() ** 4)


def brahmagupta_residual(area: float, lengths) -> float:
    """Brahmagupta's relation (any cyclic quadrilateral, crossed or not), over perimeter**8."""
    ell = _lengths(lengths, 4)
    sq = ell**2
    inner = 16.0 * area * area - sq.sum() ** 2 + 2.0 * (sq**2).sum()
    lhs = inner * inner - 64.0 * np.prod(sq)
    return float(lhs / ell.sum() ** 8)


def _half_index(n: int) -> int:
    if n < 3:
        raise ValueError("N must be at least 3")
    return (n - 1) // 2


def delta_n(n: int) -> int:
    """Degree in ``16 A^2`` of the Heron-Robbins polynomial for cyclic N-gons."""
    p = _half_index(n)
    twice = n * comb(n - 1, p)
    assert twice % 2 == 0
    return twice // 2 - 2 ** (n - 2)


def betti_sum_bound(n: int) -> int:
    p = _half_index(n)
    return 2 ** (n - 1) - comb(n - 1, p)


@dataclass
class RelationReport:
    n: int
    cluster_count: int
    delta_n: int
    betti_sum_bound: int
    residuals: list[float] = field(default_factory=list)
    tolerance: float = 1e-8

    @property
    def checked(self) -> bool:
        return self.n in (3, 4)

    @property
    def all_pass(self) -> bool:
        return all(abs(r) <= self.tolerance for r in self.residuals)


def check_cluster_relations(clusters, lengths, tol: float = 1e-8) -> RelationReport:
    """Closed-form residual per cluster (N = 3, 4) plus the counting context."""
    ell = np.asarray(lengths, dtype=float).reshape(-1)
    n = len(ell)
    residual = {3: heron_residual, 4: brahmagupta_residual}.get(n)
    residuals = [residual(c.area, ell) for c in clusters] if residual else []
    return RelationReport(
        n=n,
        cluster_count=len(clusters),
        delta_n=delta_n(n),
        betti_sum_bound=betti_sum_bound(n),
        residuals=residuals,
        tolerance=tol,
    )
