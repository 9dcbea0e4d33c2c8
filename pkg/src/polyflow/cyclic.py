"""Index arithmetic on the N-cycle.

Vertices are the integers ``0..N-1``.  The edge ``n + 1/2`` joining vertex
``n`` to vertex ``n + 1`` is stored at integer slot ``n``; every vertex and
edge field therefore uses the same length-N array layout.
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

MIN_VERTICES = 3


class Side(enum.Enum):
    PLUS_HALF = "plus_half"
    MINUS_HALF = "minus_half"


def check_size(n: int) -> int:
    n = int(n)
    if n < MIN_VERTICES:
        raise ValueError(f"a cycle needs at least {MIN_VERTICES} vertices, got {n}")
    return n


def edge_slot(n: int, side: Side | str, size: int) -> int:
    """Storage slot of the edge after (``plus_half``) or before (``minus_half``) vertex ``n``."""
    side = Side(side)
    if side is Side.PLUS_HALF:
        return n % size
    return (n - 1) % size


def b_kernel(t: float, size: int) -> float:
    """Periodic kernel ``B(t) = (N - 2t) / 2N`` on ``(0, N)`` with ``B(0) = 0``.

    ``t`` must already be reduced to ``[0, N)``.
    """
    if not 0 <= t < size:
        raise ValueError(f"t={t} outside [0, {size})")
    if t == 0:
        return 0.0
    return (size - 2.0 * t) / (2.0 * size)


def b_kernel_periodic(t: float, size: int) -> float:
    """``B`` extended to the real line by N-periodicity."""
    return b_kernel(float(np.mod(t, size)), size)


@lru_cache(maxsize=None)
def half_integer_weights(size: int) -> np.ndarray:
    """``B(j + 1/2)`` for ``j = 0..N-1``."""
    w = np.array([b_kernel(j + 0.5, size) for j in range(size)])
    w.setflags(write=False)
    return w


@lru_cache(maxsize=None)
def integer_weights(size: int) -> np.ndarray:
    """``B(k)`` for ``k = 0..N-1``."""
    w = np.array([b_kernel(float(k), size) for k in range(size)])
    w.setflags(write=False)
    return w
