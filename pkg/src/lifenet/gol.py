"""Game of Life transition operator on finite boards.

Boards are 2-D ``uint8`` arrays of zeros and ones. Everything outside the
board is treated as permanently dead, which is the same boundary a
shape-preserving zero-padded 3x3 convolution sees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PatchClass",
    "as_board",
    "patch_rule",
    "neighbor_counts",
    "step",
    "step_n",
    "density",
    "density_trajectory",
]


@dataclass(frozen=True)
class PatchClass:
    """State of a cell together with the number of its live neighbors."""

    center: int
    alive_neighbors: int

    def __post_init__(self):
        if self.center not in (0, 1):
            raise ValueError(f"center must be 0 or 1, got {self.center!r}")
        if not 0 <= self.alive_neighbors <= 8:
            raise ValueError(f"alive_neighbors must be in [0, 8], got {self.alive_neighbors!r}")


def as_board(b) -> np.ndarray:
    """Validate ``b`` as a binary 2-D grid and return it as ``uint8``."""
    arr = np.asarray(b)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"board must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("board cells must be 0 or 1")
        arr = arr.astype(np.uint8)
    elif arr.max(initial=0) > 1:
        raise ValueError("board cells must be 0 or 1")
    return arr


def patch_rule(p: PatchClass) -> int:
    # live iff the whole 3x3 patch holds >= 3 live cells and the center has <= 3 live neighbors
    return int(p.center + p.alive_neighbors >= 3 and p.alive_neighbors <= 3)


def neighbor_counts(b: np.ndarray) -> np.ndarray:
    """Number of live cells among the eight neighbors, dead outside the board.

    Works on a single board ``(M, N)`` or a stack ``(..., M, N)``.
    """
    b = np.asarray(b, dtype=np.uint8)
    pad = [(0, 0)] * (b.ndim - 2) + [(1, 1), (1, 1)]
    p = np.pad(b, pad)
    m, n = b.shape[-2:]
    counts = np.zeros(b.shape, dtype=np.uint8)
    for di in range(3):
        for dj in range(3):
            if di == 1 and dj == 1:
                continue
            counts += p[..., di : di + m, dj : dj + n]
    return counts


def _step(b: np.ndarray) -> np.ndarray:
    n = neighbor_counts(b)
    return ((n == 3) | ((b == 1) & (n == 2))).astype(np.uint8)


def step(b) -> np.ndarray:
    """One Game of Life generation (B3/S23)."""
    return _step(as_board(b))


def step_n(b, n: int) -> np.ndarray:
    """Apply :func:`step` ``n`` times; ``n`` must be at least 1."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    out = as_board(b)
    for _ in range(int(n)):
        out = _step(out)
    return out


def density(b) -> float:
    b = as_board(b)
    return float(b.sum(dtype=np.int64)) / b.size


def density_trajectory(
    p0: float,
    M: int,
    N: int,
    steps: int,
    trials: int = 100,
    seed: int = 0,
) -> list[float]:
    """Mean board density after 0..steps generations, starting from Bernoulli(p0) boards.

    Trial ``k`` draws its board from ``default_rng([seed, k])`` so the result
    does not depend on evaluation order.
    """
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"p0 must be in [0, 1], got {p0}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    totals = np.zeros(steps + 1)
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        b = (rng.random((M, N)) < p0).astype(np.uint8)
        totals[0] += b.mean()
        for t in range(1, steps + 1):
            b = _step(b)
            totals[t] += b.mean()
    return (totals / trials).tolist()
