"""Minimal convolutional Game of Life network.

One block is ``Conv2D(3x3, 2 filters, zero padding) -> act -> Conv2D(1x1) -> ReLU``
and holds 23 scalars. Multi-step models either reuse one block n times
(recursive) or chain n independent blocks (sequential).

Internally a block is a flat float64 vector laid out as
``W11 (row-major, 9) | b11 | W12 (row-major, 9) | b12 | W2 (2) | b2``;
the same layout is used for gradients and for serialization.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

BLOCK_SIZE = 23

# offsets into a block vector
_W11 = slice(0, 9)
_B11 = 9
_W12 = slice(10, 19)
_B12 = 19
_W2 = slice(20, 22)
_B2 = 22
_W1_ROWS = np.r_[0:9, 10:19]


class NumericalOverflowError(FloatingPointError):
    """A forward or backward pass produced a non-finite value."""


class Activation(str, enum.Enum):
    RELU = "relu"
    TANH = "tanh"


class ArchMode(str, enum.Enum):
    SINGLE = "single"
    RECURSIVE = "recursive"
    SEQUENTIAL = "sequential"


@dataclass(frozen=True, eq=False)
class NetworkParams:
    W11: np.ndarray
    b11: float
    W12: np.ndarray
    b12: float
    W2: np.ndarray
    b2: float

    def to_vector(self) -> np.ndarray:
        v = np.empty(BLOCK_SIZE)
        v[_W11] = np.asarray(self.W11, dtype=float).reshape(9)
        v[_B11] = self.b11
        v[_W12] = np.asarray(self.W12, dtype=float).reshape(9)
        v[_B12] = self.b12
        v[_W2] = np.asarray(self.W2, dtype=float).reshape(2)
        v[_B2] = self.b2
        return v

    @classmethod
    def from_vector(cls, v) -> NetworkParams:
        v = np.asarray(v, dtype=float)
        if v.shape != (BLOCK_SIZE,):
            raise ValueError(f"expected {BLOCK_SIZE} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("parameters must be finite")
        return cls(
            W11=v[_W11].reshape(3, 3).copy(),
            b11=float(v[_B11]),
            W12=v[_W12].reshape(3, 3).copy(),
            b12=float(v[_B12]),
            W2=v[_W2].copy(),
            b2=float(v[_B2]),
        )

    def to_dict(self) -> dict:
        v = self.to_vector()
        return {
            "W11": v[_W11].tolist(),
            "b11": float(v[_B11]),
            "W12": v[_W12].tolist(),
            "b12": float(v[_B12]),
            "W2": v[_W2].tolist(),
            "b2": float(v[_B2]),
        }

    @classmethod
    def from_dict(cls, d: dict) -> NetworkParams:
        v = np.concatenate([d["W11"], [d["b11"]], d["W12"], [d["b12"]], d["W2"], [d["b2"]]]).astype(float)
        return cls.from_vector(v)

    def __eq__(self, other):
        if not isinstance(other, NetworkParams):
            return NotImplemented
        return np.array_equal(self.to_vector(), other.to_vector())


@dataclass(frozen=True, eq=False)
class ModelArch:
    mode: ArchMode
    n_steps: int
    blocks: tuple[NetworkParams, ...]

    def __post_init__(self):
        mode = ArchMode(self.mode)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if mode is ArchMode.SINGLE and self.n_steps != 1:
            raise ValueError("single mode is one step; use recursive for n > 1")
        want = self.n_steps if mode is ArchMode.SEQUENTIAL else 1
        if len(self.blocks) != want:
            raise ValueError(f"{mode.value} mode with n_steps={self.n_steps} needs {want} block(s)")

    @classmethod
    def single(cls, p: NetworkParams) -> ModelArch:
        return cls(ArchMode.SINGLE, 1, (p,))

    @classmethod
    def recursive(cls, p: NetworkParams, n_steps: int) -> ModelArch:
        return cls(ArchMode.RECURSIVE, n_steps, (p,))

    @classmethod
    def sequential(cls, blocks) -> ModelArch:
        blocks = tuple(blocks)
        return cls(ArchMode.SEQUENTIAL, len(blocks), blocks)

    @property
    def n_params(self) -> int:
        return BLOCK_SIZE * len(self.blocks)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([b.to_vector() for b in self.blocks])

    def with_vector(self, v) -> ModelArch:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} values, got shape {v.shape}")
        blocks = [NetworkParams.from_vector(c) for c in v.reshape(-1, BLOCK_SIZE)]
        return ModelArch(self.mode, self.n_steps, tuple(blocks))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "n_steps": self.n_steps,
            "blocks": [b.to_dict() for b in self.blocks],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ModelArch:
        return cls(ArchMode(d["mode"]), int(d["n_steps"]), tuple(NetworkParams.from_dict(b) for b in d["blocks"]))


def as_arch(model, n_steps: int = 1) -> ModelArch:
    """Accept a bare :class:`NetworkParams` as a recursive model of ``n_steps``."""
    if isinstance(model, ModelArch):
        return model
    if isinstance(model, NetworkParams):
        if n_steps == 1:
            return ModelArch.single(model)
        return ModelArch.recursive(model, n_steps)
    raise TypeError(f"expected ModelArch or NetworkParams, got {type(model).__name__}")


def save_model(arch: ModelArch, path) -> None:
    Path(path).write_text(json.dumps(arch.to_dict(), indent=2) + "\n")


def load_model(path) -> ModelArch:
    return ModelArch.from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# analytic constructions and initialization


def make_relu_solution() -> NetworkParams:
    return NetworkParams(
        W11=np.array([[1.0, 1, 1], [1, 0, 1], [1, 1, 1]]),
        b11=-3.0,
        W12=-np.ones((3, 3)),
        b12=3.0,
        W2=np.array([-1.0, -1.0]),
        b2=1.0,
    )


def make_tanh_solution() -> NetworkParams:
    return NetworkParams(
        W11=np.array([[1.0, 1, 1], [1, 3 / 5, 1], [1, 1, 1]]),
        b11=-2.4,
        W12=np.array([[1.0, 1, 1], [1, 2 / 5, 1], [1, 1, 1]]),
        b12=-3.6,
        W2=np.array([2.0, -2.0]),
        b2=-1.0,
    )


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_params(seed: int, act: Activation | str | None = None, block: int = 0) -> NetworkParams:
    """Glorot-uniform kernels and zero biases, drawn from ``default_rng([seed, block])``.

    ``act`` is accepted for call-site symmetry; the initializer is the same for
    both activations.
    """
    if act is not None:
        Activation(act)
    rng = np.random.default_rng([seed, block])
    k1 = rng.uniform(-1.0, 1.0, size=(2, 3, 3)) * glorot_bound(9, 18)
    k2 = rng.uniform(-1.0, 1.0, size=2) * glorot_bound(2, 1)
    return NetworkParams(W11=k1[0], b11=0.0, W12=k1[1], b12=0.0, W2=k2, b2=0.0)


def init_arch(mode: ArchMode | str, n_steps: int, seed: int) -> ModelArch:
    mode = ArchMode(mode)
    if mode is ArchMode.SEQUENTIAL:
        return ModelArch.sequential(init_params(seed, block=k) for k in range(n_steps))
    if n_steps == 1:
        return ModelArch.single(init_params(seed))
    return ModelArch(mode, n_steps, (init_params(seed),))


# ---------------------------------------------------------------------------
# vectorised numerics


def _as_batch(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        return x[None]
    if x.ndim != 3:
        raise ValueError(f"expected (M, N) or (B, M, N) input, got shape {x.shape}")
    return x


def _im2col(x: np.ndarray) -> np.ndarray:
    """(B, M, N) -> (9, B*M*N) stack of zero-padded 3x3 neighborhoods, row-major offsets."""
    B, M, N = x.shape
    p = np.zeros((B, M + 2, N + 2))
    p[:, 1:-1, 1:-1] = x
    cols = np.empty((9, B, M, N))
    k = 0
    for di in range(3):
        for dj in range(3):
            cols[k] = p[:, di : di + M, dj : dj + N]
            k += 1
    return cols.reshape(9, -1)


def _col2im(g: np.ndarray, shape) -> np.ndarray:
    """Adjoint of :func:`_im2col`: scatter-add (9, B*M*N) back onto (B, M, N)."""
    B, M, N = shape
    g = g.reshape(9, B, M, N)
    p = np.zeros((B, M + 2, N + 2))
    k = 0
    for di in range(3):
        for dj in range(3):
            p[:, di : di + M, dj : dj + N] += g[k]
            k += 1
    return p[:, 1:-1, 1:-1]


def _block_forward(v: np.ndarray, act: Activation, x: np.ndarray):
    cols = _im2col(x)
    z1 = v[_W1_ROWS].reshape(2, 9) @ cols
    z1[0] += v[_B11]
    z1[1] += v[_B12]
    a1 = np.maximum(z1, 0.0) if act is Activation.RELU else np.tanh(z1)
    z2 = v[_W2] @ a1 + v[_B2]
    out = np.maximum(z2, 0.0)
    return out.reshape(x.shape), (cols, z1, a1, z2)


def _block_backward(v, act, cache, dout, x_shape, need_dx: bool):
    cols, z1, a1, z2 = cache
    dz2 = np.where(z2 > 0.0, dout.reshape(-1), 0.0)
    g = np.empty(BLOCK_SIZE)
    g[_W2] = a1 @ dz2
    g[_B2] = dz2.sum()
    da1 = np.outer(v[_W2], dz2)
    if act is Activation.RELU:
        dz1 = np.where(z1 > 0.0, da1, 0.0)
    else:
        dz1 = da1 * (1.0 - a1 * a1)
    dW1 = dz1 @ cols.T
    g[_W11] = dW1[0]
    g[_W12] = dW1[1]
    g[_B11] = dz1[0].sum()
    g[_B12] = dz1[1].sum()
    dx = None
    if need_dx:
        dx = _col2im(v[_W1_ROWS].reshape(2, 9).T @ dz1, x_shape)
    return g, dx


def _check_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise NumericalOverflowError(f"non-finite values in {what}")


def _block_vectors(vec: np.ndarray, mode: ArchMode, n_steps: int) -> list[np.ndarray]:
    if mode is ArchMode.SEQUENTIAL:
        return list(vec.reshape(n_steps, BLOCK_SIZE))
    return [vec] * n_steps


def forward_vec(vec, mode, n_steps: int, act, x) -> np.ndarray:
    """Forward pass on a flat parameter vector; ``x`` is ``(M, N)`` or ``(B, M, N)``."""
    act = Activation(act)
    mode = ArchMode(mode)
    h = _as_batch(x)
    with np.errstate(over="ignore", invalid="ignore"):
        for v in _block_vectors(np.asarray(vec, dtype=float), mode, n_steps):
            h, _ = _block_forward(v, act, h)
    _check_finite(h, "forward output")
    return h


def loss_and_grad_vec(vec, mode, n_steps: int, act, x, y) -> tuple[float, np.ndarray]:
    """Mean squared error over all cells and its gradient w.r.t. the flat parameter vector."""
    act = Activation(act)
    mode = ArchMode(mode)
    vec = np.asarray(vec, dtype=float)
    h = _as_batch(x)
    y = _as_batch(y)
    if h.shape != y.shape:
        raise ValueError(f"x and y shapes differ: {h.shape} vs {y.shape}")
    blocks = _block_vectors(vec, mode, n_steps)
    caches = []
    with np.errstate(over="ignore", invalid="ignore"):
        for v in blocks:
            out, cache = _block_forward(v, act, h)
            caches.append(cache)
            h = out
        _check_finite(h, "forward output")
        resid = h - y
        loss = float(np.mean(resid * resid))
        dh = resid * (2.0 / resid.size)
        grads = [None] * n_steps
        for k in range(n_steps - 1, -1, -1):
            grads[k], dh = _block_backward(blocks[k], act, caches[k], dh, y.shape, need_dx=k > 0)
    if mode is ArchMode.SEQUENTIAL:
        grad = np.concatenate(grads)
    else:
        grad = np.sum(grads, axis=0)
    _check_finite(grad, "gradient")
    return loss, grad


# ---------------------------------------------------------------------------
# public API on ModelArch


def forward(arch, act, b) -> np.ndarray:
    """Real-valued network output, same shape as ``b``; blocks feed raw outputs to each other."""
    arch = as_arch(arch)
    out = forward_vec(arch.to_vector(), arch.mode, arch.n_steps, act, b)
    return out.reshape(np.shape(b))


def layer2_preactivation(params: NetworkParams, act, b) -> np.ndarray:
    """Output of the 1x1 combiner before the final ReLU, for a single block."""
    x = _as_batch(b)
    v = params.to_vector()
    _, (_, _, _, z2) = _block_forward(v, Activation(act), x)
    return z2.reshape(np.shape(b))


def binarize(values, threshold: float = 0.5) -> np.ndarray:
    return (np.asarray(values) >= threshold).astype(np.uint8)


def predict(arch, act, b) -> np.ndarray:
    return binarize(forward(arch, act, b))


def loss_mse(arch, act, x, y) -> float:
    arch = as_arch(arch)
    out = forward_vec(arch.to_vector(), arch.mode, arch.n_steps, act, x)
    y = _as_batch(y)
    if out.shape != y.shape:
        raise ValueError(f"x and y shapes differ: {out.shape} vs {y.shape}")
    return float(np.mean((out - y) ** 2))


def backward(arch, act, x, y) -> np.ndarray:
    """Gradient of :func:`loss_mse`, flat and in :meth:`ModelArch.to_vector` order."""
    arch = as_arch(arch)
    _, g = loss_and_grad_vec(arch.to_vector(), arch.mode, arch.n_steps, act, x, y)
    return g
