"""First-order optimizers as pure state transitions.

``opt_step(cfg, state, params, grad)`` returns ``(new_params, new_state)``
and never mutates its inputs. Parameters and gradients are flat float
vectors; the optional ``layout`` carried by the state (a list of tensor
shapes) is only consulted by Adafactor, which factors its second-moment
estimate for 2-D tensors.

Update rules and defaults follow the TensorFlow/Keras formulations of each
algorithm, e.g. Adam uses the "epsilon hat" form where epsilon is added to
``sqrt(v_t)`` without bias correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

ALGORITHMS = (
    "Adadelta",
    "Adafactor",
    "Adagrad",
    "Adam",
    "AdamW",
    "Adamax",
    "Ftrl",
    "Nadam",
    "RMSprop",
    "SGD",
)

LEARNING_RATE_GRID = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)

_DEFAULTS: dict[str, dict[str, float]] = {
    "Adadelta": {"rho": 0.95, "epsilon": 1e-7},
    "Adafactor": {
        "beta_2_decay": -0.8,
        "epsilon_1": 1e-30,
        "clip_threshold": 1.0,
    },
    "Adagrad": {"initial_accumulator_value": 0.1, "epsilon": 1e-7},
    "Adam": {"beta_1": 0.9, "beta_2": 0.999, "epsilon": 1e-7},
    "AdamW": {"beta_1": 0.9, "beta_2": 0.999, "epsilon": 1e-7, "weight_decay": 0.004},
    "Adamax": {"beta_1": 0.9, "beta_2": 0.999, "epsilon": 1e-7},
    "Ftrl": {
        "learning_rate_power": -0.5,
        "initial_accumulator_value": 0.1,
        "l1_regularization_strength": 0.0,
        "l2_regularization_strength": 0.0,
    },
    "Nadam": {"beta_1": 0.9, "beta_2": 0.999, "epsilon": 1e-7},
    "RMSprop": {"rho": 0.9, "epsilon": 1e-7},
    "SGD": {"momentum": 0.9},
}


class DivergenceError(FloatingPointError):
    """Raised when a gradient or an updated parameter is not finite."""


def canonical_name(algorithm: str) -> str:
    for name in ALGORITHMS:
        if name.lower() == str(algorithm).lower():
            return name
    raise ValueError(f"unknown optimizer {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")


@dataclass(frozen=True)
class OptimizerConfig:
    algorithm: str
    learning_rate: float
    hyper: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "algorithm", canonical_name(self.algorithm))
        if not (self.learning_rate >= 0.0 and math.isfinite(self.learning_rate)):
            raise ValueError(f"learning_rate must be finite and >= 0, got {self.learning_rate}")
        if self.algorithm == "Ftrl" and self.learning_rate == 0.0:
            # the FTRL update divides by the learning rate
            raise ValueError("Ftrl requires learning_rate > 0")
        known = _DEFAULTS[self.algorithm]
        unknown = set(self.hyper) - set(known)
        if unknown:
            raise ValueError(f"unknown hyperparameters for {self.algorithm}: {sorted(unknown)}")
        object.__setattr__(self, "hyper", {**known, **self.hyper})

    def __getitem__(self, key: str) -> float:
        return self.hyper[key]

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "learning_rate": self.learning_rate, **self.hyper}

    @classmethod
    def from_dict(cls, d: dict) -> OptimizerConfig:
        d = dict(d)
        return cls(d.pop("algorithm"), float(d.pop("learning_rate")), d)


def default_config(algorithm: str, learning_rate: float = 1e-3) -> OptimizerConfig:
    return OptimizerConfig(algorithm, learning_rate)


@dataclass(frozen=True, eq=False)
class OptimizerState:
    t: int
    slots: dict
    layout: tuple = ()

    def copy(self) -> OptimizerState:
        return replace(self, slots={k: _copy(v) for k, v in self.slots.items()})


def _copy(v):
    if isinstance(v, np.ndarray):
        return v.copy()
    if isinstance(v, list):
        return [_copy(x) for x in v]
    return v


def _normalize_layout(size: int, layout) -> tuple:
    if layout is None:
        return ((size,),)
    layout = tuple(tuple(int(d) for d in s) for s in layout)
    if sum(int(np.prod(s)) for s in layout) != size:
        raise ValueError("layout does not cover the parameter vector")
    return layout


def init_state(cfg: OptimizerConfig, params, layout=None) -> OptimizerState:
    """Zeroed slots (or the configured initial accumulator) sized to ``params``."""
    params = np.asarray(params, dtype=float)
    n = params.size
    layout = _normalize_layout(n, layout)
    h = cfg.hyper
    a = cfg.algorithm
    if a == "SGD":
        slots = {"momentum": np.zeros(n)}
    elif a == "Adagrad":
        slots = {"accumulator": np.full(n, h["initial_accumulator_value"])}
    elif a == "RMSprop":
        slots = {"velocity": np.zeros(n)}
    elif a == "Adadelta":
        slots = {"accumulated_grad": np.zeros(n), "accumulated_delta": np.zeros(n)}
    elif a in ("Adam", "AdamW", "Nadam"):
        slots = {"m": np.zeros(n), "v": np.zeros(n)}
        if a == "Nadam":
            slots["u_product"] = 1.0
    elif a == "Adamax":
        slots = {"m": np.zeros(n), "u": np.zeros(n)}
    elif a == "Ftrl":
        slots = {"accumulator": np.full(n, h["initial_accumulator_value"]), "linear": np.zeros(n)}
    elif a == "Adafactor":
        r, c, v = [], [], []
        for shape in layout:
            if len(shape) >= 2:
                r.append(np.zeros(shape[:-1]))
                c.append(np.zeros(shape[:-2] + shape[-1:]))
                v.append(None)
            else:
                r.append(None)
                c.append(None)
                v.append(np.zeros(shape))
        slots = {"r": r, "c": c, "v": v}
    else:  # pragma: no cover - canonical_name guards this
        raise ValueError(a)
    return OptimizerState(t=0, slots=slots, layout=layout)


def opt_step(cfg: OptimizerConfig, state: OptimizerState, params, grad):
    """One update of ``cfg.algorithm``; returns ``(params', state')``."""
    params = np.asarray(params, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if params.shape != grad.shape:
        raise ValueError(f"params and grad shapes differ: {params.shape} vs {grad.shape}")
    if not np.all(np.isfinite(grad)):
        raise DivergenceError("non-finite gradient")
    flat_p = params.reshape(-1)
    flat_g = grad.reshape(-1)
    new_p, slots = _UPDATES[cfg.algorithm](cfg.hyper, cfg.learning_rate, state.t + 1, state, flat_p, flat_g)
    if not np.all(np.isfinite(new_p)):
        raise DivergenceError(f"{cfg.algorithm} produced non-finite parameters")
    return new_p.reshape(params.shape), OptimizerState(t=state.t + 1, slots=slots, layout=state.layout)


def _sgd(h, lr, t, st, p, g):
    m = h["momentum"] * st.slots["momentum"] - lr * g
    return p + m, {"momentum": m}


def _adagrad(h, lr, t, st, p, g):
    acc = st.slots["accumulator"] + g * g
    return p - lr * g / np.sqrt(acc + h["epsilon"]), {"accumulator": acc}


def _rmsprop(h, lr, t, st, p, g):
    rho = h["rho"]
    v = rho * st.slots["velocity"] + (1.0 - rho) * g * g
    return p - lr * g / np.sqrt(v + h["epsilon"]), {"velocity": v}


def _adadelta(h, lr, t, st, p, g):
    rho, eps = h["rho"], h["epsilon"]
    ag = rho * st.slots["accumulated_grad"] + (1.0 - rho) * g * g
    adv = st.slots["accumulated_delta"]
    delta = np.sqrt(adv + eps) / np.sqrt(ag + eps) * g
    adv = rho * adv + (1.0 - rho) * delta * delta
    return p - lr * delta, {"accumulated_grad": ag, "accumulated_delta": adv}


def _adam(h, lr, t, st, p, g):
    b1, b2 = h["beta_1"], h["beta_2"]
    m = st.slots["m"] + (g - st.slots["m"]) * (1.0 - b1)
    v = st.slots["v"] + (g * g - st.slots["v"]) * (1.0 - b2)
    alpha = lr * math.sqrt(1.0 - b2**t) / (1.0 - b1**t)
    return p - alpha * m / (np.sqrt(v) + h["epsilon"]), {"m": m, "v": v}


def _adamw(h, lr, t, st, p, g):
    # decoupled decay is applied to the pre-update parameters
    return _adam(h, lr, t, st, p - p * h["weight_decay"] * lr, g)


def _adamax(h, lr, t, st, p, g):
    b1, b2 = h["beta_1"], h["beta_2"]
    m = st.slots["m"] + (g - st.slots["m"]) * (1.0 - b1)
    u = np.maximum(b2 * st.slots["u"], np.abs(g))
    return p - lr * m / ((1.0 - b1**t) * (u + h["epsilon"])), {"m": m, "u": u}


def _nadam(h, lr, t, st, p, g):
    b1, b2 = h["beta_1"], h["beta_2"]
    # momentum schedule as in the Keras optimizer: mu_t = b1 * (1 - 0.5 * 0.96^t)
    u_t = b1 * (1.0 - 0.5 * 0.96**t)
    u_t1 = b1 * (1.0 - 0.5 * 0.96 ** (t + 1))
    u_prod = st.slots["u_product"] * u_t
    u_prod_next = u_prod * u_t1
    m = st.slots["m"] + (g - st.slots["m"]) * (1.0 - b1)
    v = st.slots["v"] + (g * g - st.slots["v"]) * (1.0 - b2)
    m_hat = u_t1 * m / (1.0 - u_prod_next) + (1.0 - u_t) * g / (1.0 - u_prod)
    v_hat = v / (1.0 - b2**t)
    return p - lr * m_hat / (np.sqrt(v_hat) + h["epsilon"]), {"m": m, "v": v, "u_product": u_prod}


def _ftrl(h, lr, t, st, p, g):
    power = -h["learning_rate_power"]
    l1 = h["l1_regularization_strength"]
    l2 = h["l2_regularization_strength"]
    acc = st.slots["accumulator"]
    new_acc = acc + g * g
    sigma = (new_acc**power - acc**power) / lr
    linear = st.slots["linear"] + g - sigma * p
    quadratic = new_acc**power / lr + 2.0 * l2
    new_p = (np.clip(linear, -l1, l1) - linear) / quadratic
    return new_p, {"accumulator": new_acc, "linear": linear}


def _rms(a: np.ndarray) -> float:
    return float(np.sqrt(np.mean(a * a)))


def _adafactor(h, lr, t, st, p, g):
    beta = 1.0 - t ** h["beta_2_decay"]
    eps1 = h["epsilon_1"]
    clip = h["clip_threshold"]
    new_p = p.copy()
    r_out, c_out, v_out = [], [], []
    offset = 0
    for shape, r, c, v in zip(st.layout, st.slots["r"], st.slots["c"], st.slots["v"]):
        size = int(np.prod(shape))
        gi = g[offset : offset + size].reshape(shape)
        sq = gi * gi + eps1
        if len(shape) >= 2:
            r = beta * r + (1.0 - beta) * sq.mean(axis=-1)
            c = beta * c + (1.0 - beta) * sq.mean(axis=-2)
            v_hat = (r / r.mean(axis=-1, keepdims=True))[..., None] * c[..., None, :]
        else:
            v = beta * v + (1.0 - beta) * sq
            v_hat = v
        u = gi / np.sqrt(v_hat)
        u = u / max(1.0, _rms(u) / clip)
        new_p[offset : offset + size] -= lr * u.reshape(-1)
        r_out.append(r)
        c_out.append(c)
        v_out.append(v if len(shape) < 2 else None)
        offset += size
    return new_p, {"r": r_out, "c": c_out, "v": v_out}


_UPDATES = {
    "Adadelta": _adadelta,
    "Adafactor": _adafactor,
    "Adagrad": _adagrad,
    "Adam": _adam,
    "AdamW": _adamw,
    "Adamax": _adamax,
    "Ftrl": _ftrl,
    "Nadam": _nadam,
    "RMSprop": _rmsprop,
    "SGD": _sgd,
}
