"""Dense networks with manual gradients, plus the Adam optimizer.

One PolicyParams bundle holds two tanh MLPs over the same observation:
a policy head (obs_dim -> hidden -> hidden -> n_actions logits) and a value
head (obs_dim -> hidden -> hidden -> 1).  Weights are stored row-major as
(fan_in, fan_out) so the forward pass is x @ W + b.  All math follows the
dtype of the parameter arrays; training uses float32, gradient-check tests
build float64 parameter sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import OBS_SCHEMA_VERSION
from .env import N_ACTIONS
from .errors import NumericFault

HIDDEN_GAIN = float(np.sqrt(2.0))
POLICY_OUT_GAIN = 0.01
VALUE_OUT_GAIN = 1.0


@dataclass
class PolicyParams:
    arrays: dict[str, np.ndarray]
    obs_dim: int
    hidden: int
    schema_version: str = OBS_SCHEMA_VERSION

    def copy(self) -> "PolicyParams":
        return PolicyParams(
            arrays={k: v.copy() for k, v in self.arrays.items()},
            obs_dim=self.obs_dim,
            hidden=self.hidden,
            schema_version=self.schema_version,
        )

    @property
    def dtype(self) -> np.dtype:
        return self.arrays["p.W0"].dtype


PARAM_KEYS = (
    "p.W0", "p.b0", "p.W1", "p.b1", "p.W2", "p.b2",
    "v.W0", "v.b0", "v.W1", "v.b1", "v.W2", "v.b2",
)


def _orthogonal(rng: np.random.Generator, n_in: int, n_out: int, gain: float) -> np.ndarray:
    """Orthogonal matrix scaled by gain, QR sign-fixed for determinism."""
    big, small = max(n_in, n_out), min(n_in, n_out)
    a = rng.standard_normal((big, small))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    w = q if n_in >= n_out else q.T
    return gain * w[:n_in, :n_out]


def init_policy(
    seed: int, obs_dim: int, hidden: int = 64, dtype=np.float32
) -> PolicyParams:
    """Deterministic orthogonal init; same seed -> identical weights."""
    if obs_dim <= 0:
        raise ValueError(f"obs_dim must be positive, got {obs_dim}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    arrays: dict[str, np.ndarray] = {}
    for prefix, n_out, out_gain in (("p", N_ACTIONS, POLICY_OUT_GAIN), ("v", 1, VALUE_OUT_GAIN)):
        dims = (obs_dim, hidden, hidden, n_out)
        gains = (HIDDEN_GAIN, HIDDEN_GAIN, out_gain)
        for layer in range(3):
            arrays[f"{prefix}.W{layer}"] = _orthogonal(
                rng, dims[layer], dims[layer + 1], gains[layer]
            ).astype(dtype)
            arrays[f"{prefix}.b{layer}"] = np.zeros(dims[layer + 1], dtype=dtype)
    return PolicyParams(arrays=arrays, obs_dim=obs_dim, hidden=hidden)


def _mlp_forward(arrays: dict, prefix: str, x: np.ndarray):
    """Two tanh hidden layers, linear output; returns (out, cache)."""
    w0, b0 = arrays[f"{prefix}.W0"], arrays[f"{prefix}.b0"]
    w1, b1 = arrays[f"{prefix}.W1"], arrays[f"{prefix}.b1"]
    w2, b2 = arrays[f"{prefix}.W2"], arrays[f"{prefix}.b2"]
    a0 = np.tanh(x @ w0 + b0)
    a1 = np.tanh(a0 @ w1 + b1)
    out = a1 @ w2 + b2
    return out, (x, a0, a1)


def _mlp_backward(arrays: dict, prefix: str, cache, dout: np.ndarray) -> dict:
    """Gradients of a scalar loss wrt one head's parameters.

    dout is dL/d(out), shape (B, n_out).  tanh' = 1 - a^2 on the cached
    activations.
    """
    x, a0, a1 = cache
    w1, w2 = arrays[f"{prefix}.W1"], arrays[f"{prefix}.W2"]
    grads = {
        f"{prefix}.W2": a1.T @ dout,
        f"{prefix}.b2": dout.sum(axis=0),
    }
    da1 = (dout @ w2.T) * (1.0 - a1 * a1)
    grads[f"{prefix}.W1"] = a0.T @ da1
    grads[f"{prefix}.b1"] = da1.sum(axis=0)
    da0 = (da1 @ w1.T) * (1.0 - a0 * a0)
    grads[f"{prefix}.W0"] = x.T @ da0
    grads[f"{prefix}.b0"] = da0.sum(axis=0)
    return grads


def policy_logits(params: PolicyParams, obs: np.ndarray):
    return _mlp_forward(params.arrays, "p", obs)


def value_forward(params: PolicyParams, obs: np.ndarray):
    out, cache = _mlp_forward(params.arrays, "v", obs)
    return out[..., 0], cache


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(logits))


def assert_finite(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise NumericFault(f"non-finite values in {name}")


def global_grad_norm(grads: dict[str, np.ndarray]) -> float:
    total = 0.0
    for g in grads.values():
        total += float(np.sum(np.asarray(g, dtype=np.float64) ** 2))
    return float(np.sqrt(total))


def clip_grads(grads: dict[str, np.ndarray], max_norm: float) -> tuple[dict, float]:
    """Joint norm clip across every array; returns (grads, pre-clip norm)."""
    norm = global_grad_norm(grads)
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        grads = {k: g * scale for k, g in grads.items()}
    return grads, norm


@dataclass
class Adam:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def step(self, params: PolicyParams, grads: dict[str, np.ndarray]) -> None:
        if not self.m:
            for k, arr in params.arrays.items():
                self.m[k] = np.zeros_like(arr)
                self.v[k] = np.zeros_like(arr)
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for k, g in grads.items():
            g = g.astype(params.arrays[k].dtype, copy=False)
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * (g * g)
            mhat = self.m[k] / c1
            vhat = self.v[k] / c2
            params.arrays[k] -= (self.lr * mhat / (np.sqrt(vhat) + self.eps)).astype(
                params.arrays[k].dtype, copy=False
            )
