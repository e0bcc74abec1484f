"""Clipped-surrogate policy optimization over the dense nets.

act/evaluate work on batched observations.  ppo_update minimizes

    -E[min(ratio * A, clip(ratio, 1-eps, 1+eps) * A)]
    + value_coef * E[(V - G)^2] - entropy_coef * E[H]

with analytic gradients, a joint gradient-norm clip, Adam, and an
approximate-KL early stop.  Advantages are normalized (zero mean, unit
variance) over the whole batch before the epoch loop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PpoConfig
from .errors import NumericFault
from .nets import (
    Adam,
    PolicyParams,
    _mlp_backward,
    assert_finite,
    clip_grads,
    log_softmax,
    policy_logits,
    softmax,
    value_forward,
)


def act_batch(
    params: PolicyParams,
    obs: np.ndarray,
    rng: np.random.Generator | None,
    deterministic: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample (or argmax) actions for a batch of observations.

    Returns (actions, log_probs, values).  Raises NumericFault on any
    non-finite network output.
    """
    logits, _ = policy_logits(params, obs)
    assert_finite("policy logits", logits)
    values, _ = value_forward(params, obs)
    assert_finite("value output", values)
    logp_all = log_softmax(logits)
    if deterministic:
        actions = np.argmax(logits, axis=-1)
    else:
        # Gumbel-max sampling: one rng draw block per call, vectorized.
        u = rng.random(logits.shape)
        gumbel = -np.log(-np.log(np.maximum(u, 1e-12)))
        actions = np.argmax(logits + gumbel, axis=-1)
    logp = np.take_along_axis(logp_all, actions[..., None], axis=-1)[..., 0]
    return actions.astype(np.int64), logp, values


def act(
    params: PolicyParams,
    obs: np.ndarray,
    rng: np.random.Generator | None = None,
    deterministic: bool = False,
) -> tuple[int, float, float]:
    actions, logp, values = act_batch(params, obs[None, :], rng, deterministic)
    return int(actions[0]), float(logp[0]), float(values[0])


def evaluate_actions(
    params: PolicyParams, obs: np.ndarray, actions: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(log_probs, entropies, values) for given obs/action pairs."""
    logits, _ = policy_logits(params, obs)
    logp_all = log_softmax(logits)
    probs = np.exp(logp_all)
    entropy = -(probs * logp_all).sum(axis=-1)
    logp = np.take_along_axis(logp_all, actions[..., None], axis=-1)[..., 0]
    values, _ = value_forward(params, obs)
    return logp, entropy, values


@dataclass
class UpdateStats:
    policy_loss: float
    value_loss: float
    entropy: float
    approx_kl: float
    clip_fraction: float
    grad_norm: float
    epochs_run: int
    early_stopped: bool


def normalize_advantages(adv: np.ndarray) -> np.ndarray:
    mean = adv.mean()
    std = adv.std()
    if std < 1e-8:
        return adv - mean
    return (adv - mean) / std


def _minibatch_grads(
    params: PolicyParams,
    obs: np.ndarray,
    actions: np.ndarray,
    old_logp: np.ndarray,
    adv: np.ndarray,
    returns: np.ndarray,
    hp: PpoConfig,
):
    """Loss value and analytic parameter gradients on one minibatch."""
    n = obs.shape[0]
    logits, p_cache = policy_logits(params, obs)
    logp_all = log_softmax(logits)
    probs = np.exp(logp_all)
    logp = np.take_along_axis(logp_all, actions[:, None], axis=-1)[:, 0]
    ratio = np.exp(logp - old_logp)

    pg1 = ratio * adv
    pg2 = np.clip(ratio, 1.0 - hp.clip_eps, 1.0 + hp.clip_eps) * adv
    policy_loss = -np.minimum(pg1, pg2).mean()
    clip_fraction = float(np.mean(np.abs(ratio - 1.0) > hp.clip_eps))

    entropy = -(probs * logp_all).sum(axis=-1)
    entropy_mean = entropy.mean()

    values, v_cache = value_forward(params, obs)
    v_err = values - returns
    value_loss = float(np.mean(v_err**2))

    loss = float(policy_loss) + hp.value_coef * value_loss - hp.entropy_coef * float(entropy_mean)
    if not np.isfinite(loss):
        raise NumericFault(f"non-finite PPO loss: {loss}")

    # d(policy_loss)/d(logp_a): the unclipped branch is active where
    # pg1 <= pg2; the clipped branch is constant in theta there, so its
    # gradient contribution is zero.
    active = (pg1 <= pg2).astype(logits.dtype)
    dlogp = -(ratio * adv * active) / n
    # dlogp_a/dlogits = onehot(a) - softmax(logits)
    onehot = np.zeros_like(logits)
    onehot[np.arange(n), actions] = 1.0
    dlogits = dlogp[:, None] * (onehot - probs)
    # entropy term: d(-c_H * mean(H))/dz_j = c_H/n * p_j * (logp_j + H)
    dlogits += (hp.entropy_coef / n) * probs * (logp_all + entropy[:, None])

    grads = _mlp_backward(params.arrays, "p", p_cache, dlogits)
    dvalues = (2.0 * hp.value_coef / n) * v_err
    grads.update(_mlp_backward(params.arrays, "v", v_cache, dvalues[:, None]))

    approx_kl = float(np.mean(old_logp - logp))
    return loss, grads, {
        "policy_loss": float(policy_loss),
        "value_loss": value_loss,
        "entropy": float(entropy_mean),
        "approx_kl": approx_kl,
        "clip_fraction": clip_fraction,
    }


def ppo_update(
    params: PolicyParams,
    batch: dict[str, np.ndarray],
    hp: PpoConfig,
    optimizer: Adam,
    rng: np.random.Generator,
) -> tuple[PolicyParams, UpdateStats]:
    """Run epochs x minibatches of clipped-surrogate updates in place.

    batch keys: obs (N, D), actions (N,), old_logp (N,), advantages (N,),
    returns (N,).  Updates stop early once the approximate KL on a
    minibatch exceeds hp.kl_stop.
    """
    n = batch["obs"].shape[0]
    dtype = params.dtype
    obs = batch["obs"].astype(dtype, copy=False)
    actions = batch["actions"].astype(np.int64, copy=False)
    old_logp = batch["old_logp"].astype(dtype, copy=False)
    adv = normalize_advantages(batch["advantages"].astype(dtype, copy=False))
    returns = batch["returns"].astype(dtype, copy=False)

    last = {
        "policy_loss": 0.0,
        "value_loss": 0.0,
        "entropy": 0.0,
        "approx_kl": 0.0,
        "clip_fraction": 0.0,
    }
    grad_norms = []
    early_stopped = False
    epochs_run = 0
    for _ in range(hp.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, hp.minibatch):
            idx = perm[start : start + hp.minibatch]
            _, grads, stats = _minibatch_grads(
                params, obs[idx], actions[idx], old_logp[idx], adv[idx], returns[idx], hp
            )
            last = stats
            if stats["approx_kl"] > hp.kl_stop:
                early_stopped = True
                break
            grads, norm = clip_grads(grads, hp.max_grad_norm)
            grad_norms.append(norm)
            optimizer.step(params, grads)
        epochs_run += 1
        if early_stopped:
            break

    for k, arr in params.arrays.items():
        assert_finite(f"params[{k}]", arr)
    return params, UpdateStats(
        policy_loss=last["policy_loss"],
        value_loss=last["value_loss"],
        entropy=last["entropy"],
        approx_kl=last["approx_kl"],
        clip_fraction=last["clip_fraction"],
        grad_norm=float(np.mean(grad_norms)) if grad_norms else 0.0,
        epochs_run=epochs_run,
        early_stopped=early_stopped,
    )
