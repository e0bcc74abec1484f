"""Numeric core: shaped rewards, TD errors, GAE, and return targets.

All functions accept either 1-D arrays (one trajectory) or 2-D arrays of
shape (T, B) holding B parallel trajectories; terminal flags truncate the
advantage accumulation at episode boundaries.  gamma is the discount,
lambda_gae the advantage decay; the shaping coefficient lambda_bonus is a
separate knob and never appears here.
"""

from __future__ import annotations

import numpy as np

from .config import GaeConfig


def shape_reward(r: float, bonus: float) -> float:
    return r + bonus


def td_errors(
    rewards: np.ndarray,
    values: np.ndarray,
    next_values: np.ndarray,
    terminals: np.ndarray,
    cfg: GaeConfig,
) -> np.ndarray:
    """delta_t = r'_t + gamma * V(s_{t+1}) * (1 - terminal_t) - V(s_t)."""
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    next_values = np.asarray(next_values, dtype=np.float64)
    cont = 1.0 - np.asarray(terminals, dtype=np.float64)
    return rewards + cfg.gamma * next_values * cont - values


def gae_advantages(
    deltas: np.ndarray, terminals: np.ndarray, cfg: GaeConfig
) -> np.ndarray:
    """Backward recursion A_t = delta_t + gamma*lambda*(1-term_t)*A_{t+1}.

    Equivalent to the truncated power series sum_k (gamma*lambda)^k
    delta_{t+k} with accumulation reset at episode boundaries.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    cont = 1.0 - np.asarray(terminals, dtype=np.float64)
    decay = cfg.gamma * cfg.lambda_gae
    adv = np.zeros_like(deltas)
    acc = np.zeros(deltas.shape[1:], dtype=np.float64)
    for t in range(len(deltas) - 1, -1, -1):
        acc = deltas[t] + decay * cont[t] * acc
        adv[t] = acc
    return adv


def discounted_returns(
    deltas: np.ndarray, values: np.ndarray, terminals: np.ndarray, cfg: GaeConfig
) -> np.ndarray:
    """GAE-consistent value targets G_t = A_t + V(s_t)."""
    return gae_advantages(deltas, terminals, cfg) + np.asarray(values, dtype=np.float64)


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    last_values: np.ndarray | float,
    terminals: np.ndarray,
    cfg: GaeConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Rollout-shaped helper: (advantages, returns) from (T, B) buffers.

    values has the step values; bootstrap uses values shifted by one step
    with last_values (the value of the observation after the final step)
    closing the tail.  Where a step is terminal the bootstrap is zero.
    """
    values = np.asarray(values, dtype=np.float64)
    next_values = np.concatenate(
        [values[1:], np.asarray(last_values, dtype=np.float64)[None, ...]], axis=0
    )
    deltas = td_errors(rewards, values, next_values, terminals, cfg)
    adv = gae_advantages(deltas, terminals, cfg)
    return adv, adv + values
