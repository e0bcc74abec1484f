"""Structured noise: visibility corruption and order-timing perturbation.

Both operations are exact identities when their condition is disabled or
their magnitude parameters are zero, and are bit-reproducible given a fixed
RNG stream.  Prompt generation never sees corrupted data; visibility noise
applies only to the encoded observation on its way to a policy.
"""

from __future__ import annotations

import numpy as np

from .config import NoiseConfig
from .observe import GRID_FEATURES, N_SCALARS


def corrupt_observation(
    obs: np.ndarray, cfg: NoiseConfig, rng: np.random.Generator
) -> np.ndarray:
    """Visibility noise: zero whole per-cell feature blocks, jitter scalars.

    Each cell's feature block is independently zeroed with probability
    visibility_mask_prob; the two trailing task scalars get additive uniform
    noise in [-scalar_jitter, +scalar_jitter], clamped back to [0, 1].
    Returns the input untouched when the condition is disabled.
    """
    if not cfg.visibility_enabled:
        return obs
    n_cells = (obs.shape[-1] - N_SCALARS) // GRID_FEATURES
    out = obs.copy()
    mask = rng.random(n_cells) < cfg.visibility_mask_prob
    grid = out[: n_cells * GRID_FEATURES].reshape(n_cells, GRID_FEATURES)
    grid[mask] = 0.0
    jitter = rng.uniform(-cfg.scalar_jitter, cfg.scalar_jitter, N_SCALARS)
    out[-N_SCALARS:] = np.clip(out[-N_SCALARS:] + jitter, 0.0, 1.0)
    return out


def corrupt_observation_batch(
    obs: np.ndarray, cfg: NoiseConfig, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized corrupt_observation over a (B, obs_dim) batch.

    Draw semantics match the scalar op per row (independent cell masks and
    scalar jitter); one rng services the whole batch.
    """
    if not cfg.visibility_enabled:
        return obs
    batch, dim = obs.shape
    n_cells = (dim - N_SCALARS) // GRID_FEATURES
    out = obs.copy()
    mask = rng.random((batch, n_cells)) < cfg.visibility_mask_prob
    grid = out[:, : n_cells * GRID_FEATURES].reshape(batch, n_cells, GRID_FEATURES)
    grid[mask] = 0.0
    jitter = rng.uniform(-cfg.scalar_jitter, cfg.scalar_jitter, (batch, N_SCALARS))
    out[:, -N_SCALARS:] = np.clip(out[:, -N_SCALARS:] + jitter, 0.0, 1.0)
    return out


def perturb_schedule(
    arrivals: np.ndarray,
    deadlines: np.ndarray,
    cfg: NoiseConfig,
    horizon: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Order-timing noise, drawn once per episode at reset.

    Every order's arrival shifts by an integer offset uniform in [-J, +J]
    (clamped to [0, horizon-1]); its deadline shifts by the same offset
    (clamped to horizon, kept strictly after the arrival).  The queue is
    then stably re-sorted by arrival, which realizes reordering.
    """
    if not cfg.timing_enabled or cfg.timing_jitter == 0:
        return arrivals, deadlines
    j = int(cfg.timing_jitter)
    offsets = rng.integers(-j, j + 1, size=len(arrivals))
    new_arrivals = np.clip(arrivals + offsets, 0, horizon - 1)
    new_deadlines = np.maximum(np.minimum(deadlines + offsets, horizon), new_arrivals + 1)
    order = np.argsort(new_arrivals, kind="stable")
    return new_arrivals[order], new_deadlines[order]
