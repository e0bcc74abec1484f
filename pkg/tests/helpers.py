"""Shared test oracles: advantage series expansion, PPO gradient check."""

import numpy as np

from burger_kitchen.config import PpoConfig
from burger_kitchen.env import N_ACTIONS
from burger_kitchen.nets import PARAM_KEYS, init_policy
from burger_kitchen.ppo import _minibatch_grads, evaluate_actions


def series_oracle(deltas, terminals, gamma, lam):
    """Direct double-loop expansion: A_t = sum_l (gamma*lam)^l * delta_{t+l}.

    Written independently of the backward recursion it checks; truncates at
    episode boundaries.
    """
    n = len(deltas)
    out = np.zeros(n, dtype=np.float64)
    for t in range(n):
        coef = 1.0
        for l in range(t, n):
            out[t] += coef * deltas[l]
            if terminals[l]:
                break
            coef *= gamma * lam
    return out


def ppo_gradcheck(seed: int, n_coords: int = 100, h: float = 1e-5) -> float:
    """Worst relative error, analytic vs central differences, on a toy net.

    Builds a float64 6-obs / 8-hidden policy, a random batch whose behavior
    log-probs come from a slightly perturbed parameter copy (so ratios sit
    strictly inside the clip band, away from the kinks), then compares the
    analytic gradient of the full loss (policy + value + entropy terms)
    against (L(w+h) - L(w-h)) / 2h at n_coords random coordinates.
    """
    rng = np.random.default_rng(seed)
    params = init_policy(seed, obs_dim=6, hidden=8, dtype=np.float64)
    for k in PARAM_KEYS:
        params.arrays[k] = params.arrays[k] + rng.normal(0.0, 0.05, params.arrays[k].shape)
    obs = rng.normal(size=(48, 6))
    actions = rng.integers(0, N_ACTIONS, size=48)
    behavior = params.copy()
    for k in PARAM_KEYS:
        behavior.arrays[k] += rng.normal(0.0, 0.01, behavior.arrays[k].shape)
    old_logp, _, _ = evaluate_actions(behavior, obs, actions)
    adv = rng.normal(size=48)
    returns = rng.normal(size=48)
    hp = PpoConfig()

    def loss_at():
        return _minibatch_grads(params, obs, actions, old_logp, adv, returns, hp)

    _, grads, _ = loss_at()
    worst = 0.0
    for _ in range(n_coords):
        k = PARAM_KEYS[int(rng.integers(len(PARAM_KEYS)))]
        arr = params.arrays[k]
        idx = np.unravel_index(int(rng.integers(arr.size)), arr.shape)
        orig = arr[idx]
        arr[idx] = orig + h
        up, _, _ = loss_at()
        arr[idx] = orig - h
        down, _, _ = loss_at()
        arr[idx] = orig
        fd = (up - down) / (2.0 * h)
        an = float(grads[k][idx])
        rel = abs(fd - an) / max(abs(fd), abs(an), 1e-6)
        worst = max(worst, rel)
    return worst
