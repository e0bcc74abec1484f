"""Training driver: two independent learners on the shared team signal.

Each agent owns its parameters, optimizer, and update stream; nothing is
shared between them except the environment and the scalar reward.  The
shaped configuration trains on base reward + verdict bonus + curriculum
potential (optionally annealed over aux_anneal_steps) with exploring
starts; the baseline configuration trains on the plain sparse team reward.
Learning rate and entropy coefficient follow an optional hold-then-anneal
schedule shared by both arms.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from .advantage import compute_gae
from .config import RunConfig
from .evaluator import make_evaluator
from .nets import Adam, PolicyParams, init_policy
from .observe import obs_dim
from .ppo import ppo_update
from .rollout import VecEnvs, collect_rollout


def _rng_seed(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class TrainResult:
    params: tuple[PolicyParams, PolicyParams]
    history: list[dict]
    total_steps: int
    wall_seconds: float


def train_pair(
    config: RunConfig, run_seed: int, progress: bool = False
) -> TrainResult:
    """Train both agents for config.ppo.total_steps environment steps."""
    ppo_cfg = config.ppo
    dim = obs_dim(config)
    root = np.random.SeedSequence(run_seed)
    init0, init1, act0, act1, noise0, noise1, upd0, upd1, env_ss = root.spawn(9)

    params = [
        init_policy(_rng_seed(init0), dim, ppo_cfg.hidden),
        init_policy(_rng_seed(init1), dim, ppo_cfg.hidden),
    ]
    optimizers = [Adam(lr=ppo_cfg.learning_rate), Adam(lr=ppo_cfg.learning_rate)]
    act_rngs = [np.random.default_rng(act0), np.random.default_rng(act1)]
    noise_rngs = [np.random.default_rng(noise0), np.random.default_rng(noise1)]
    update_rngs = [np.random.default_rng(upd0), np.random.default_rng(upd1)]

    evaluator = make_evaluator(config) if config.shaping.enabled else None
    vec = VecEnvs(config=config, run_seed=_rng_seed(env_ss), n_envs=ppo_cfg.n_envs)

    history: list[dict] = []
    global_step = 0
    t_start = time.monotonic()
    while global_step < ppo_cfg.total_steps:
        # learning rate: optional flat hold, then the reference linear anneal
        decay_steps = max(ppo_cfg.total_steps * (1.0 - ppo_cfg.lr_hold_frac), 1.0)
        lr_frac = min(1.0, max((ppo_cfg.total_steps - global_step) / decay_steps, 0.0))
        for opt in optimizers:
            opt.lr = ppo_cfg.learning_rate * lr_frac
        # entropy bonus follows the same schedule between its two endpoints
        ent_scale = ppo_cfg.entropy_scale_min + lr_frac * (
            ppo_cfg.entropy_scale_max - ppo_cfg.entropy_scale_min
        )
        update_cfg = dataclasses.replace(
            ppo_cfg, entropy_coef=ppo_cfg.entropy_coef * ent_scale
        )
        if ppo_cfg.aux_anneal_steps > 0:
            aux_scale = max(0.0, 1.0 - global_step / ppo_cfg.aux_anneal_steps)
        else:
            aux_scale = 1.0  # no anneal: constant curriculum weight
        batch = collect_rollout(
            vec,
            params,
            evaluator,
            config,
            act_rngs,
            noise_rngs,
            ppo_cfg.rollout_len,
            aux_scale,
        )
        global_step += batch.n_steps

        row = {
            "step": global_step,
            "lr": ppo_cfg.learning_rate * lr_frac,
            "entropy_coef": update_cfg.entropy_coef,
            "aux_scale": round(aux_scale, 6),
            "episodes": len(batch.completed),
            "mean_base_return": (
                float(np.mean([e.base_return for e in batch.completed]))
                if batch.completed
                else float("nan")
            ),
            "mean_deliveries": (
                float(np.mean([e.deliveries for e in batch.completed]))
                if batch.completed
                else float("nan")
            ),
            "mean_bonus_per_step": float(batch.bonuses.mean()),
        }
        for a in range(2):
            adv, rets = compute_gae(
                batch.train_rewards,
                batch.values[a].astype(np.float64),
                batch.last_values[a],
                batch.terminals,
                config.gae,
            )
            flat = {
                "obs": batch.obs[a].reshape(-1, dim),
                "actions": batch.actions[a].reshape(-1),
                "old_logp": batch.log_probs[a].reshape(-1),
                "advantages": adv.reshape(-1),
                "returns": rets.reshape(-1),
            }
            params[a], stats = ppo_update(
                params[a], flat, update_cfg, optimizers[a], update_rngs[a]
            )
            row[f"a{a}_policy_loss"] = stats.policy_loss
            row[f"a{a}_value_loss"] = stats.value_loss
            row[f"a{a}_entropy"] = stats.entropy
            row[f"a{a}_kl"] = stats.approx_kl
            row[f"a{a}_clip_fraction"] = stats.clip_fraction
            row[f"a{a}_grad_norm"] = stats.grad_norm
            row[f"a{a}_epochs"] = stats.epochs_run
        history.append(row)
        if progress:
            print(
                f"  step {global_step:>7d}  ep={row['episodes']:>3d}"
                f"  return={row['mean_base_return']:>8.2f}"
                f"  deliver={row['mean_deliveries']:>5.2f}"
                f"  aux={aux_scale:.2f}",
                flush=True,
            )

    if evaluator is not None:
        evaluator.close()
    return TrainResult(
        params=(params[0], params[1]),
        history=history,
        total_steps=global_step,
        wall_seconds=time.monotonic() - t_start,
    )
