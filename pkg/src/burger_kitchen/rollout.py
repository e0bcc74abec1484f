"""Vectorized rollout collection through the full shaping loop.

A bank of independent environments steps in lockstep: encode ground-truth
observations, corrupt them per the noise condition, let both policies act,
advance each environment, render the ground-truth prompt, judge it, and
shape the team reward.  When shaping is enabled the training reward also
adds the weighted curriculum potential difference (dense guidance travels
with the shaped arm; the baseline trains on the plain team reward).  The
logged base and shaped rewards never include the curriculum term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import env as kitchen
from .advantage import shape_reward
from .config import RunConfig
from .curriculum import exploring_reset, team_potential
from .evaluator import EvaluatorVerdict, shaping_signal
from .nets import value_forward
from .noise import corrupt_observation_batch
from .observe import encode
from .ppo import act_batch
from .prompts import prompt_from_state


def episode_seed(run_seed: int, env_idx: int, episode_idx: int) -> int:
    """Stable per-episode reset seed derived from the run seed."""
    ss = np.random.SeedSequence((run_seed, env_idx, episode_idx))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class EpisodeStats:
    base_return: float
    shaped_return: float
    deliveries: int
    expiries: int
    steps: int


@dataclass
class VecEnvs:
    """Fixed-size bank of environments with per-env episode reseeding."""

    config: RunConfig
    run_seed: int
    n_envs: int
    states: list = field(default_factory=list)
    episode_idx: list = field(default_factory=list)
    base_acc: list = field(default_factory=list)
    shaped_acc: list = field(default_factory=list)
    deliver_acc: list = field(default_factory=list)
    expire_acc: list = field(default_factory=list)
    last_verdict: list = field(default_factory=list)
    potential: list = field(default_factory=list)

    def __post_init__(self):
        for i in range(self.n_envs):
            self.states.append(exploring_reset(self.config, episode_seed(self.run_seed, i, 0)))
            self.episode_idx.append(0)
            self.base_acc.append(0.0)
            self.shaped_acc.append(0.0)
            self.deliver_acc.append(0)
            self.expire_acc.append(0)
            self.last_verdict.append(None)
            self.potential.append(team_potential(self.states[i]))

    def reset_env(self, i: int) -> None:
        self.episode_idx[i] += 1
        self.states[i] = exploring_reset(
            self.config, episode_seed(self.run_seed, i, self.episode_idx[i])
        )
        self.base_acc[i] = 0.0
        self.shaped_acc[i] = 0.0
        self.deliver_acc[i] = 0
        self.expire_acc[i] = 0
        self.last_verdict[i] = None
        self.potential[i] = team_potential(self.states[i])


@dataclass
class RolloutBatch:
    obs: tuple[np.ndarray, np.ndarray]  # per agent, (T, B, D)
    actions: tuple[np.ndarray, np.ndarray]  # (T, B)
    log_probs: tuple[np.ndarray, np.ndarray]
    values: tuple[np.ndarray, np.ndarray]
    train_rewards: np.ndarray  # (T, B) shared team signal incl. aux
    base_rewards: np.ndarray
    bonuses: np.ndarray
    terminals: np.ndarray  # (T, B)
    last_values: tuple[np.ndarray, np.ndarray]  # (B,)
    completed: list[EpisodeStats]
    n_steps: int


def collect_rollout(
    vec: VecEnvs,
    policies,
    evaluator,
    config: RunConfig,
    act_rngs,
    noise_rngs,
    n_steps: int,
    aux_scale: float,
) -> RolloutBatch:
    """Gather n_steps lockstep transitions from every environment."""
    n_envs = vec.n_envs
    obs_dim = encode(vec.states[0], 0, config).shape[0]
    shaping_on = config.shaping.enabled
    lam = config.shaping.lambda_bonus
    stride = config.shaping.query_stride
    extended = config.shaping.extended_prompt
    # dense guidance ships with the shaped arm; the baseline trains on the
    # plain team reward
    aux_gain = config.ppo.aux_coef * aux_scale if config.shaping.enabled else 0.0

    obs_buf = [np.zeros((n_steps, n_envs, obs_dim), dtype=np.float32) for _ in range(2)]
    act_buf = [np.zeros((n_steps, n_envs), dtype=np.int64) for _ in range(2)]
    logp_buf = [np.zeros((n_steps, n_envs), dtype=np.float32) for _ in range(2)]
    val_buf = [np.zeros((n_steps, n_envs), dtype=np.float32) for _ in range(2)]
    train_rew = np.zeros((n_steps, n_envs), dtype=np.float64)
    base_rew = np.zeros((n_steps, n_envs), dtype=np.float64)
    bonus_buf = np.zeros((n_steps, n_envs), dtype=np.float64)
    term_buf = np.zeros((n_steps, n_envs), dtype=bool)
    completed: list[EpisodeStats] = []

    raw_obs = np.zeros((n_envs, obs_dim), dtype=np.float32)
    for t in range(n_steps):
        for a in range(2):
            for b in range(n_envs):
                raw_obs[b] = encode(vec.states[b], a, config)
            obs_a = corrupt_observation_batch(raw_obs, config.noise, noise_rngs[a])
            obs_buf[a][t] = obs_a
            actions, logps, values = act_batch(
                policies[a], obs_a, act_rngs[a], deterministic=False
            )
            act_buf[a][t] = actions
            logp_buf[a][t] = logps
            val_buf[a][t] = values

        for b in range(n_envs):
            state = vec.states[b]
            outcome = kitchen.step(state, (int(act_buf[0][t, b]), int(act_buf[1][t, b])))
            ns = outcome.next_state

            bonus = 0.0
            if shaping_on:
                if state.t % stride == 0 or vec.last_verdict[b] is None:
                    verdict: EvaluatorVerdict = evaluator.judge(
                        prompt_from_state(ns, extended)
                    )
                    vec.last_verdict[b] = verdict
                else:
                    verdict = vec.last_verdict[b]
                bonus = shaping_signal(verdict, lam)

            shaped = shape_reward(outcome.base_reward, bonus)
            aux = 0.0
            if aux_gain > 0:
                phi_after = team_potential(ns)
                aux = aux_gain * (phi_after - vec.potential[b])
                vec.potential[b] = phi_after

            base_rew[t, b] = outcome.base_reward
            bonus_buf[t, b] = bonus
            train_rew[t, b] = shaped + aux
            term_buf[t, b] = ns.terminal

            vec.base_acc[b] += outcome.base_reward
            vec.shaped_acc[b] += shaped
            for ev in outcome.events:
                if ev.kind == "Delivered":
                    vec.deliver_acc[b] += 1
                elif ev.kind == "Expired":
                    vec.expire_acc[b] += 1

            if ns.terminal:
                completed.append(
                    EpisodeStats(
                        base_return=vec.base_acc[b],
                        shaped_return=vec.shaped_acc[b],
                        deliveries=vec.deliver_acc[b],
                        expiries=vec.expire_acc[b],
                        steps=ns.t,
                    )
                )
                vec.reset_env(b)
            else:
                vec.states[b] = ns

    last_values = []
    for a in range(2):
        for b in range(n_envs):
            raw_obs[b] = encode(vec.states[b], a, config)
        obs_a = corrupt_observation_batch(raw_obs, config.noise, noise_rngs[a])
        values, _ = value_forward(policies[a], obs_a)
        last_values.append(values.astype(np.float64))

    return RolloutBatch(
        obs=(obs_buf[0], obs_buf[1]),
        actions=(act_buf[0], act_buf[1]),
        log_probs=(logp_buf[0], logp_buf[1]),
        values=(val_buf[0], val_buf[1]),
        train_rewards=train_rew,
        base_rewards=base_rew,
        bonuses=bonus_buf,
        terminals=term_buf,
        last_values=(last_values[0], last_values[1]),
        completed=completed,
        n_steps=n_steps * n_envs,
    )
