"""Experiment grid: per-condition training of both methods plus evaluation.

One grid cell = (method, condition, seed): train a fresh policy pair for
the configured step budget under that condition, then evaluate it on the
same condition with fixed per-episode seeds.  Both methods share every
hyperparameter; they differ only in config.shaping.enabled, which switches
the verdict bonus plus the curriculum guidance on or off.  Evaluation
samples from the learned policies (the object PPO actually optimizes)
using per-episode seeded generators, so repeated runs reproduce bit for
bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .errors import ContractError
from .harness import EpisodeRecord, LearnedPolicy, evaluate_suite, suite_metrics
from .logs import JsonlWriter
from .trainer import TrainResult, train_pair

METHODS = ("shaped", "ppo_only")


@dataclass
class ArmResult:
    """One trained (method, condition, seed) cell plus its evaluation."""

    method: str
    condition: str
    seed: int
    train: TrainResult
    records: list[EpisodeRecord]
    metrics: dict

    @property
    def mean_return(self) -> float:
        return float(np.mean([r.return_base for r in self.records]))


@dataclass
class GridResult:
    arms: list[ArmResult] = field(default_factory=list)
    wall_seconds: float = 0.0

    def select(
        self,
        method: str | None = None,
        condition: str | None = None,
        seed: int | None = None,
    ) -> list[ArmResult]:
        out = []
        for arm in self.arms:
            if method is not None and arm.method != method:
                continue
            if condition is not None and arm.condition != condition:
                continue
            if seed is not None and arm.seed != seed:
                continue
            out.append(arm)
        return out

    def one(self, method: str, condition: str, seed: int) -> ArmResult:
        hits = self.select(method, condition, seed)
        if len(hits) != 1:
            raise ContractError(
                f"grid cell ({method}, {condition}, {seed}): {len(hits)} matches"
            )
        return hits[0]

    def summary_rows(self) -> list[dict]:
        """Per (method, condition) aggregate over seeds, report-table shape."""
        rows = []
        for method in METHODS:
            conditions = sorted({a.condition for a in self.select(method)})
            for condition in conditions:
                arms = self.select(method, condition)
                if not arms:
                    continue
                returns = [r.return_base for a in arms for r in a.records]
                rows.append(
                    {
                        "method": method,
                        "condition": condition,
                        "seeds": len(arms),
                        "episodes": len(returns),
                        "mean_return": float(np.mean(returns)),
                        "std_return": float(np.std(returns)),
                        "completion_rate": float(
                            np.mean([m >= 9.4 for m in returns])
                        ),
                        "mean_deliveries": float(
                            np.mean([r.deliveries for a in arms for r in a.records])
                        ),
                        "mean_expiries": float(
                            np.mean([r.expiries for a in arms for r in a.records])
                        ),
                    }
                )
        return rows

    def shaping_gap(self, condition: str) -> list[dict]:
        """Per-seed shaped vs ppo_only mean return on one condition."""
        seeds = sorted({a.seed for a in self.select(condition=condition)})
        out = []
        for seed in seeds:
            shaped = self.one("shaped", condition, seed).mean_return
            plain = self.one("ppo_only", condition, seed).mean_return
            out.append(
                {
                    "seed": seed,
                    "shaped_mean": shaped,
                    "ppo_only_mean": plain,
                    "shaped_wins": bool(shaped > plain),
                }
            )
        return out


def run_arm(
    config: RunConfig,
    method: str,
    condition: str,
    seed: int,
    *,
    n_eval_episodes: int | None = None,
    deterministic_eval: bool = False,
    log_writer: JsonlWriter | None = None,
    progress: bool = False,
) -> ArmResult:
    """Train one cell and evaluate it on its own condition."""
    if method not in METHODS:
        raise ContractError(f"unknown method {method!r}; expected one of {METHODS}")
    cfg = config.with_condition(condition).with_shaping(method == "shaped")
    result = train_pair(cfg, run_seed=seed, progress=progress)
    policies = (LearnedPolicy(result.params[0]), LearnedPolicy(result.params[1]))
    episodes = n_eval_episodes or cfg.seeds.eval_episodes
    suites = evaluate_suite(
        policies,
        cfg,
        [condition],
        episodes,
        deterministic=deterministic_eval,
        log_writer=log_writer,
    )
    records = suites[condition]
    metrics = {"method": method, "seed": seed, **suite_metrics(records)}
    return ArmResult(
        method=method,
        condition=condition,
        seed=seed,
        train=result,
        records=records,
        metrics=metrics,
    )


def run_grid(
    config: RunConfig,
    *,
    seeds=None,
    conditions=("clean", "combined"),
    methods=METHODS,
    n_eval_episodes: int | None = None,
    deterministic_eval: bool = False,
    progress: bool = False,
) -> GridResult:
    """The full comparison: methods x conditions x seeds."""
    seeds = tuple(seeds) if seeds is not None else tuple(config.seeds.train)
    t0 = time.monotonic()
    grid = GridResult()
    for seed in seeds:
        for condition in conditions:
            for method in methods:
                arm = run_arm(
                    config,
                    method,
                    condition,
                    seed,
                    n_eval_episodes=n_eval_episodes,
                    deterministic_eval=deterministic_eval,
                    progress=progress,
                )
                if progress:
                    print(
                        f"[grid] {method}/{condition}/seed{seed}: "
                        f"mean_return {arm.mean_return:.2f}"
                    )
                grid.arms.append(arm)
    grid.wall_seconds = time.monotonic() - t0
    return grid
