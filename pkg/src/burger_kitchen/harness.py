"""Evaluation harness: episode runner, metric suite, probes, benchmarks.

run_episode drives one full episode through the shaping loop with ground
truth prompts and per-step latency capture; suites sweep conditions with
fixed per-episode seeds so paired comparisons across methods see identical
noise draws.  All reported metrics are recomputable from the JSONL logs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import env as kitchen
from .advantage import shape_reward
from .config import RunConfig
from .errors import ContractError
from .evaluator import make_evaluator, shaping_signal
from .logs import JsonlWriter, make_step_record
from .nets import PolicyParams
from .noise import corrupt_observation
from .observe import encode
from .ppo import act
from .prompts import prompt_from_state

COMPLETION_THRESHOLD = 9.4


class LearnedPolicy:
    """Adapter giving trained parameters the scripted-policy interface."""

    def __init__(self, params: PolicyParams):
        self.params = params

    def reset(self) -> None:
        pass

    def act(self, state, obs, rng, deterministic: bool = True) -> int:
        action, _, _ = act(self.params, obs, rng, deterministic)
        return action


@dataclass
class EpisodeRecord:
    condition: str
    seed: int
    return_base: float
    return_shaped: float
    deliveries: int
    expiries: int
    idle_steps: tuple[int, int]
    steps: int
    latency_ns: list[int] = field(default_factory=list)
    verdict_sources: list[str] = field(default_factory=list)

    @property
    def idle_total(self) -> int:
        return self.idle_steps[0] + self.idle_steps[1]


def run_episode(
    policies,
    config: RunConfig,
    seed: int,
    *,
    deterministic: bool = True,
    measure_latency: bool = False,
    evaluator=None,
    log_writer: JsonlWriter | None = None,
    episode_index: int = 0,
) -> EpisodeRecord:
    """One episode under config's active condition; deterministic per seed."""
    condition = config.noise.condition
    shaping_on = config.shaping.enabled
    lam = config.shaping.lambda_bonus
    stride = config.shaping.query_stride
    extended = config.shaping.extended_prompt

    own_evaluator = False
    if shaping_on and evaluator is None:
        evaluator = make_evaluator(config)
        own_evaluator = True

    for p in policies:
        p.reset()
    state = kitchen.reset(config, seed)
    vis_rngs = [
        np.random.default_rng(np.random.SeedSequence((seed, 11, a))) for a in range(2)
    ]
    act_rngs = [
        np.random.default_rng(np.random.SeedSequence((seed, 13, a))) for a in range(2)
    ]

    if log_writer is not None:
        log_writer.write(
            {
                "episode_start": {
                    "condition": condition,
                    "seed": seed,
                    "index": episode_index,
                    "shaping": shaping_on,
                    "lambda_bonus": lam,
                }
            }
        )

    return_base = 0.0
    return_shaped = 0.0
    deliveries = 0
    expiries = 0
    idle = [0, 0]
    latencies: list[int] = []
    sources: list[str] = []
    last_verdict = None

    while not state.terminal:
        t0 = time.perf_counter_ns() if measure_latency else 0
        actions = []
        for a in range(2):
            obs = encode(state, a, config)
            obs = corrupt_observation(obs, config.noise, vis_rngs[a])
            actions.append(
                policies[a].act(state, obs, act_rngs[a], deterministic=deterministic)
            )
        decision_ns = time.perf_counter_ns() - t0 if measure_latency else 0

        prev_pos = state.agent_pos.copy()
        prev_held = state.agent_held.copy()
        outcome = kitchen.step(state, (actions[0], actions[1]))
        ns = outcome.next_state

        bonus = 0.0
        logit_good = 0.0
        logit_bad = 0.0
        source = "None"
        prompt = ""
        if shaping_on:
            t1 = time.perf_counter_ns() if measure_latency else 0
            prompt = prompt_from_state(ns, extended)
            if state.t % stride == 0 or last_verdict is None:
                verdict = evaluator.judge(prompt)
                last_verdict = verdict
            else:
                verdict = last_verdict
            bonus = shaping_signal(verdict, lam)
            if measure_latency:
                decision_ns += time.perf_counter_ns() - t1
            logit_good, logit_bad, source = (
                verdict.logit_good,
                verdict.logit_bad,
                verdict.source,
            )
            sources.append(source)
        elif log_writer is not None:
            prompt = prompt_from_state(ns, extended)

        shaped = shape_reward(outcome.base_reward, bonus)
        return_base += outcome.base_reward
        return_shaped += shaped

        blocked = [False, False]
        for ev in outcome.events:
            if ev.kind == "Delivered":
                deliveries += 1
            elif ev.kind == "Expired":
                expiries += 1
            elif ev.kind == "Blocked" and ev.agent >= 0:
                blocked[ev.agent] = True
        for a in range(2):
            unchanged = bool(
                np.array_equal(prev_pos[a], ns.agent_pos[a])
                and prev_held[a] == ns.agent_held[a]
            )
            if unchanged and (actions[a] == int(kitchen.Action.STAY) or blocked[a]):
                idle[a] += 1

        if measure_latency:
            latencies.append(decision_ns)
        if log_writer is not None:
            log_writer.write(
                make_step_record(
                    condition=condition,
                    t=ns.t,
                    actions=(actions[0], actions[1]),
                    base_reward=outcome.base_reward,
                    bonus=bonus,
                    shaped_reward=shaped,
                    prompt=prompt,
                    logit_good=logit_good,
                    logit_bad=logit_bad,
                    verdict_source=source,
                    latency_ns=decision_ns,
                    events=[ev.encode() for ev in outcome.events],
                )
            )
        state = ns

    record = EpisodeRecord(
        condition=condition,
        seed=seed,
        return_base=return_base,
        return_shaped=return_shaped,
        deliveries=deliveries,
        expiries=expiries,
        idle_steps=(idle[0], idle[1]),
        steps=state.t,
        latency_ns=latencies,
        verdict_sources=sources,
    )
    if log_writer is not None:
        log_writer.write(
            {
                "episode_end": {
                    "condition": condition,
                    "seed": seed,
                    "return_base": return_base,
                    "return_shaped": return_shaped,
                    "deliveries": deliveries,
                    "expiries": expiries,
                    "idle_steps": list(record.idle_steps),
                    "steps": record.steps,
                }
            }
        )
        log_writer.flush()
    if own_evaluator:
        evaluator.close()
    return record


# --------------------------------------------------------------------------
# metrics


def completion_rate(returns, threshold: float = COMPLETION_THRESHOLD) -> float:
    """Fraction of episodes whose return meets or exceeds the threshold."""
    returns = list(returns)
    if not returns:
        raise ContractError("completion_rate: empty return list")
    return sum(1 for r in returns if r >= threshold) / len(returns)


def idle_steps(record: EpisodeRecord) -> int:
    return record.idle_total


def latency_stats(samples_ns) -> dict:
    """Summary statistics (milliseconds) over monotonic-clock samples."""
    samples = np.asarray(list(samples_ns), dtype=np.float64)
    if samples.size == 0:
        raise ContractError("latency_stats: no samples")
    ms = samples / 1e6
    return {
        "n": int(ms.size),
        "mean_ms": float(ms.mean()),
        "median_ms": float(np.median(ms)),
        "q1_ms": float(np.percentile(ms, 25)),
        "q3_ms": float(np.percentile(ms, 75)),
        "p95_ms": float(np.percentile(ms, 95)),
        "max_ms": float(ms.max()),
    }


def suite_metrics(records: list[EpisodeRecord]) -> dict:
    if not records:
        raise ContractError("suite_metrics: no episode records")
    returns = [r.return_base for r in records]
    row = {
        "condition": records[0].condition,
        "episodes": len(records),
        "mean_return": float(np.mean(returns)),
        "std_return": float(np.std(returns)),
        "completion_rate": completion_rate(returns),
        "mean_idle_steps": float(np.mean([r.idle_total for r in records])),
        "mean_deliveries": float(np.mean([r.deliveries for r in records])),
        "mean_expiries": float(np.mean([r.expiries for r in records])),
        "mean_bonus_per_step": float(
            np.mean([(r.return_shaped - r.return_base) / r.steps for r in records])
        ),
    }
    all_lat = [ns for r in records for ns in r.latency_ns]
    if all_lat:
        row.update({f"latency_{k}": v for k, v in latency_stats(all_lat).items()})
    return row


def evaluate_suite(
    policies,
    config: RunConfig,
    conditions,
    n_episodes: int,
    *,
    deterministic: bool = True,
    measure_latency: bool = False,
    log_writer: JsonlWriter | None = None,
) -> dict[str, list[EpisodeRecord]]:
    """n_episodes per condition, seeds eval_base + i, shared evaluator cache."""
    results: dict[str, list[EpisodeRecord]] = {}
    for condition in conditions:
        cfg = config.with_condition(condition)
        evaluator = make_evaluator(cfg) if cfg.shaping.enabled else None
        records = []
        for i in range(n_episodes):
            records.append(
                run_episode(
                    policies,
                    cfg,
                    seed=cfg.seeds.eval_base + i,
                    deterministic=deterministic,
                    measure_latency=measure_latency,
                    evaluator=evaluator,
                    log_writer=log_writer,
                    episode_index=i,
                )
            )
        if evaluator is not None:
            evaluator.close()
        results[condition] = records
    return results


def recompute_from_log(path) -> list[dict]:
    """Rebuild per-episode aggregates from a JSONL log file.

    Cross-checks the in-memory records: sums of logged base rewards and
    shaped rewards must reproduce the episode_end summaries exactly.
    """
    from .logs import read_jsonl

    episodes: list[dict] = []
    current: dict | None = None
    for rec in read_jsonl(path):
        if "episode_start" in rec:
            current = {
                "condition": rec["episode_start"]["condition"],
                "seed": rec["episode_start"]["seed"],
                "shaping": rec["episode_start"]["shaping"],
                "return_base": 0.0,
                "return_shaped": 0.0,
                "bonus_total": 0.0,
                "steps": 0,
            }
        elif "episode_end" in rec:
            if current is None:
                raise ContractError(f"{path}: episode_end without episode_start")
            end = rec["episode_end"]
            if end["return_base"] != current["return_base"]:
                raise ContractError(
                    f"{path}: logged base return {end['return_base']} != "
                    f"recomputed {current['return_base']}"
                )
            if end["return_shaped"] != current["return_shaped"]:
                raise ContractError(
                    f"{path}: logged shaped return {end['return_shaped']} != "
                    f"recomputed {current['return_shaped']}"
                )
            if end["steps"] != current["steps"]:
                raise ContractError(
                    f"{path}: logged step count {end['steps']} != "
                    f"recomputed {current['steps']}"
                )
            current["deliveries"] = end["deliveries"]
            current["expiries"] = end["expiries"]
            current["idle_steps"] = tuple(end["idle_steps"])
            episodes.append(current)
            current = None
        elif "t" in rec and current is not None:
            current["return_base"] += rec["base_reward"]
            current["return_shaped"] += rec["shaped_reward"]
            current["bonus_total"] += rec["bonus"]
            current["steps"] += 1
    return episodes


def records_from_log(path) -> list[tuple[str, EpisodeRecord]]:
    """(method, EpisodeRecord) pairs rebuilt purely from a JSONL log."""
    out = []
    for ep in recompute_from_log(path):
        method = "shaped" if ep["shaping"] else "ppo_only"
        out.append(
            (
                method,
                EpisodeRecord(
                    condition=ep["condition"],
                    seed=ep["seed"],
                    return_base=ep["return_base"],
                    return_shaped=ep["return_shaped"],
                    deliveries=ep["deliveries"],
                    expiries=ep["expiries"],
                    idle_steps=ep["idle_steps"],
                    steps=ep["steps"],
                ),
            )
        )
    return out


# --------------------------------------------------------------------------
# probes and benchmarks


@dataclass
class ProbeReport:
    cooperative_mean: float
    deviation_a_mean: float
    deviation_b_mean: float
    cooperative: list[float]
    deviation_a: list[float]
    deviation_b: list[float]

    def as_rows(self) -> list[dict]:
        return [
            {"arm": "cooperative", "mean_return": self.cooperative_mean},
            {"arm": "deviation_agent0", "mean_return": self.deviation_a_mean},
            {"arm": "deviation_agent1", "mean_return": self.deviation_b_mean},
        ]


def deviation_probe(
    policies, config: RunConfig, n_episodes: int, *, deterministic: bool = False
) -> ProbeReport:
    """Cooperative returns vs each agent unilaterally replaced by a defector.

    All three arms replay the same episode seeds so comparisons are paired.
    """
    from .scripted import deviation_policy

    cfg = config.with_condition("clean")
    evaluator = make_evaluator(cfg) if cfg.shaping.enabled else None

    def arm(p0, p1) -> list[float]:
        out = []
        for i in range(n_episodes):
            rec = run_episode(
                (p0, p1),
                cfg,
                seed=cfg.seeds.eval_base + i,
                deterministic=deterministic,
                evaluator=evaluator,
            )
            out.append(rec.return_base)
        return out

    coop = arm(policies[0], policies[1])
    dev_a = arm(deviation_policy(0), policies[1])
    dev_b = arm(policies[0], deviation_policy(1))
    if evaluator is not None:
        evaluator.close()
    return ProbeReport(
        cooperative_mean=float(np.mean(coop)),
        deviation_a_mean=float(np.mean(dev_a)),
        deviation_b_mean=float(np.mean(dev_b)),
        cooperative=coop,
        deviation_a=dev_a,
        deviation_b=dev_b,
    )


def bench_latency(
    policies, config: RunConfig, min_steps: int = 10_000
) -> dict:
    """Per-decision latency with and without the shaping loop.

    Runs whole episodes until both arms have at least min_steps samples;
    reports each arm's stats plus the relative shaping overhead.
    """
    arms = {}
    for name, shaped in (("shaped", True), ("ppo_only", False)):
        cfg = config.with_shaping(shaped)
        evaluator = make_evaluator(cfg) if shaped else None
        samples: list[int] = []
        sources: list[str] = []
        seed = cfg.seeds.eval_base
        while len(samples) < min_steps:
            rec = run_episode(
                policies,
                cfg,
                seed=seed,
                deterministic=True,
                measure_latency=True,
                evaluator=evaluator,
            )
            samples.extend(rec.latency_ns)
            sources.extend(rec.verdict_sources)
            seed += 1
        if evaluator is not None:
            evaluator.close()
        arm = latency_stats(samples)
        if shaped and sources:
            cold = [s for s, src in zip(samples, sources) if src != "Cache"]
            warm = [s for s, src in zip(samples, sources) if src == "Cache"]
            if cold:
                arm["cold_calls"] = latency_stats(cold)
            if warm:
                arm["cache_hits"] = latency_stats(warm)
        arms[name] = arm
    overhead = (
        arms["shaped"]["mean_ms"] - arms["ppo_only"]["mean_ms"]
    ) / arms["ppo_only"]["mean_ms"]
    arms["shaping_overhead_fraction"] = float(overhead)
    return arms
