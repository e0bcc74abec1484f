"""Evaluation harness: episode runner, metrics, logs, probes, benchmarks."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from burger_kitchen.config import RunConfig
from burger_kitchen.errors import ContractError
from burger_kitchen.harness import (
    COMPLETION_THRESHOLD,
    EpisodeRecord,
    LearnedPolicy,
    bench_latency,
    completion_rate,
    deviation_probe,
    evaluate_suite,
    latency_stats,
    records_from_log,
    recompute_from_log,
    run_episode,
    suite_metrics,
)
from burger_kitchen.logs import JsonlWriter, read_jsonl
from burger_kitchen.nets import init_policy
from burger_kitchen.observe import obs_dim
from burger_kitchen.scripted import NoOpPolicy, oracle_pair


@pytest.fixture(scope="module")
def toy_policies(toy_config):
    dim = obs_dim(toy_config)
    return (
        LearnedPolicy(init_policy(0, dim, hidden=16)),
        LearnedPolicy(init_policy(1, dim, hidden=16)),
    )


# -- completion rate (reference threshold 9.4) ------------------------------


def test_completion_rate_reference_fractions():
    assert completion_rate([9.8, 9.8, 3.0]) == 2 / 3
    assert completion_rate([9.4]) == 1.0  # threshold is inclusive
    assert completion_rate([9.39999]) == 0.0
    assert completion_rate([10.0, 10.0], threshold=9.4) == 1.0
    assert COMPLETION_THRESHOLD == 9.4


def test_completion_rate_rejects_empty():
    with pytest.raises(ContractError):
        completion_rate([])


@given(
    returns=st.lists(st.floats(-50, 15, allow_nan=False), min_size=1, max_size=30),
    t1=st.floats(-50, 15, allow_nan=False),
    t2=st.floats(-50, 15, allow_nan=False),
)
def test_completion_rate_is_monotone_in_threshold(returns, t1, t2):
    lo, hi = min(t1, t2), max(t1, t2)
    assert completion_rate(returns, lo) >= completion_rate(returns, hi)


# -- episode runner ----------------------------------------------------------


def test_oracle_episode_scores_ten(default_config):
    rec = run_episode(oracle_pair(), default_config, seed=0)
    assert rec.return_base == 10.0
    assert rec.deliveries == 5 and rec.expiries == 0
    assert rec.steps <= default_config.env.horizon
    assert rec.return_shaped > rec.return_base  # pacing verdicts grant bonus


def test_episode_is_deterministic_per_seed(toy_config, toy_policies):
    cfg = toy_config.with_condition("combined")
    a = run_episode(toy_policies, cfg, seed=123, deterministic=False)
    b = run_episode(toy_policies, cfg, seed=123, deterministic=False)
    c = run_episode(toy_policies, cfg, seed=124, deterministic=False)
    assert a == b
    assert (a.return_base, a.steps) != (c.return_base, c.steps) or a.seed != c.seed


def test_noop_pair_is_idle_every_step(toy_config):
    rec = run_episode((NoOpPolicy(0), NoOpPolicy(1)), toy_config, seed=5)
    assert rec.idle_steps == (rec.steps, rec.steps)
    assert rec.idle_total == 2 * rec.steps
    assert rec.expiries == 2  # both toy orders rot
    assert rec.return_base == pytest.approx(2 * toy_config.env.reward_expiry)


def test_latency_capture_collects_one_sample_per_step(toy_config, toy_policies):
    rec = run_episode(toy_policies, toy_config, seed=7, measure_latency=True)
    assert len(rec.latency_ns) == rec.steps
    assert all(ns > 0 for ns in rec.latency_ns)


def test_verdict_sources_cover_cache_hits(toy_config, toy_policies):
    from burger_kitchen.evaluator import make_evaluator

    evaluator = make_evaluator(toy_config)
    cold = run_episode(toy_policies, toy_config, seed=7, evaluator=evaluator)
    warm = run_episode(toy_policies, toy_config, seed=7, evaluator=evaluator)
    evaluator.close()
    assert len(cold.verdict_sources) == cold.steps
    # prompts embed t, so they never repeat inside one episode; a replayed
    # episode against the same evaluator is served from cache throughout
    assert set(cold.verdict_sources) == {"Heuristic"}
    assert set(warm.verdict_sources) == {"Cache"}


def test_unshaped_episode_has_no_bonus(toy_config, toy_policies):
    cfg = toy_config.with_shaping(False)
    rec = run_episode(toy_policies, cfg, seed=7)
    assert rec.return_shaped == rec.return_base
    assert rec.verdict_sources == []


# -- logging round trip -------------------------------------------------------


def test_log_recomputation_matches_in_memory_records(tmp_path, toy_config, toy_policies):
    path = str(tmp_path / "eval.jsonl")
    with JsonlWriter(path) as w:
        recs = [
            run_episode(toy_policies, toy_config, seed=100 + i, log_writer=w,
                        episode_index=i)
            for i in range(3)
        ]
    episodes = recompute_from_log(path)  # raises on any sum mismatch
    assert len(episodes) == 3
    lam = toy_config.shaping.lambda_bonus
    for ep, rec in zip(episodes, recs):
        assert ep["seed"] == rec.seed
        assert ep["return_base"] == rec.return_base
        assert ep["return_shaped"] == rec.return_shaped
        assert ep["steps"] == rec.steps
        assert ep["idle_steps"] == rec.idle_steps
    for line in read_jsonl(path):
        if "t" in line:
            assert line["bonus"] in (0.0, lam)
            assert line["shaped_reward"] == line["base_reward"] + line["bonus"]


def test_records_from_log_round_trip(tmp_path, toy_config, toy_policies):
    path = str(tmp_path / "eval.jsonl")
    with JsonlWriter(path) as w:
        original = run_episode(toy_policies, toy_config, seed=42, log_writer=w)
    pairs = records_from_log(path)
    assert len(pairs) == 1
    method, rebuilt = pairs[0]
    assert method == "shaped"
    for field in ("condition", "seed", "return_base", "return_shaped",
                  "deliveries", "expiries", "idle_steps", "steps"):
        assert getattr(rebuilt, field) == getattr(original, field)


def test_recompute_rejects_tampered_log(tmp_path, toy_config, toy_policies):
    import json

    path = str(tmp_path / "eval.jsonl")
    with JsonlWriter(path) as w:
        run_episode(toy_policies, toy_config, seed=42, log_writer=w)
    lines = [json.loads(ln) for ln in open(path)]
    victim = next(rec for rec in lines if "t" in rec)
    victim["base_reward"] += 1000.0
    tampered = tmp_path / "tampered.jsonl"
    tampered.write_text("\n".join(json.dumps(rec) for rec in lines) + "\n")
    with pytest.raises(ContractError):
        recompute_from_log(str(tampered))


# -- metric aggregation -------------------------------------------------------


def test_latency_stats_summary():
    stats = latency_stats([1_000_000, 2_000_000, 3_000_000, 10_000_000])
    assert stats["n"] == 4
    assert stats["mean_ms"] == pytest.approx(4.0)
    assert stats["median_ms"] == pytest.approx(2.5)
    assert stats["max_ms"] == pytest.approx(10.0)
    with pytest.raises(ContractError):
        latency_stats([])


def test_suite_metrics_aggregates_exactly():
    recs = [
        EpisodeRecord("clean", 1, 9.8, 10.2, 5, 0, (3, 4), 100),
        EpisodeRecord("clean", 2, 3.0, 3.1, 4, 1, (5, 6), 100),
    ]
    row = suite_metrics(recs)
    assert row["condition"] == "clean"
    assert row["episodes"] == 2
    assert row["mean_return"] == pytest.approx(6.4)
    assert row["completion_rate"] == 0.5
    assert row["mean_idle_steps"] == pytest.approx(9.0)
    assert row["mean_deliveries"] == pytest.approx(4.5)
    with pytest.raises(ContractError):
        suite_metrics([])


def test_evaluate_suite_runs_paired_seeds(toy_config, toy_policies):
    results = evaluate_suite(toy_policies, toy_config, ("clean", "combined"), 3)
    assert set(results) == {"clean", "combined"}
    for condition, records in results.items():
        assert [r.seed for r in records] == [
            toy_config.seeds.eval_base + i for i in range(3)
        ]
        assert all(r.condition == condition for r in records)


# -- probes and benchmarks ----------------------------------------------------


def test_deviation_probe_oracle_pair(default_config):
    report = deviation_probe(oracle_pair(), default_config, n_episodes=3,
                             deterministic=True)
    assert report.cooperative_mean == pytest.approx(10.0)
    assert report.deviation_a_mean < report.cooperative_mean
    assert report.deviation_b_mean < report.cooperative_mean
    assert len(report.cooperative) == 3
    arms = [row["arm"] for row in report.as_rows()]
    assert arms == ["cooperative", "deviation_agent0", "deviation_agent1"]


def test_bench_latency_reports_both_arms(toy_config, toy_policies):
    out = bench_latency(toy_policies, toy_config, min_steps=200)
    assert out["shaped"]["n"] >= 200 and out["ppo_only"]["n"] >= 200
    assert np.isfinite(out["shaping_overhead_fraction"])
    assert "cache_hits" in out["shaped"]  # warm verdicts after episode one
