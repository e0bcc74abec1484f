"""Experiment grid bookkeeping and a tiny end-to-end cell."""

import pytest

from burger_kitchen.errors import ContractError
from burger_kitchen.experiments import ArmResult, GridResult, run_arm, run_grid
from burger_kitchen.harness import EpisodeRecord


def _arm(method, condition, seed, returns):
    records = [
        EpisodeRecord(condition, 1000 + i, r, r, 0, 0, (0, 0), 60)
        for i, r in enumerate(returns)
    ]
    return ArmResult(method, condition, seed, train=None, records=records, metrics={})


@pytest.fixture
def synthetic_grid():
    return GridResult(
        arms=[
            _arm("shaped", "clean", 0, [9.8, 9.8]),
            _arm("shaped", "clean", 1, [9.8, 3.0]),
            _arm("ppo_only", "clean", 0, [0.0, -8.0]),
            _arm("ppo_only", "clean", 1, [-8.0, -8.0]),
            _arm("shaped", "combined", 0, [-29.6, -29.6]),
            _arm("ppo_only", "combined", 0, [-39.9, -39.9]),
        ]
    )


def test_select_filters_by_every_axis(synthetic_grid):
    assert len(synthetic_grid.select()) == 6
    assert len(synthetic_grid.select(method="shaped")) == 3
    assert len(synthetic_grid.select(condition="clean")) == 4
    assert len(synthetic_grid.select(method="shaped", condition="clean", seed=1)) == 1


def test_one_requires_exactly_one_match(synthetic_grid):
    arm = synthetic_grid.one("shaped", "combined", 0)
    assert arm.mean_return == pytest.approx(-29.6)
    with pytest.raises(ContractError):
        synthetic_grid.one("shaped", "combined", 7)


def test_summary_rows_aggregate_over_seeds(synthetic_grid):
    rows = {(r["method"], r["condition"]): r for r in synthetic_grid.summary_rows()}
    clean_shaped = rows[("shaped", "clean")]
    assert clean_shaped["seeds"] == 2
    assert clean_shaped["episodes"] == 4
    assert clean_shaped["mean_return"] == pytest.approx((9.8 * 3 + 3.0) / 4)
    assert clean_shaped["completion_rate"] == 0.75  # threshold 9.4
    assert rows[("ppo_only", "clean")]["completion_rate"] == 0.0


def test_shaping_gap_reports_per_seed_winners(synthetic_grid):
    gaps = synthetic_grid.shaping_gap("clean")
    assert [g["seed"] for g in gaps] == [0, 1]
    assert all(g["shaped_wins"] for g in gaps)
    combined = synthetic_grid.shaping_gap("combined")
    assert combined == [
        {
            "seed": 0,
            "shaped_mean": pytest.approx(-29.6),
            "ppo_only_mean": pytest.approx(-39.9),
            "shaped_wins": True,
        }
    ]


def test_run_arm_rejects_unknown_method(tiny_ppo_config):
    with pytest.raises(ContractError):
        run_arm(tiny_ppo_config, "osmosis", "clean", 0, n_eval_episodes=1)


def test_run_arm_trains_and_evaluates_on_its_condition(tiny_ppo_config):
    arm = run_arm(tiny_ppo_config, "ppo_only", "combined", 0, n_eval_episodes=2)
    assert arm.train.total_steps == tiny_ppo_config.ppo.total_steps
    assert len(arm.records) == 2
    assert all(r.condition == "combined" for r in arm.records)
    assert all(r.return_shaped == r.return_base for r in arm.records)  # no bonus
    assert arm.metrics["method"] == "ppo_only"


def test_run_grid_covers_the_cross_product(tiny_ppo_config):
    grid = run_grid(
        tiny_ppo_config, seeds=(0,), conditions=("clean",), n_eval_episodes=2
    )
    assert {(a.method, a.condition, a.seed) for a in grid.arms} == {
        ("shaped", "clean", 0),
        ("ppo_only", "clean", 0),
    }
    assert grid.wall_seconds > 0
    assert len(grid.shaping_gap("clean")) == 1


def test_grid_evaluation_is_reproducible(tiny_ppo_config):
    a = run_grid(tiny_ppo_config, seeds=(0,), conditions=("clean",), n_eval_episodes=2)
    b = run_grid(tiny_ppo_config, seeds=(0,), conditions=("clean",), n_eval_episodes=2)
    for arm_a, arm_b in zip(a.arms, b.arms):
        assert arm_a.records == arm_b.records
