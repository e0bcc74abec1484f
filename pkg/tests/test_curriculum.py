"""Progress potential: telescoping, order cap, subgoal breadcrumbs, starts."""

import dataclasses

import numpy as np
import pytest

import burger_kitchen.env as kitchen
from burger_kitchen.config import RunConfig
from burger_kitchen.curriculum import (
    DIST_WEIGHT,
    STAGE_DELIVERED,
    STAGE_RAW,
    exploring_reset,
    field_for,
    team_potential,
)
from burger_kitchen.env import (
    BUN,
    BURGER,
    COOKED_PATTY,
    DELIVERED,
    EXPIRED,
    PENDING,
    RAW_PATTY,
    SCHEDULED,
    Action,
)
from burger_kitchen.layouts import FLOOR
from burger_kitchen.scripted import oracle_pair


def _rollout_states(config, seed, policies, max_steps=400):
    state = kitchen.reset(config, seed)
    states = [state]
    rng = np.random.default_rng(seed)
    while not state.terminal and state.t < max_steps:
        actions = [p.act(state, None, rng, True) for p in policies]
        state = kitchen.step(state, tuple(actions)).next_state
        states.append(state)
    return states


class _RandomPolicy:
    def reset(self):
        pass

    def act(self, state, obs, rng, deterministic):
        return Action(int(rng.integers(0, 6)))


def test_potential_is_a_pure_state_function():
    cfg = RunConfig()
    s = kitchen.reset(cfg, 0)
    assert team_potential(s) == team_potential(s.copy())


def test_stepwise_differences_telescope_over_any_trajectory():
    cfg = RunConfig()
    states = _rollout_states(cfg, 3, [_RandomPolicy(), _RandomPolicy()], max_steps=200)
    total = sum(team_potential(b) - team_potential(a) for a, b in zip(states, states[1:]))
    assert total == pytest.approx(team_potential(states[-1]) - team_potential(states[0]),
                                  abs=1e-9)


def test_identical_states_after_a_cycle_net_zero():
    # place a patty on a plain counter and take it back: same kitchen, so
    # any farmable loop would have to show up as a nonzero potential sum
    cfg = RunConfig()
    s0 = kitchen.reset(cfg, 0)
    f = field_for(s0.layout)
    s0.agent_held[0] = RAW_PATTY
    counter = f.plain_counters[0]
    s0.agent_pos[0] = (counter[0] + 1, counter[1])
    s0.agent_facing[0] = kitchen.NORTH
    assert s0.layout.kind[counter[0] + 1, counter[1]] == FLOOR
    s1 = kitchen.step(s0, (Action.INTERACT, Action.STAY)).next_state  # place
    s2 = kitchen.step(s1, (Action.INTERACT, Action.STAY)).next_state  # take back
    diff_sum = (team_potential(s1) - team_potential(s0)) + (
        team_potential(s2) - team_potential(s1)
    )
    assert diff_sum == pytest.approx(0.0, abs=1e-12)
    assert int(s2.agent_held[0]) == RAW_PATTY


def test_full_delivery_ladder_value():
    cfg = RunConfig()
    base = kitchen.reset(cfg, 0)
    done = base.copy()
    done.delivered_count = 5
    done.order_status[:] = DELIVERED
    gap = team_potential(done) - team_potential(base)
    assert gap == pytest.approx(STAGE_DELIVERED * 5, abs=1e-12)


def test_surplus_patties_beyond_open_orders_are_worthless():
    cfg = RunConfig()
    base = kitchen.reset(cfg, 0)
    f = field_for(base.layout)
    base.delivered_count = 4
    base.order_status[:4] = DELIVERED
    # one slot left, taken by the staged patty; empty-handed agents then
    # head for the bun counter in both states, so breadcrumbs cancel
    base.cell_items[f.assembly] = COOKED_PATTY
    surplus = base.copy()
    surplus.cell_items[f.plain_counters[0]] = RAW_PATTY
    assert team_potential(surplus) == team_potential(base)
    # with all five orders open the same raw patty is worth its rung
    open_base = base.copy()
    open_base.delivered_count = 0
    open_base.order_status[:] = PENDING
    open_surplus = surplus.copy()
    open_surplus.delivered_count = 0
    open_surplus.order_status[:] = PENDING
    gap = team_potential(open_surplus) - team_potential(open_base)
    assert gap == pytest.approx(STAGE_RAW, abs=1e-12)


def test_pipeline_milestones_raise_the_potential_on_the_oracle_run():
    cfg = RunConfig()
    state = kitchen.reset(cfg, 0)
    policies = oracle_pair()
    rng = np.random.default_rng(0)
    milestones = 0
    while not state.terminal:
        actions = tuple(p.act(state, None, rng, True) for p in policies)
        out = kitchen.step(state, actions)
        nxt = out.next_state
        kinds = {e.kind for e in out.events}
        if kinds & {"Cooked", "Assembled", "Delivered"}:
            assert team_potential(nxt) > team_potential(state)
            milestones += 1
        state = nxt
    # 5 burgers x cook + assemble + deliver, minus any same-step overlaps
    assert milestones >= 12


def test_unreachable_cell_distance_is_grid_area():
    cfg = RunConfig()
    s = kitchen.reset(cfg, 0)
    f = field_for(s.layout)
    area = s.layout.height * s.layout.width
    assert f.dist(f.stove, (0, 0)) == area  # wall cell: no path at all
    assert f.dist(f.stove, (1, 2)) == 0.0


def test_field_cache_returns_one_instance_per_layout():
    cfg = RunConfig()
    s = kitchen.reset(cfg, 0)
    assert field_for(s.layout) is field_for(s.layout)


# -- exploring starts -----------------------------------------------------


def test_exploring_reset_disabled_paths_match_plain_reset(default_config):
    plain = kitchen.reset(default_config, 5)
    off = dataclasses.replace(
        default_config, ppo=dataclasses.replace(default_config.ppo, exploring_starts=0.0)
    )
    assert exploring_reset(off, 5).signature() == plain.signature()
    unshaped = dataclasses.replace(
        default_config.with_shaping(False),
        ppo=dataclasses.replace(default_config.ppo, exploring_starts=1.0),
    )
    assert exploring_reset(unshaped, 5).signature() == plain.signature()


def _always_on(config):
    return dataclasses.replace(config, ppo=dataclasses.replace(config.ppo, exploring_starts=1.0))


def test_exploring_reset_is_deterministic_per_seed(default_config):
    cfg = _always_on(default_config)
    assert exploring_reset(cfg, 9).signature() == exploring_reset(cfg, 9).signature()
    assert exploring_reset(cfg, 9).signature() != exploring_reset(cfg, 10).signature()


def test_exploring_reset_states_are_internally_consistent(default_config):
    cfg = _always_on(default_config)
    layout = kitchen.reset(cfg, 0).layout
    f = field_for(layout)
    for seed in range(120):
        s = exploring_reset(cfg, seed)
        assert 0 <= s.t < s.horizon
        p0 = (int(s.agent_pos[0, 0]), int(s.agent_pos[0, 1]))
        p1 = (int(s.agent_pos[1, 0]), int(s.agent_pos[1, 1]))
        assert p0 != p1
        assert layout.kind[p0] == FLOOR and layout.kind[p1] == FLOOR
        for i in range(len(s.order_status)):
            arr, dl, st = int(s.order_arrival[i]), int(s.order_deadline[i]), int(s.order_status[i])
            if dl <= s.t:
                assert st == EXPIRED
            elif arr <= s.t:
                assert st == PENDING
            else:
                assert st == SCHEDULED
        timers = s.cook_timer[s.cook_timer >= 0]
        assert timers.size <= 1  # at most the planted patty is cooking
        if int(s.cell_items[f.stove]) == RAW_PATTY:
            assert 1 <= int(s.cook_timer[f.stove]) <= s.cook_time


def test_exploring_reset_covers_every_stage(default_config):
    cfg = _always_on(default_config)
    f = field_for(kitchen.reset(cfg, 0).layout)
    seen = set()
    for seed in range(200):
        s = exploring_reset(cfg, seed)
        held = (int(s.agent_held[0]), int(s.agent_held[1]))
        if BURGER in held:
            seen.add("burger")
        elif BUN in held:
            seen.add("bun")
        elif int(s.cell_items[f.assembly]) == COOKED_PATTY:
            seen.add("staged")
        elif int(s.cell_items[f.stove]) == COOKED_PATTY:
            seen.add("cooked")
        elif int(s.cell_items[f.stove]) == RAW_PATTY:
            assert int(s.cook_timer[f.stove]) >= 1
            seen.add("cooking")
        elif s.t > 0:
            seen.add("scatter")
    assert seen == {"burger", "bun", "staged", "cooked", "cooking", "scatter"}


def test_exploring_reset_orders_remain_completable(default_config):
    # late-stage starts must leave at least one order pending, or the
    # planted burger could never score
    cfg = _always_on(default_config)
    f = field_for(kitchen.reset(cfg, 0).layout)
    for seed in range(200):
        s = exploring_reset(cfg, seed)
        held = (int(s.agent_held[0]), int(s.agent_held[1]))
        late = (
            BURGER in held or BUN in held or int(s.cell_items[f.assembly]) == COOKED_PATTY
        )
        if late:
            assert int(np.count_nonzero(s.order_status == PENDING)) >= 1


def test_env_steps_cleanly_from_exploring_starts(default_config):
    cfg = _always_on(default_config)
    for seed in range(20):
        s = exploring_reset(cfg, seed)
        rng = np.random.default_rng(seed)
        for _ in range(30):
            if s.terminal:
                break
            acts = (Action(int(rng.integers(0, 6))), Action(int(rng.integers(0, 6))))
            out = kitchen.step(s, acts)
            s = out.next_state
            assert np.isfinite(out.base_reward)
