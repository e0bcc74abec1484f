"""Annealed curriculum signal for training: a task-progress potential.

Sparse delivery rewards arrive too late for policy-gradient exploration to
bootstrap the full fridge -> stove -> assembly -> delivery pipeline, so
shaped training adds aux_coef * scale * (phi(s') - phi(s)) to the TRAINING
reward channel only.  phi telescopes, so repeating any cycle nets zero
(nothing is farmable), and as a pure potential it leaves the ranking of
policies by base return unchanged.  Logged base/shaped rewards never
include it.  Like the verdict bonus and the exploring starts below, this
channel belongs to the shaped training configuration; the baseline arm
runs plain PPO on the sparse team reward.

phi = patty-stage ladder + per-agent distance breadcrumbs:
  - each live patty counts at its current stage (raw < cooking < cooked <
    carried < staged on assembly < burger < delivered), capped at the
    number of unresolved orders so surplus patties are worthless;
  - stages are spaced 1.0 apart, wider than the largest possible
    breadcrumb jump, so every pipeline action raises phi immediately even
    when it switches the agent's subgoal;
  - each agent earns -DIST_WEIGHT * (steps to its current subgoal).
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .env import (
    BUN,
    BURGER,
    COOKED_PATTY,
    FACING_VECS,
    ITEM_NONE,
    RAW_PATTY,
    GridState,
)
from .layouts import ASSEMBLY, COUNTER, DELIVERY, FLOOR, FRIDGE, STOVE, Layout

STAGE_RAW = 0.4
STAGE_COOKING = 1.4
STAGE_COOKED = 2.4  # cooked, resting on stove or a counter
STAGE_CARRIED = 3.4  # cooked, in an agent's hands
STAGE_ASSEMBLY = 4.4  # cooked, staged on the assembly station
STAGE_BURGER = 5.9
STAGE_DELIVERED = 6.9
BUN_STAGED = 0.5  # bun in hand while the assembly station is loaded
DIST_WEIGHT = 0.08  # max path ~10 on shipped layouts, so jumps stay < 1.0
FACE_BONUS = 0.15  # standing at the subgoal's spot, facing it: interact is next

_DIRS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def _distance_field(layout: Layout, station: tuple[int, int]) -> np.ndarray:
    """Steps from every floor cell to the nearest interaction spot (multi-source BFS)."""
    dist = np.full((layout.height, layout.width), -1, dtype=np.int32)
    queue: deque[tuple[int, int]] = deque()
    for dr, dc in _DIRS:
        r, c = station[0] + dr, station[1] + dc
        if 0 <= r < layout.height and 0 <= c < layout.width and layout.kind[r, c] == FLOOR:
            dist[r, c] = 0
            queue.append((r, c))
    while queue:
        r, c = queue.popleft()
        for dr, dc in _DIRS:
            nr, nc = r + dr, c + dc
            if (
                0 <= nr < layout.height
                and 0 <= nc < layout.width
                and layout.kind[nr, nc] == FLOOR
                and dist[nr, nc] < 0
            ):
                dist[nr, nc] = dist[r, c] + 1
                queue.append((nr, nc))
    return dist


class PotentialField:
    """Precomputed distance tables for one layout."""

    def __init__(self, layout: Layout):
        self.layout = layout
        self.stove = layout.cells_of_kind(STOVE)[0]
        self.fridge = layout.cells_of_kind(FRIDGE)[0]
        self.assembly = layout.cells_of_kind(ASSEMBLY)[0]
        self.delivery = layout.cells_of_kind(DELIVERY)[0]
        self.bun = sorted(layout.bun_counters)[0]
        self.plain_counters = [
            c for c in layout.cells_of_kind(COUNTER) if c not in layout.bun_counters
        ]
        cells = [self.stove, self.fridge, self.assembly, self.delivery, self.bun]
        cells.extend(self.plain_counters)
        self._dist = {cell: _distance_field(layout, cell) for cell in cells}

    def dist(self, cell: tuple[int, int], pos: tuple[int, int]) -> float:
        d = int(self._dist[cell][pos])
        return float(d) if d >= 0 else float(self.layout.height * self.layout.width)


_FIELDS: dict[str, PotentialField] = {}


def field_for(layout: Layout) -> PotentialField:
    if layout.name not in _FIELDS:
        _FIELDS[layout.name] = PotentialField(layout)
    return _FIELDS[layout.name]


def _subgoal(state: GridState, agent_id: int, f: PotentialField) -> tuple[int, int]:
    """Where this agent should be heading; every state has an answer."""
    held = int(state.agent_held[agent_id])
    stove_item = int(state.cell_items[f.stove])
    if held == BURGER:
        return f.delivery
    if held == COOKED_PATTY:
        return f.assembly
    if held == RAW_PATTY:
        if stove_item == ITEM_NONE:
            return f.stove
        for counter in f.plain_counters:  # stove busy: stage the patty
            if int(state.cell_items[counter]) == ITEM_NONE:
                return counter
        return f.stove
    if held == BUN:
        # camp at the bun counter until the assembly station is loaded, so
        # the station's single spot stays free for the patty carrier
        return f.assembly if int(state.cell_items[f.assembly]) == COOKED_PATTY else f.bun
    # empty-handed priorities mirror the task flow back to front
    if int(state.cell_items[f.assembly]) == COOKED_PATTY:
        return f.bun
    if stove_item == COOKED_PATTY:
        return f.stove
    for counter in f.plain_counters:
        if int(state.cell_items[counter]) == COOKED_PATTY:
            return counter
    if stove_item == RAW_PATTY:
        return f.stove  # wait within reach of the stove
    if stove_item == ITEM_NONE:
        for counter in f.plain_counters:  # retrieve a staged patty first
            if int(state.cell_items[counter]) == RAW_PATTY:
                return counter
    return f.fridge


def team_potential(state: GridState) -> float:
    """Progress of the whole kitchen plus both agents' breadcrumbs."""
    f = field_for(state.layout)
    held = state.agent_held
    items = state.cell_items
    stove_item = int(items[f.stove])
    assembly_item = int(items[f.assembly])

    n_burger = int(np.count_nonzero(items == BURGER)) + int(
        np.count_nonzero(held == BURGER)
    )
    n_assembly = 1 if assembly_item == COOKED_PATTY else 0
    n_carried = int(np.count_nonzero(held == COOKED_PATTY))
    n_cooked = int(np.count_nonzero(items == COOKED_PATTY)) - n_assembly
    n_cooking = 1 if stove_item == RAW_PATTY else 0
    n_raw = (
        int(np.count_nonzero(items == RAW_PATTY))
        + int(np.count_nonzero(held == RAW_PATTY))
        - n_cooking
    )

    delivered = int(state.delivered_count)
    # cap by the fixed order count so expiries never implode the potential;
    # the base reward already prices expiries
    slots = int(state.order_status.shape[0]) - delivered
    total = STAGE_DELIVERED * delivered
    assembly_counted = False
    for count, value in (
        (n_burger, STAGE_BURGER),
        (n_assembly, STAGE_ASSEMBLY),
        (n_carried, STAGE_CARRIED),
        (n_cooked, STAGE_COOKED),
        (n_cooking, STAGE_COOKING),
        (n_raw, STAGE_RAW),
    ):
        take = min(count, slots) if slots > 0 else 0
        total += value * take
        slots -= take
        if value == STAGE_ASSEMBLY and take > 0:
            assembly_counted = True

    if assembly_counted and int(np.count_nonzero(held == BUN)) > 0:
        total += BUN_STAGED

    for a in range(len(held)):
        goal = _subgoal(state, a, f)
        pos = (int(state.agent_pos[a, 0]), int(state.agent_pos[a, 1]))
        total -= DIST_WEIGHT * f.dist(goal, pos)
        dr, dc = FACING_VECS[int(state.agent_facing[a])]
        if (pos[0] + dr, pos[1] + dc) == goal:
            total += FACE_BONUS
    return total


# -- exploring starts ---------------------------------------------------

# Relative frequency of each mid-pipeline start once an episode is chosen
# for an exploring start.  Later stages get the most direct exposure: they
# are the states ordinary rollouts reach least often.
_START_STAGES = ("scatter", "cooking", "cooked", "staged", "bun", "burger")
_START_WEIGHTS = (0.08, 0.15, 0.19, 0.20, 0.19, 0.19)


def _warp_time(state: GridState, t0: int) -> None:
    """Jump the clock to t0 and bring order statuses along."""
    from .env import EXPIRED, PENDING, SCHEDULED

    state.t = t0
    status = np.where(state.order_arrival <= t0, PENDING, SCHEDULED)
    status = np.where(state.order_deadline <= t0, EXPIRED, status)
    state.order_status = status.astype(np.int8)


def exploring_reset(config, seed: int) -> GridState:
    """Training-only episode start.

    With probability config.ppo.exploring_starts the episode begins
    mid-pipeline: agents scattered, clock warped past the first order
    arrival, and a patty planted at a random stage.  The downstream
    stations then see on-policy data from step one instead of waiting for
    a full successful chain to be sampled.  Evaluation never uses this;
    it starts from the true reset distribution.
    """
    from . import env as kitchen

    state = kitchen.reset(config, seed)
    p = float(config.ppo.exploring_starts)
    if p <= 0.0 or not config.shaping.enabled:
        return state
    rng = np.random.default_rng(np.random.SeedSequence((seed, 23)))
    if rng.random() >= p:
        return state

    f = field_for(state.layout)
    stage = _START_STAGES[int(rng.choice(len(_START_STAGES), p=_START_WEIGHTS))]

    floors = np.argwhere(state.layout.kind == FLOOR)
    spots = rng.choice(len(floors), size=2, replace=False)
    state.agent_pos = floors[spots].astype(np.int16)
    state.agent_facing = rng.integers(0, 4, size=2).astype(np.int8)

    if stage in ("staged", "bun", "burger"):
        # make delivery completable: at least one order already pending
        lo = int(state.order_arrival.min())
        hi = max(lo + 1, int(state.order_deadline.min()) - 10)
        _warp_time(state, int(rng.integers(lo, hi)))
    else:
        _warp_time(state, int(rng.integers(0, max(1, state.horizon - 220))))

    if stage == "cooking":
        state.cell_items[f.stove] = RAW_PATTY
        state.cook_timer[f.stove] = int(rng.integers(1, state.cook_time + 1))
    elif stage == "cooked":
        state.cell_items[f.stove] = COOKED_PATTY
    elif stage == "staged":
        state.cell_items[f.assembly] = COOKED_PATTY
    elif stage == "bun":
        state.cell_items[f.assembly] = COOKED_PATTY
        state.agent_held[int(rng.integers(0, 2))] = BUN
    elif stage == "burger":
        state.agent_held[int(rng.integers(0, 2))] = BURGER
    return state
