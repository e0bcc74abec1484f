"""Hand-scripted policies: a solvability oracle pair and probe deviants.

The oracle pair splits roles along the default layout's divider: the chef
(agent 0) cycles fridge -> stove -> handoff counters, the runner (agent 1)
ferries cooked patties to the assembly station, combines them with buns,
and delivers.  Both are replanning state machines over ground-truth state;
they carry no learned components and exist to prove the layout is solvable
and to force unilateral deviations in the equilibrium probe.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .env import (
    BUN,
    BURGER,
    COOKED_PATTY,
    EXPIRED,
    FACING_VECS,
    ITEM_NONE,
    PENDING,
    RAW_PATTY,
    Action,
    GridState,
)
from .layouts import ASSEMBLY, COUNTER, DELIVERY, FLOOR, FRIDGE, STOVE, Layout

# Neighbor order fixed (N, S, W, E) so BFS paths are deterministic.
_DIRS = ((-1, 0), (1, 0), (0, -1), (0, 1))
_MOVE_FOR_DELTA = {
    (-1, 0): Action.UP,
    (1, 0): Action.DOWN,
    (0, -1): Action.LEFT,
    (0, 1): Action.RIGHT,
}


def adjacent_floors(layout: Layout, cell: tuple[int, int]) -> list[tuple[int, int]]:
    """All walkable neighbors of a station cell, in fixed N/S/W/E order."""
    out = []
    for dr, dc in _DIRS:
        r, c = cell[0] + dr, cell[1] + dc
        if 0 <= r < layout.height and 0 <= c < layout.width and layout.kind[r, c] == FLOOR:
            out.append((r, c))
    return out


def bfs_field(
    layout: Layout,
    start: tuple[int, int],
    blocked: frozenset[tuple[int, int]],
) -> tuple[dict[tuple[int, int], int], dict[tuple[int, int], tuple[int, int]]]:
    """Distances and parents for every floor cell reachable from start."""
    dist = {start: 0}
    prev = {start: start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for dr, dc in _DIRS:
            nxt = (cur[0] + dr, cur[1] + dc)
            r, c = nxt
            if (
                0 <= r < layout.height
                and 0 <= c < layout.width
                and layout.kind[r, c] == FLOOR
                and nxt not in blocked
                and nxt not in dist
            ):
                dist[nxt] = dist[cur] + 1
                prev[nxt] = cur
                queue.append(nxt)
    return dist, prev


def first_step(
    prev: dict[tuple[int, int], tuple[int, int]],
    start: tuple[int, int],
    goal: tuple[int, int],
) -> tuple[int, int] | None:
    """First cell on the recovered shortest path, or None if goal == start."""
    if goal == start or goal not in prev:
        return None
    step = goal
    while prev[step] != start:
        step = prev[step]
    return step


class ScriptedPolicy:
    """Base: policies act from ground-truth state; observations are unused."""

    def __init__(self, agent_id: int):
        self.agent_id = agent_id

    def reset(self) -> None:
        pass

    def act(self, state: GridState, obs: np.ndarray | None, rng, deterministic: bool = True) -> int:
        raise NotImplementedError

    # -- shared movement helpers -----------------------------------------

    def _my_pos(self, state: GridState) -> tuple[int, int]:
        return (int(state.agent_pos[self.agent_id, 0]), int(state.agent_pos[self.agent_id, 1]))

    def _other_pos(self, state: GridState) -> tuple[int, int]:
        other = 1 - self.agent_id
        return (int(state.agent_pos[other, 0]), int(state.agent_pos[other, 1]))

    def _step_toward_spot(self, state: GridState, station: tuple[int, int]):
        """(arrived, action): route to the nearest free interaction spot.

        Considers every floor cell adjacent to the station, skips the one the
        partner occupies, and treats the partner as an obstacle when pathing,
        so the two roles never contend for a single approach cell.
        """
        pos = self._my_pos(state)
        other = self._other_pos(state)
        spots = [s for s in adjacent_floors(state.layout, station) if s != other]
        if pos in spots:
            return True, int(Action.STAY)
        dist, prev = bfs_field(state.layout, pos, frozenset([other]))
        reachable = [s for s in spots if s in dist]
        if not reachable:
            return False, int(Action.STAY)  # partner in the way; replan next step
        spot = min(reachable, key=lambda s: (dist[s], s))
        nxt = first_step(prev, pos, spot)
        if nxt is None:
            return False, int(Action.STAY)
        return False, int(_MOVE_FOR_DELTA[(nxt[0] - pos[0], nxt[1] - pos[1])])

    def _go_and_use(self, state: GridState, station: tuple[int, int]) -> int:
        """Walk beside station, face it (via a blocked push), then Interact."""
        arrived, action = self._step_toward_spot(state, station)
        if not arrived:
            return action
        pos = self._my_pos(state)
        delta = (station[0] - pos[0], station[1] - pos[1])
        facing_needed = _MOVE_FOR_DELTA[delta]
        cur_vec = FACING_VECS[int(state.agent_facing[self.agent_id])]
        if (cur_vec[0], cur_vec[1]) != delta:
            return int(facing_needed)  # move into the station: blocked, but faces it
        return int(Action.INTERACT)


def _patties_in_system(state: GridState) -> int:
    """Patties (any form, incl. inside burgers) introduced and not yet lost."""
    count = int(state.delivered_count)
    for item in state.agent_held:
        if int(item) in (RAW_PATTY, COOKED_PATTY, BURGER):
            count += 1
    for code in (RAW_PATTY, COOKED_PATTY, BURGER):
        count += int(np.count_nonzero(state.cell_items == code))
    return count


class OracleChef(ScriptedPolicy):
    """Left-side role: keep the stove busy, hand cooked patties over."""

    def __init__(self, agent_id: int = 0):
        super().__init__(agent_id)
        self._targets_set = False

    def _lazy_targets(self, layout: Layout) -> None:
        if self._targets_set:
            return
        self._stove = layout.cells_of_kind(STOVE)[0]
        self._fridge = layout.cells_of_kind(FRIDGE)[0]
        counters = [c for c in layout.cells_of_kind(COUNTER) if c not in layout.bun_counters]
        # Handoff counters: those adjacent to floor on both sides of the
        # divider; on the default layout these are the column-3 counters.
        self._handoffs = [c for c in counters if self._two_sided(layout, c)]
        if not self._handoffs:
            self._handoffs = counters
        self._targets_set = True

    @staticmethod
    def _two_sided(layout: Layout, cell: tuple[int, int]) -> bool:
        floors = 0
        for dr, dc in _DIRS:
            r, c = cell[0] + dr, cell[1] + dc
            if 0 <= r < layout.height and 0 <= c < layout.width and layout.kind[r, c] == FLOOR:
                floors += 1
        return floors >= 2

    def act(self, state: GridState, obs=None, rng=None, deterministic: bool = True) -> int:
        self._lazy_targets(state.layout)
        held = int(state.agent_held[self.agent_id])
        stove_item = int(state.cell_items[self._stove])

        if held == COOKED_PATTY:
            for counter in self._handoffs:
                if int(state.cell_items[counter]) == ITEM_NONE:
                    return self._go_and_use(state, counter)
            return int(Action.STAY)
        if held == RAW_PATTY:
            if stove_item == ITEM_NONE:
                return self._go_and_use(state, self._stove)
            return int(Action.STAY)
        if held == ITEM_NONE:
            if stove_item == COOKED_PATTY:
                return self._go_and_use(state, self._stove)
            unresolved = int(np.count_nonzero(state.order_status != EXPIRED))
            if stove_item == ITEM_NONE and _patties_in_system(state) < unresolved:
                return self._go_and_use(state, self._fridge)
            return int(Action.STAY)
        return int(Action.STAY)


class OracleRunner(ScriptedPolicy):
    """Right-side role: assemble burgers and deliver while orders pend."""

    def __init__(self, agent_id: int = 1):
        super().__init__(agent_id)
        self._targets_set = False

    def _lazy_targets(self, layout: Layout) -> None:
        if self._targets_set:
            return
        self._assembly = layout.cells_of_kind(ASSEMBLY)[0]
        self._delivery = layout.cells_of_kind(DELIVERY)[0]
        self._bun = sorted(layout.bun_counters)[0]
        counters = [c for c in layout.cells_of_kind(COUNTER) if c not in layout.bun_counters]
        self._handoffs = [c for c in counters if OracleChef._two_sided(layout, c)]
        if not self._handoffs:
            self._handoffs = counters
        self._targets_set = True

    def act(self, state: GridState, obs=None, rng=None, deterministic: bool = True) -> int:
        self._lazy_targets(state.layout)
        held = int(state.agent_held[self.agent_id])
        assembly_item = int(state.cell_items[self._assembly])
        pending = int(np.count_nonzero(state.order_status == PENDING))

        if held == BURGER:
            if pending > 0:
                return self._go_and_use(state, self._delivery)
            # Pre-position at the window and wait for the next arrival.
            _, action = self._step_toward_spot(state, self._delivery)
            return action
        if held == BUN:
            if assembly_item == COOKED_PATTY:
                return self._go_and_use(state, self._assembly)
            return int(Action.STAY)
        if held == COOKED_PATTY:
            if assembly_item == ITEM_NONE:
                return self._go_and_use(state, self._assembly)
            return int(Action.STAY)
        # Empty-handed: load the assembly line back to front.
        if assembly_item == COOKED_PATTY:
            return self._go_and_use(state, self._bun)
        for counter in self._handoffs:
            if int(state.cell_items[counter]) == COOKED_PATTY:
                return self._go_and_use(state, counter)
        return int(Action.STAY)


class ParkAndPress(ScriptedPolicy):
    """Walk to a station's interaction cell, face it, press Interact forever.

    Used by the deviation probe: a unilateral defector that abandons its
    role and camps the swapped station.
    """

    def __init__(self, agent_id: int, station_kind: int):
        super().__init__(agent_id)
        self.station_kind = station_kind
        self._station: tuple[int, int] | None = None

    def act(self, state: GridState, obs=None, rng=None, deterministic: bool = True) -> int:
        if self._station is None:
            self._station = state.layout.cells_of_kind(self.station_kind)[0]
        return self._go_and_use(state, self._station)


def deviation_policy(agent_id: int) -> ParkAndPress:
    """Role-swapped defector: agent 0 heads to delivery, agent 1 to the stove."""
    return ParkAndPress(agent_id, DELIVERY if agent_id == 0 else STOVE)


class NoOpPolicy(ScriptedPolicy):
    def act(self, state: GridState, obs=None, rng=None, deterministic: bool = True) -> int:
        return int(Action.STAY)


def oracle_pair() -> tuple[OracleChef, OracleRunner]:
    return OracleChef(0), OracleRunner(1)
