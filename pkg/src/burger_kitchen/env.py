"""Deterministic two-agent Burger Kitchen gridworld.

State + transition dynamics for the cooking pipeline: take raw patties from
the fridge, cook them on the stove (fixed cook time), combine a cooked patty
with a bun at the assembly station, and hand finished burgers to the
delivery window while orders are pending.  Rewards are a single team scalar:
+reward_delivery per delivery, +reward_expiry per expired order.

Agents act simultaneously from the caller's view; internally agent 0 is
resolved before agent 1 each step (fixed priority), which settles move
conflicts deterministically.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import layouts
from .config import RunConfig
from .errors import ContractError
from .layouts import ASSEMBLY, COUNTER, DELIVERY, FLOOR, FRIDGE, STOVE, Layout

N_AGENTS = 2

# Item codes (0 = empty hand / empty cell).
ITEM_NONE = 0
RAW_PATTY = 1
COOKED_PATTY = 2
BUN = 3
BURGER = 4
N_ITEMS = 5  # including "none"

ITEM_NAMES = ("None", "RawPatty", "CookedPatty", "Bun", "AssembledBurger")

# Facing codes and their (row, col) deltas.
NORTH, SOUTH, EAST, WEST = 0, 1, 2, 3
FACING_NAMES = ("N", "S", "E", "W")
FACING_VECS = ((-1, 0), (1, 0), (0, 1), (0, -1))

# Order statuses.
SCHEDULED = 0
PENDING = 1
DELIVERED = 2
EXPIRED = 3
STATUS_NAMES = ("Scheduled", "Pending", "Delivered", "Expired")


class Action(enum.IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    STAY = 4
    INTERACT = 5


N_ACTIONS = len(Action)

_ACTION_TO_FACING = {
    Action.UP: NORTH,
    Action.DOWN: SOUTH,
    Action.LEFT: WEST,
    Action.RIGHT: EAST,
}


@dataclass(frozen=True)
class Event:
    """One structured environment event.

    kind is one of Delivered, Expired, Cooked, Assembled, Blocked, PickedUp,
    Placed.  agent is -1 for agentless events (Cooked, Expired); order is -1
    unless the event resolves an order.
    """

    kind: str
    agent: int = -1
    pos: tuple[int, int] | None = None
    item: int = ITEM_NONE
    order: int = -1

    def encode(self) -> str:
        parts = []
        if self.agent >= 0:
            parts.append(f"agent={self.agent}")
        if self.pos is not None:
            parts.append(f"pos={self.pos[0]}-{self.pos[1]}")
        if self.item != ITEM_NONE:
            parts.append(f"item={ITEM_NAMES[self.item]}")
        if self.order >= 0:
            parts.append(f"order={self.order}")
        return f"{self.kind}({','.join(parts)})"


@dataclass(frozen=True)
class AgentView:
    id: int
    position: tuple[int, int]
    facing: str
    held: str


@dataclass(frozen=True)
class OrderView:
    index: int
    arrival: int
    deadline: int
    status: str


class GridState:
    """Mutable array-backed kitchen state; step() works on a copy."""

    __slots__ = (
        "layout",
        "t",
        "horizon",
        "cook_time",
        "reward_delivery",
        "reward_expiry",
        "agent_pos",
        "agent_facing",
        "agent_held",
        "cell_items",
        "cook_timer",
        "order_arrival",
        "order_deadline",
        "order_status",
        "delivered_count",
        "terminal",
    )

    def __init__(
        self,
        layout: Layout,
        horizon: int,
        cook_time: int,
        reward_delivery: float,
        reward_expiry: float,
        arrivals: np.ndarray,
        deadlines: np.ndarray,
    ):
        self.layout = layout
        self.t = 0
        self.horizon = horizon
        self.cook_time = cook_time
        self.reward_delivery = reward_delivery
        self.reward_expiry = reward_expiry
        self.agent_pos = np.array(layout.spawns, dtype=np.int16)
        # Default facings point west/east so each agent starts oriented
        # toward its own half of the kitchen; arbitrary but fixed.
        self.agent_facing = np.array([WEST, EAST], dtype=np.int8)
        self.agent_held = np.zeros(N_AGENTS, dtype=np.int8)
        self.cell_items = np.zeros(layout.kind.shape, dtype=np.int8)
        self.cook_timer = np.full(layout.kind.shape, -1, dtype=np.int16)
        self.order_arrival = arrivals.astype(np.int32)
        self.order_deadline = deadlines.astype(np.int32)
        self.order_status = np.where(self.order_arrival <= 0, PENDING, SCHEDULED).astype(np.int8)
        self.delivered_count = 0
        self.terminal = bool(horizon == 0)

    def copy(self) -> "GridState":
        new = GridState.__new__(GridState)
        new.layout = self.layout
        new.t = self.t
        new.horizon = self.horizon
        new.cook_time = self.cook_time
        new.reward_delivery = self.reward_delivery
        new.reward_expiry = self.reward_expiry
        new.agent_pos = self.agent_pos.copy()
        new.agent_facing = self.agent_facing.copy()
        new.agent_held = self.agent_held.copy()
        new.cell_items = self.cell_items.copy()
        new.cook_timer = self.cook_timer.copy()
        new.order_arrival = self.order_arrival.copy()
        new.order_deadline = self.order_deadline.copy()
        new.order_status = self.order_status.copy()
        new.delivered_count = self.delivered_count
        new.terminal = self.terminal
        return new

    # -- views ------------------------------------------------------------

    @property
    def agents(self) -> tuple[AgentView, ...]:
        return tuple(
            AgentView(
                id=i,
                position=(int(self.agent_pos[i, 0]), int(self.agent_pos[i, 1])),
                facing=FACING_NAMES[int(self.agent_facing[i])],
                held=ITEM_NAMES[int(self.agent_held[i])],
            )
            for i in range(N_AGENTS)
        )

    @property
    def orders(self) -> tuple[OrderView, ...]:
        return tuple(
            OrderView(
                index=i,
                arrival=int(self.order_arrival[i]),
                deadline=int(self.order_deadline[i]),
                status=STATUS_NAMES[int(self.order_status[i])],
            )
            for i in range(len(self.order_arrival))
        )

    @property
    def n_orders(self) -> int:
        return len(self.order_arrival)

    def signature(self) -> bytes:
        """Byte string identifying the full state (for determinism checks)."""
        return b"".join(
            (
                self.t.to_bytes(4, "little"),
                self.agent_pos.tobytes(),
                self.agent_facing.tobytes(),
                self.agent_held.tobytes(),
                self.cell_items.tobytes(),
                self.cook_timer.tobytes(),
                self.order_arrival.tobytes(),
                self.order_deadline.tobytes(),
                self.order_status.tobytes(),
                self.delivered_count.to_bytes(4, "little"),
                self.terminal.to_bytes(1, "little"),
            )
        )


@dataclass(frozen=True)
class StepOutcome:
    next_state: GridState
    base_reward: float
    events: tuple[Event, ...]


def reset(config: RunConfig, seed: int) -> GridState:
    """Initial state for one episode; seed drives order-timing jitter only."""
    from . import noise  # local import keeps module load order simple

    layout = layouts.load_preset(config.env.layout)
    arrivals = np.asarray(config.env.order_arrivals, dtype=np.int64)
    deadlines = np.asarray(config.env.order_deadlines, dtype=np.int64)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    arrivals, deadlines = noise.perturb_schedule(
        arrivals, deadlines, config.noise, config.env.horizon, rng
    )
    return GridState(
        layout=layout,
        horizon=config.env.horizon,
        cook_time=config.env.cook_time,
        reward_delivery=config.env.reward_delivery,
        reward_expiry=config.env.reward_expiry,
        arrivals=arrivals,
        deadlines=deadlines,
    )


def pending_orders(state: GridState) -> int:
    return int(np.count_nonzero(state.order_status == PENDING))


def is_terminal(state: GridState) -> bool:
    return state.terminal


def _try_move(ns: GridState, agent: int, facing: int, events: list[Event]) -> None:
    ns.agent_facing[agent] = facing
    dr, dc = FACING_VECS[facing]
    r = int(ns.agent_pos[agent, 0]) + dr
    c = int(ns.agent_pos[agent, 1]) + dc
    h, w = ns.layout.kind.shape
    other = 1 - agent
    blocked = (
        not (0 <= r < h and 0 <= c < w)
        or ns.layout.kind[r, c] != FLOOR
        or (int(ns.agent_pos[other, 0]) == r and int(ns.agent_pos[other, 1]) == c)
    )
    if blocked:
        events.append(Event("Blocked", agent=agent, pos=(r, c)))
    else:
        ns.agent_pos[agent, 0] = r
        ns.agent_pos[agent, 1] = c


def _deliver(ns: GridState, agent: int, pos: tuple[int, int], events: list[Event]) -> float:
    """Resolve one delivery against the earliest-deadline pending order."""
    pending = np.nonzero(ns.order_status == PENDING)[0]
    if len(pending) == 0:
        events.append(Event("Blocked", agent=agent, pos=pos))
        return 0.0
    idx = int(pending[np.argmin(ns.order_deadline[pending])])
    ns.order_status[idx] = DELIVERED
    ns.delivered_count += 1
    ns.agent_held[agent] = ITEM_NONE
    events.append(Event("Delivered", agent=agent, pos=pos, item=BURGER, order=idx))
    return ns.reward_delivery


def _interact(ns: GridState, agent: int, events: list[Event]) -> float:
    dr, dc = FACING_VECS[int(ns.agent_facing[agent])]
    r = int(ns.agent_pos[agent, 0]) + dr
    c = int(ns.agent_pos[agent, 1]) + dc
    h, w = ns.layout.kind.shape
    if not (0 <= r < h and 0 <= c < w):
        events.append(Event("Blocked", agent=agent, pos=(r, c)))
        return 0.0
    kind = int(ns.layout.kind[r, c])
    held = int(ns.agent_held[agent])
    pos = (r, c)

    if kind == FRIDGE:
        if held == ITEM_NONE:
            ns.agent_held[agent] = RAW_PATTY
            events.append(Event("PickedUp", agent=agent, pos=pos, item=RAW_PATTY))
            return 0.0
    elif kind == COUNTER and pos in ns.layout.bun_counters:
        # Bun dispenser: infinite supply, never accepts placements.
        if held == ITEM_NONE:
            ns.agent_held[agent] = BUN
            events.append(Event("PickedUp", agent=agent, pos=pos, item=BUN))
            return 0.0
    elif kind == COUNTER:
        cell = int(ns.cell_items[r, c])
        if held == ITEM_NONE and cell != ITEM_NONE:
            ns.agent_held[agent] = cell
            ns.cell_items[r, c] = ITEM_NONE
            events.append(Event("PickedUp", agent=agent, pos=pos, item=cell))
            return 0.0
        if held != ITEM_NONE and cell == ITEM_NONE:
            ns.cell_items[r, c] = held
            ns.agent_held[agent] = ITEM_NONE
            events.append(Event("Placed", agent=agent, pos=pos, item=held))
            return 0.0
    elif kind == STOVE:
        cell = int(ns.cell_items[r, c])
        if held == RAW_PATTY and cell == ITEM_NONE:
            ns.cell_items[r, c] = RAW_PATTY
            ns.cook_timer[r, c] = ns.cook_time
            ns.agent_held[agent] = ITEM_NONE
            events.append(Event("Placed", agent=agent, pos=pos, item=RAW_PATTY))
            return 0.0
        if held == ITEM_NONE and cell == COOKED_PATTY:
            ns.agent_held[agent] = COOKED_PATTY
            ns.cell_items[r, c] = ITEM_NONE
            ns.cook_timer[r, c] = -1
            events.append(Event("PickedUp", agent=agent, pos=pos, item=COOKED_PATTY))
            return 0.0
    elif kind == ASSEMBLY:
        cell = int(ns.cell_items[r, c])
        if held == COOKED_PATTY and cell == ITEM_NONE:
            ns.cell_items[r, c] = COOKED_PATTY
            ns.agent_held[agent] = ITEM_NONE
            events.append(Event("Placed", agent=agent, pos=pos, item=COOKED_PATTY))
            return 0.0
        if held == BUN and cell == COOKED_PATTY:
            ns.cell_items[r, c] = ITEM_NONE
            ns.agent_held[agent] = BURGER
            events.append(Event("Assembled", agent=agent, pos=pos, item=BURGER))
            return 0.0
        if held == ITEM_NONE and cell != ITEM_NONE:
            ns.agent_held[agent] = cell
            ns.cell_items[r, c] = ITEM_NONE
            events.append(Event("PickedUp", agent=agent, pos=pos, item=cell))
            return 0.0
    elif kind == DELIVERY:
        if held == BURGER:
            return _deliver(ns, agent, pos, events)

    events.append(Event("Blocked", agent=agent, pos=pos))
    return 0.0


def step(state: GridState, joint_action: tuple[int, int]) -> StepOutcome:
    """Advance one timestep under a joint action.

    Resolution order: agent 0's action, agent 1's action, stove tick, then
    the order lifecycle at t+1 (arrivals activate, overdue orders expire).
    """
    if state.terminal:
        raise ContractError("step() called on a terminal state")
    ns = state.copy()
    events: list[Event] = []
    reward = 0.0

    for agent in range(N_AGENTS):
        action = Action(int(joint_action[agent]))
        if action in _ACTION_TO_FACING:
            _try_move(ns, agent, _ACTION_TO_FACING[action], events)
        elif action == Action.INTERACT:
            reward += _interact(ns, agent, events)
        # Stay: no movement, no event.

    # Stove tick: timers count down once per step, including the step the
    # patty was placed; the patty flips to cooked when the timer hits zero.
    ticking = ns.cook_timer > 0
    if np.any(ticking):
        ns.cook_timer[ticking] -= 1
        done = ticking & (ns.cook_timer == 0) & (ns.cell_items == RAW_PATTY)
        for r, c in zip(*np.nonzero(done)):
            ns.cell_items[r, c] = COOKED_PATTY
            events.append(Event("Cooked", pos=(int(r), int(c)), item=COOKED_PATTY))

    ns.t = state.t + 1
    arrived = (ns.order_status == SCHEDULED) & (ns.order_arrival <= ns.t)
    ns.order_status[arrived] = PENDING
    overdue = (ns.order_status == PENDING) & (ns.order_deadline <= ns.t)
    for idx in np.nonzero(overdue)[0]:
        ns.order_status[idx] = EXPIRED
        reward += ns.reward_expiry
        events.append(Event("Expired", order=int(idx)))

    ns.terminal = bool(
        ns.t >= ns.horizon or np.all((ns.order_status == DELIVERED) | (ns.order_status == EXPIRED))
    )
    return StepOutcome(next_state=ns, base_reward=float(reward), events=tuple(events))
