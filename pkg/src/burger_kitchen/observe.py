"""Flatten a GridState into the fixed-length observation vector.

Per-cell feature block (row-major cell order), 22 features:

    [0:7)    cell kind one-hot (Floor, Wall, Counter, Fridge, Stove,
             AssemblyStation, DeliveryWindow)
    [7:12)   item one-hot including "none"; an agent's held item is shown
             at the cell the agent occupies (floor cells never hold items
             on their own, so the slot is unambiguous)
    [12:17)  self-agent block: [absent, N, S, E, W]
    [17:22)  other-agent block: same layout

Two task scalars follow the grid block: t/T and pending/K, both in [0, 1].
Every block sums to exactly 1, so visibility masking (whole-block zeroing)
is detectable by a policy.
"""

from __future__ import annotations

import numpy as np

from .config import RunConfig
from .env import ITEM_NONE, N_ITEMS, PENDING, GridState
from .layouts import N_CELL_KINDS, load_preset

N_AGENT_FEATURES = 5  # absent + four facings
GRID_FEATURES = N_CELL_KINDS + N_ITEMS + 2 * N_AGENT_FEATURES  # 22
N_SCALARS = 2

_EYE_ITEMS = np.eye(N_ITEMS, dtype=np.float32)


def obs_dim(config: RunConfig) -> int:
    layout = load_preset(config.env.layout)
    return layout.height * layout.width * GRID_FEATURES + N_SCALARS


def encode(state: GridState, agent_id: int, config: RunConfig) -> np.ndarray:
    """Ground-truth observation for one agent; pure, no state mutation."""
    if agent_id not in (0, 1):
        raise ValueError(f"agent_id must be 0 or 1, got {agent_id}")
    layout = state.layout
    n_cells = layout.height * layout.width
    out = np.zeros(n_cells * GRID_FEATURES + N_SCALARS, dtype=np.float32)
    grid = out[: n_cells * GRID_FEATURES].reshape(n_cells, GRID_FEATURES)

    kinds = layout.kind.ravel()
    grid[np.arange(n_cells), kinds] = 1.0

    items = state.cell_items.ravel().copy()
    width = layout.width
    cell_idx = state.agent_pos[:, 0].astype(np.int64) * width + state.agent_pos[:, 1]
    for a in range(2):
        held = int(state.agent_held[a])
        if held != ITEM_NONE:
            items[cell_idx[a]] = held
    grid[:, N_CELL_KINDS : N_CELL_KINDS + N_ITEMS] = _EYE_ITEMS[items]

    self_base = N_CELL_KINDS + N_ITEMS
    other_base = self_base + N_AGENT_FEATURES
    grid[:, self_base] = 1.0
    grid[:, other_base] = 1.0
    me, other = agent_id, 1 - agent_id
    grid[cell_idx[me], self_base] = 0.0
    grid[cell_idx[me], self_base + 1 + int(state.agent_facing[me])] = 1.0
    grid[cell_idx[other], other_base] = 0.0
    grid[cell_idx[other], other_base + 1 + int(state.agent_facing[other])] = 1.0

    pending = int(np.count_nonzero(state.order_status == PENDING))
    out[-2] = np.float32(state.t) / np.float32(state.horizon)
    out[-1] = np.float32(pending) / np.float32(state.n_orders)
    return out
