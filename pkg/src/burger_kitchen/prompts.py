"""Compact textual prompts rendered from ground-truth task context.

The base template is exactly `orders:{pending} t:{t}/{horizon}`.  An
extended template appending each agent's Manhattan distance to the delivery
window exists behind the shaping.extended_prompt flag, off by default.
Prompt content never depends on noisy observations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .env import PENDING, GridState
from .errors import MalformedPromptError
from .layouts import DELIVERY

_PROMPT_RE = re.compile(r"^orders:(\d+) t:(\d+)/(\d+)(?: dA:(\d+) dB:(\d+))?$")


@dataclass(frozen=True)
class TaskContext:
    pending: int
    t: int
    horizon: int


def render_prompt(ctx: TaskContext) -> str:
    return f"orders:{ctx.pending} t:{ctx.t}/{ctx.horizon}"


def render_prompt_extended(ctx: TaskContext, dist_a: int, dist_b: int) -> str:
    return f"{render_prompt(ctx)} dA:{dist_a} dB:{dist_b}"


def context_from_state(state: GridState) -> TaskContext:
    pending = int(np.count_nonzero(state.order_status == PENDING))
    return TaskContext(pending=pending, t=state.t, horizon=state.horizon)


def prompt_from_state(state: GridState, extended: bool = False) -> str:
    ctx = context_from_state(state)
    if not extended:
        return render_prompt(ctx)
    cells = state.layout.cells_of_kind(DELIVERY)
    goal = cells[0]
    dists = [
        abs(int(state.agent_pos[a, 0]) - goal[0]) + abs(int(state.agent_pos[a, 1]) - goal[1])
        for a in (0, 1)
    ]
    return render_prompt_extended(ctx, dists[0], dists[1])


def parse_prompt(prompt: str) -> TaskContext:
    """Parse a rendered prompt back into its context.

    Accepts the base template with or without the distance extension;
    anything else raises MalformedPromptError.
    """
    m = _PROMPT_RE.match(prompt)
    if m is None:
        raise MalformedPromptError(f"prompt does not match template: {prompt!r}")
    return TaskContext(pending=int(m.group(1)), t=int(m.group(2)), horizon=int(m.group(3)))
