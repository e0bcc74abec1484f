"""Kitchen layout presets and the ASCII layout parser.

A layout is a rectangular ASCII block, one character per cell:

    ``#``  wall                  ``.``  floor
    ``F``  fridge (raw patties)  ``S``  stove
    ``A``  assembly station      ``D``  delivery window
    ``C``  counter               ``B``  counter that dispenses buns
    ``0``  floor, spawn of agent 0      ``1``  floor, spawn of agent 1

The default preset is a 7x5 kitchen split by a counter column with a
single-cell gap, so the two halves stay connected but crossing is a
bottleneck.  Items can be handed over the divider counters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# Cell kinds, in the order used by the observation one-hot block.
FLOOR = 0
WALL = 1
COUNTER = 2
FRIDGE = 3
STOVE = 4
ASSEMBLY = 5
DELIVERY = 6

N_CELL_KINDS = 7

CELL_CHARS = {
    ".": FLOOR,
    "#": WALL,
    "C": COUNTER,
    "B": COUNTER,  # bun dispenser is a counter with special interact rules
    "F": FRIDGE,
    "S": STOVE,
    "A": ASSEMBLY,
    "D": DELIVERY,
    "0": FLOOR,
    "1": FLOOR,
}

KIND_TO_CHAR = {
    FLOOR: ".",
    WALL: "#",
    COUNTER: "C",
    FRIDGE: "F",
    STOVE: "S",
    ASSEMBLY: "A",
    DELIVERY: "D",
}


@dataclass(frozen=True)
class Layout:
    """Parsed, immutable kitchen geometry."""

    name: str
    kind: np.ndarray  # (H, W) int8, values in [0, N_CELL_KINDS)
    spawns: tuple[tuple[int, int], tuple[int, int]]  # (row, col) per agent
    bun_counters: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    @property
    def height(self) -> int:
        return self.kind.shape[0]

    @property
    def width(self) -> int:
        return self.kind.shape[1]

    def cells_of_kind(self, kind: int) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(self.kind == kind)
        return [(int(r), int(c)) for r, c in zip(rows, cols)]

    def ascii(self) -> str:
        lines = []
        for r in range(self.height):
            row = []
            for c in range(self.width):
                if (r, c) in self.bun_counters:
                    row.append("B")
                elif (r, c) in self.spawns:
                    row.append(str(self.spawns.index((r, c))))
                else:
                    row.append(KIND_TO_CHAR[int(self.kind[r, c])])
            lines.append("".join(row))
        return "\n".join(lines)


def parse_layout(name: str, text: str) -> Layout:
    """Parse an ASCII layout block into a :class:`Layout`.

    Raises :class:`ConfigError` when the block is ragged, contains unknown
    characters, or does not define exactly two spawn cells on floor.
    """
    rows = [line for line in text.strip("\n").splitlines()]
    if not rows:
        raise ConfigError(f"layout {name!r}: empty layout text")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ConfigError(f"layout {name!r}: ragged rows (all rows must be width {width})")

    kind = np.zeros((len(rows), width), dtype=np.int8)
    spawns: dict[int, tuple[int, int]] = {}
    bun_counters = set()
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch not in CELL_CHARS:
                raise ConfigError(f"layout {name!r}: unknown cell char {ch!r} at ({r}, {c})")
            kind[r, c] = CELL_CHARS[ch]
            if ch in "01":
                spawns[int(ch)] = (r, c)
            elif ch == "B":
                bun_counters.add((r, c))

    if sorted(spawns) != [0, 1]:
        raise ConfigError(f"layout {name!r}: needs exactly two spawn cells '0' and '1'")
    if not _mutually_reachable(kind, spawns[0], spawns[1]):
        raise ConfigError(f"layout {name!r}: spawn cells are not mutually reachable")

    kind.setflags(write=False)
    return Layout(
        name=name,
        kind=kind,
        spawns=(spawns[0], spawns[1]),
        bun_counters=frozenset(bun_counters),
    )


def _mutually_reachable(kind: np.ndarray, a: tuple[int, int], b: tuple[int, int]) -> bool:
    """BFS over floor cells; spawns must share a connected component."""
    h, w = kind.shape
    seen = {a}
    frontier = [a]
    while frontier:
        r, c = frontier.pop()
        if (r, c) == b:
            return True
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and kind[nr, nc] == FLOOR and (nr, nc) not in seen:
                seen.add((nr, nc))
                frontier.append((nr, nc))
    return False


# Divider counters at (1,3) and (2,3) support handoffs; the gap at (3,3)
# keeps both halves reachable.  Agent 0 spawns on the fridge/stove side,
# agent 1 on the assembly/delivery side.
_PRESET_TEXT = {
    "burger_kitchen_7x5": """\
##S#CC#
F0.C..A
#..C.1B
#.....D
#######
""",
    "toy_4x4": """\
#SF#
A0.B
D.1C
####
""",
}

_PRESET_CACHE: dict[str, Layout] = {}


def preset_names() -> list[str]:
    return sorted(_PRESET_TEXT)


def load_preset(name: str) -> Layout:
    if name not in _PRESET_TEXT:
        raise ConfigError(
            f"unknown layout preset {name!r}; available: {', '.join(preset_names())}"
        )
    if name not in _PRESET_CACHE:
        _PRESET_CACHE[name] = parse_layout(name, _PRESET_TEXT[name])
    return _PRESET_CACHE[name]
