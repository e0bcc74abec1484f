"""Layout parser and preset geometry."""

import numpy as np
import pytest

from burger_kitchen.errors import ConfigError
from burger_kitchen.layouts import (
    ASSEMBLY,
    COUNTER,
    DELIVERY,
    FLOOR,
    FRIDGE,
    STOVE,
    WALL,
    load_preset,
    parse_layout,
    preset_names,
)


def test_default_preset_geometry():
    lay = load_preset("burger_kitchen_7x5")
    assert (lay.height, lay.width) == (5, 7)
    assert lay.spawns == ((1, 1), (2, 5))
    assert lay.cells_of_kind(FRIDGE) == [(1, 0)]
    assert lay.cells_of_kind(STOVE) == [(0, 2)]
    assert lay.cells_of_kind(ASSEMBLY) == [(1, 6)]
    assert lay.cells_of_kind(DELIVERY) == [(3, 6)]
    assert lay.bun_counters == frozenset({(2, 6)})
    # bun dispenser reads as a counter in the kind grid
    assert (2, 6) in lay.cells_of_kind(COUNTER)


def test_default_preset_border_is_wall():
    lay = load_preset("burger_kitchen_7x5")
    kind = lay.kind
    assert np.all(kind[-1, :] == WALL)
    assert kind[0, 0] == WALL and kind[0, -1] == WALL


def test_ascii_round_trip():
    for name in preset_names():
        lay = load_preset(name)
        again = parse_layout(name, lay.ascii())
        assert np.array_equal(again.kind, lay.kind)
        assert again.spawns == lay.spawns
        assert again.bun_counters == lay.bun_counters


def test_preset_cache_returns_same_object():
    assert load_preset("toy_4x4") is load_preset("toy_4x4")


def test_kind_grid_is_readonly():
    lay = load_preset("burger_kitchen_7x5")
    with pytest.raises(ValueError):
        lay.kind[0, 0] = FLOOR


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        load_preset("nope")


@pytest.mark.parametrize(
    "text",
    [
        "",  # empty
        "#01\n##",  # ragged
        "#X01#",  # unknown char
        "#0.#",  # missing spawn 1
        "#0#1#",  # spawns separated by wall
    ],
)
def test_bad_layouts_rejected(text):
    with pytest.raises(ConfigError):
        parse_layout("bad", text)


def test_spawn_cells_are_floor():
    for name in preset_names():
        lay = load_preset(name)
        for r, c in lay.spawns:
            assert lay.kind[r, c] == FLOOR
