from __future__ import annotations

import itertools

import pytest

from fitfree.catalog import catalog_group, cyclic, small_groups
from fitfree.errors import BudgetExceeded
from fitfree.group_core import random_relabel
from fitfree.wl_countfree import (
    distinguish,
    individualize_and_refine,
    pebble_game_solve,
    pin_schedule,
    wl_refine,
)


def _small(name):
    return next(G for G in small_groups(12) if G.name == name)


def test_individualizing_everything_is_discrete_after_one_round():
    G = cyclic(6)
    c = wl_refine(G, 2, max_rounds=1, individualized=range(6))
    assert c.num_colors == 36


def test_self_comparison_never_distinguishes():
    for G in small_groups(12):
        assert not distinguish(G, G, 2, 4).distinguished


def test_order_mismatch_is_round_zero():
    v = distinguish(cyclic(4), cyclic(5), 2, 3)
    assert v.distinguished and v.round == 0


def test_c4_versus_klein_four():
    C4, V4 = cyclic(4), _small("C2xC2")
    assert distinguish(C4, V4, 3, 5).distinguished
    assert pebble_game_solve(C4, V4, 4, 4).winner == "Spoiler"


def test_game_trivial_and_order_mismatch():
    C1 = cyclic(1)
    assert pebble_game_solve(C1, C1, 3, 3).winner == "Duplicator"
    r = pebble_game_solve(cyclic(2), cyclic(3), 3, 0)
    assert r.winner == "Spoiler"


def test_game_agrees_with_refinement_on_order_eight():
    eights = [G for G in small_groups(12) if G.n == 8]
    for G, H in itertools.combinations_with_replacement(eights, 2):
        for r in (1, 2):
            wl = distinguish(G, H, 2, r).distinguished
            assert wl == (pebble_game_solve(G, H, 3, r).winner == "Spoiler"), (G.name, H.name, r)


def test_individualize_a5_vs_c60():
    v = individualize_and_refine(catalog_group("A5"), cyclic(60), 2, budget=10)
    assert v.distinguished and v.label.startswith("Distinguished")


def test_individualize_isomorphic_pairs(nprng):
    for name in ("A5", "S5"):
        G = catalog_group(name)
        H, _ = random_relabel(G, nprng)
        v = individualize_and_refine(G, H, 2, budget=3, max_rounds=3)
        assert not v.distinguished and v.pins_tried == 3


def test_pin_schedule_is_deterministic():
    G = catalog_group("A5")
    s = pin_schedule(G)
    assert s == pin_schedule(G) and sorted(s) == list(range(G.n))


def test_budget_guards():
    with pytest.raises(BudgetExceeded):
        wl_refine(cyclic(4), k=4)
