from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fitfree.catalog import cyclic
from fitfree.errors import MalformedInstance, RestrictionNotIsomorphism
from fitfree.group_core import group_from_permutations
from fitfree.oracle import brute_force_twisted_eq
from fitfree.perm_core import identity
from fitfree.twisted_codeq import (
    DPStats,
    TwistedCodeInstance,
    code_of_group_embedding,
    format_tcode,
    parse_tcode_lines,
    solve_twisted_codeq,
)

from helpers import random_twisted_instance


def _trivial(a):
    G, E = group_from_permutations([], a)
    return G, E


def _swap():
    return group_from_permutations([(1, 0)], 2)


def test_single_string_trivial_groups():
    G, E = _trivial(2)
    inst = TwistedCodeInstance([2], [2], [G], [E], [(0, 1)], [(0, 1)])
    res = solve_twisted_codeq(inst)
    assert res.size == 1 and inst.apply(res.rep, (0, 1)) == (0, 1)


def test_swap_twist_makes_codes_equivalent():
    G, E = _swap()
    inst = TwistedCodeInstance([2], [2], [G], [E], [(0, 0), (1, 1)], [(0, 1), (1, 0)])
    res = solve_twisted_codeq(inst)
    assert not res.is_empty
    assert {inst.apply(res.rep, s) for s in inst.code_a} == set(inst.code_b)
    assert set(res.elements()) == brute_force_twisted_eq(inst)


def test_untwisted_mismatch_is_empty():
    G, E = _trivial(2)
    inst = TwistedCodeInstance([2], [2], [G], [E], [(0, 0)], [(0, 1)])
    assert solve_twisted_codeq(inst).is_empty


def test_size_mismatch_is_empty():
    G, E = _trivial(2)
    inst = TwistedCodeInstance([2], [1], [G], [E], [(0,), (1,)], [(0,)])
    assert solve_twisted_codeq(inst).is_empty


def test_malformed_action_rejected():
    G = cyclic(2)
    bad = np.array([[0, 1], [0, 0]])
    inst = TwistedCodeInstance([2], [1], [G], [bad], [(0,)], [(0,)])
    with pytest.raises(MalformedInstance):
        solve_twisted_codeq(inst)


def test_ill_typed_string_rejected():
    G, E = _trivial(2)
    inst = TwistedCodeInstance([2], [1], [G], [E], [(2,)], [(0,)])
    with pytest.raises(MalformedInstance):
        solve_twisted_codeq(inst)


def test_stages_run_in_decreasing_length():
    inst = random_twisted_instance(random.Random(3))
    st_ = DPStats()
    solve_twisted_codeq(inst, st_)
    assert st_.stage_order == sorted(st_.stage_order, reverse=True)


def test_code_of_group_embedding():
    e, s = identity(2), (1, 0)
    alphabet = {e: 0, s: 1}
    code = code_of_group_embedding([[e], [s]], [alphabet], [e])
    assert code == frozenset({(0,), (1,)})
    code2 = code_of_group_embedding([[e, e], [s, s]], [alphabet, alphabet], [e, e])
    assert len(code2) == 2
    with pytest.raises(RestrictionNotIsomorphism):
        code_of_group_embedding([], [alphabet], [e])


def test_tcode_round_trip():
    inst = random_twisted_instance(random.Random(11))
    again = parse_tcode_lines(format_tcode(inst).splitlines())
    assert again.code_a == inst.code_a and again.code_b == inst.code_b
    assert again.alphabet_sizes == inst.alphabet_sizes and again.lengths == inst.lengths


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_matches_brute_force(seed):
    inst = random_twisted_instance(random.Random(seed), max_len=4, max_candidates=20_000)
    assert set(solve_twisted_codeq(inst).elements()) == brute_force_twisted_eq(inst)
