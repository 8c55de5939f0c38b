from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fitfree.errors import DegreeMismatch, ElementNotInGroup, NotAHomomorphism, ValidationFailed
from fitfree.perm_core import (
    PermGroup,
    action_kernel,
    eval_word,
    from_cycles,
    identity,
    inv,
    membership,
    mul,
    normal_closure,
    parse_perm,
    perm_order,
    pointwise_stabilizer,
    reduce_generators,
    to_cycles,
)

from helpers import pg, random_perm

perms6 = st.permutations(list(range(6))).map(tuple)


def test_mul_applies_left_first():
    p, q = from_cycles("(1 2)", 3), from_cycles("(2 3)", 3)
    # 1 -> 2 -> 3
    assert mul(p, q)[0] == 2


def test_cycles_round_trip():
    p = from_cycles("(1 3 5)(2 4)", 6)
    assert to_cycles(p) == "(1 3 5)(2 4)" and perm_order(p) == 6
    assert to_cycles(identity(4)) == "()"


def test_parse_perm_forms():
    assert parse_perm("2,3,1", 3) == parse_perm("(1 2 3)", 3)
    with pytest.raises(ValidationFailed):
        parse_perm("1,1,2", 3)


def test_orders():
    assert pg(4, "(1 2 3 4)", "(1 2)").order == 24
    assert pg(5, "(1 2 3 4 5)", "(1 2 3)").order == 60
    assert pg(6).order == 1


def test_generator_degree_checked():
    with pytest.raises(DegreeMismatch):
        PermGroup(4, [(1, 0, 2)])


def test_membership_words():
    S4 = pg(4, "(1 2 3 4)", "(1 2)")
    sigma = from_cycles("(1 3)(2 4)", 4)
    w = membership(S4, sigma)
    assert w is not None and eval_word(w, S4.generators, 4) == sigma
    C4 = pg(4, "(1 2 3 4)")
    assert membership(C4, from_cycles("(1 2)", 4)) is None


def test_membership_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        membership(pg(4, "(1 2)"), (0, 1, 2))


def test_pointwise_stabilizer_s5():
    S5 = pg(5, "(1 2 3 4 5)", "(1 2)")
    assert pointwise_stabilizer(S5, [0]).order == 24
    assert pointwise_stabilizer(S5, [0, 1]).order == 6


def test_action_kernel_on_blocks():
    D4 = pg(4, "(1 2 3 4)", "(1 3)")
    # action on blocks {1,3},{2,4}
    K = action_kernel(D4, [(1, 0), (0, 1)])
    assert K.order == 4


def test_action_kernel_rejects_non_hom():
    C4 = pg(4, "(1 2 3 4)")
    with pytest.raises(NotAHomomorphism):
        action_kernel(C4, [(1, 2, 0)])


def test_normal_closure_in_s4():
    S4 = pg(4, "(1 2 3 4)", "(1 2)")
    assert normal_closure(S4, [from_cycles("(1 2)(3 4)", 4)]).order == 4
    assert normal_closure(S4, [from_cycles("(1 2 3)", 4)]).order == 12
    with pytest.raises(ElementNotInGroup):
        normal_closure(pg(4, "(1 2 3 4)"), [from_cycles("(1 2)", 4)])


def test_reduce_generators_keeps_group():
    G = PermGroup(5, [from_cycles(c, 5) for c in ("(1 2)", "(1 2 3 4 5)", "(2 3)", "(1 3)")])
    R = reduce_generators(G)
    assert R.same_group(G) and len(R.generators) <= 3


@settings(max_examples=40, deadline=None)
@given(perms6, perms6)
def test_inverse_laws(p, q):
    assert mul(p, inv(p)) == identity(6)
    assert inv(mul(p, q)) == mul(inv(q), inv(p))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_membership_matches_enumeration(seed):
    rng = random.Random(seed)
    G = PermGroup(5, [random_perm(rng, 5) for _ in range(rng.randint(1, 2))])
    elems = set(G.elements())
    assert len(elems) == G.order
    x = random_perm(rng, 5)
    w = membership(G, x)
    assert (w is not None) == (x in elems)
    if w is not None:
        assert eval_word(w, G.generators, 5) == x
