from __future__ import annotations

import itertools

import pytest

from fitfree.blocks_trees import BlockSystem, block_system_of, blocks_action, minimal_blocks_containing
from fitfree.errors import IsGiant, NotPrimitive, NotTransitive, PhiNotHomomorphism, PreconditionViolated
from fitfree.oracle import brute_force_piso
from fitfree.perm_core import PermGroup, from_cycles, is_perm_isomorphism
from fitfree.piso import (
    PisoStats,
    piso_extend_unique,
    piso_extensions_trivial_kernel,
    piso_from_abstract_iso,
    piso_kernel_diagonal,
    piso_primitive,
    piso_transitive,
)

from helpers import TRANSITIVE_SAMPLE, pg, sample_group


def test_from_abstract_iso_c2():
    G = pg(2, "(1 2)")
    assert sorted(piso_from_abstract_iso(G, G, G.generators)) == [(0, 1), (1, 0)]


def test_from_abstract_iso_c3_rotations():
    G = pg(3, "(1 2 3)")
    got = piso_from_abstract_iso(G, G, G.generators)
    assert len(got) == 3 and all(is_perm_isomorphism(G, G, f) for f in got)


def test_from_abstract_iso_rejects_bad_phi():
    G = pg(3, "(1 2 3)")
    with pytest.raises(PhiNotHomomorphism):
        piso_from_abstract_iso(G, G, [from_cycles("(1 2)", 3)])


def test_primitive_c5_and_d5():
    assert len(piso_primitive(sample_group("C5"), sample_group("C5"))) == 20
    assert len(piso_primitive(sample_group("D5"), sample_group("D5"))) == 20


def test_primitive_order_mismatch_is_empty():
    H = pg(5, "(1 2)(3 4)")
    assert piso_primitive(sample_group("C5"), H).is_empty


def test_primitive_rejects_giant_and_imprimitive():
    with pytest.raises(IsGiant):
        piso_primitive(sample_group("A5"), sample_group("A5"))
    with pytest.raises(NotPrimitive):
        piso_primitive(sample_group("C4"), sample_group("C4"))


def _diag_a5():
    a, b = from_cycles("(1 2 3 4 5)", 5), from_cycles("(1 2 3)", 5)
    return PermGroup(10, [a + tuple(5 + x for x in a), b + tuple(5 + x for x in b)])


BLOCKS = [list(range(5)), list(range(5, 10))]


def test_kernel_diagonal_a5():
    K = _diag_a5()
    P = piso_kernel_diagonal(K, K, BLOCKS, BLOCKS, (0, 1))
    assert not P.is_empty and is_perm_isomorphism(K, K, P.representative())
    # (s, s) for any s normalizing A5 conjugates the diagonal to itself
    assert len(P) == 120


def test_kernel_diagonal_class_mismatch_is_empty():
    K = _diag_a5()
    a, b = from_cycles("(1 2 3 4 5)", 5), from_cycles("(1 2 3)", 5)
    full = PermGroup(10, [a + tuple(range(5, 10)), b + tuple(range(5, 10)), tuple(range(5)) + tuple(5 + x for x in a)])
    assert piso_kernel_diagonal(K, full, BLOCKS, BLOCKS, (0, 1)).is_empty


def test_kernel_diagonal_full_product():
    a, b = from_cycles("(1 2 3 4 5)", 5), from_cycles("(1 2 3)", 5)
    full = PermGroup(10, [a + tuple(range(5, 10)), b + tuple(range(5, 10)), tuple(range(5)) + tuple(5 + x for x in a), tuple(range(5)) + tuple(5 + x for x in b)])
    assert len(piso_kernel_diagonal(full, full, BLOCKS, BLOCKS, (0, 1))) == 120 * 120


def _respects(f, sysb, pi):
    return all(sorted(f[x] for x in blk) == list(sysb.blocks[pi[i]]) for i, blk in enumerate(sysb.blocks))


def _s4_on_ordered_pairs():
    pairs = [(a, b) for a in range(4) for b in range(4) if a != b]
    idx = {p: i for i, p in enumerate(pairs)}
    gens = [(1, 2, 3, 0), (1, 0, 2, 3)]
    G = PermGroup(12, [tuple(idx[(g[a], g[b])] for a, b in pairs) for g in gens])
    sysb = BlockSystem.from_blocks([[idx[(a, b)] for b in range(4) if b != a] for a in range(4)])
    return G, sysb


def test_extend_unique_on_ordered_pairs():
    G, sysb = _s4_on_ordered_pairs()
    every = piso_transitive(G, G).elements()
    for pi in [(0, 1, 2, 3), (1, 0, 2, 3)]:
        f = piso_extend_unique(G, G, sysb, sysb, pi)
        want = [p for p in every if _respects(p, sysb, pi)]
        assert want == [f]


def test_extensions_when_stabilizers_coincide():
    G = sample_group("S3reg")
    for B in minimal_blocks_containing(G, 0):
        sysb = block_system_of(G, B)
        if blocks_action(G, sysb)[1].order != 1:
            continue
        pi = tuple(range(len(sysb)))
        with pytest.raises(PreconditionViolated):
            piso_extend_unique(G, G, sysb, sysb, pi)
        got = sorted(piso_extensions_trivial_kernel(G, G, sysb, sysb, pi))
        assert got == [p for p in brute_force_piso(G, G) if _respects(p, sysb, pi)]
        assert len(got) == 2


def test_extend_unique_precondition():
    D4 = sample_group("D4")
    sysb = BlockSystem.from_blocks([[0, 2], [1, 3]])
    with pytest.raises(PreconditionViolated):
        piso_extend_unique(D4, D4, sysb, sysb, (0, 1))


def test_transitive_examples():
    assert len(piso_transitive(sample_group("C4"), sample_group("C4"))) == 8
    assert len(piso_transitive(sample_group("A5"), sample_group("A5"))) == 120
    assert piso_transitive(sample_group("C6"), sample_group("S3reg")).is_empty


def test_transitive_requires_transitive():
    with pytest.raises(NotTransitive):
        piso_transitive(pg(4, "(1 2)"), pg(4, "(1 2)"))


@pytest.mark.parametrize("name", sorted(TRANSITIVE_SAMPLE))
def test_self_piso_matches_oracle(name):
    G = sample_group(name)
    st = PisoStats()
    P = piso_transitive(G, G, st)
    got = P.elements()
    assert got == brute_force_piso(G, G)
    assert all(is_perm_isomorphism(G, G, f) for f in itertools.islice(got, 50))
