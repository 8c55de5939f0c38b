from __future__ import annotations

import numpy as np
import pytest

from fitfree.catalog import catalog_group, cyclic
from fitfree.code_reduction import BinaryCode
from fitfree.errors import BudgetExceeded
from fitfree.group_core import group_from_permutations, is_isomorphism
from fitfree.oracle import (
    OracleBudget,
    brute_force_code_equivalence,
    brute_force_coset_intersection,
    brute_force_group_iso,
    brute_force_piso,
    brute_force_twisted_eq,
)
from fitfree.perm_core import from_cycles, identity
from fitfree.twisted_codeq import TwistedCodeInstance

from helpers import pg


def test_group_iso_examples():
    A5 = catalog_group("A5")
    f = brute_force_group_iso(A5, A5)
    assert np.array_equal(f, np.arange(60))
    assert brute_force_group_iso(catalog_group("S6"), catalog_group("PGL(2,9)")) is None
    assert brute_force_group_iso(cyclic(4), cyclic(5)) is None


def test_group_iso_is_deterministic():
    G, H = catalog_group("S5"), catalog_group("S5")
    a, b = brute_force_group_iso(G, H), brute_force_group_iso(G, H)
    assert np.array_equal(a, b) and is_isomorphism(G, H, a)


def test_coset_examples():
    G = pg(4, "(1 2 3 4)", "(1 2)")
    x = from_cycles("(1 3)", 4)
    assert len(brute_force_coset_intersection(G, x, G, x)) == 24
    C3 = pg(3, "(1 2 3)")
    assert brute_force_coset_intersection(C3, from_cycles("(1 2)", 3), C3, identity(3)) == set()
    A4 = pg(4, "(1 2 3)", "(2 3 4)")
    S3 = pg(4, "(1 2 3)", "(1 2)")
    assert len(brute_force_coset_intersection(A4, identity(4), S3, identity(4))) == 3


def _inst(groups_gens, A, B):
    G, E = group_from_permutations(groups_gens, 2)
    return TwistedCodeInstance([2], [2], [G], [E], A, B)


def test_twisted_examples():
    assert brute_force_twisted_eq(_inst([], [(0, 1)], [(0, 1)])) == {identity(4)}
    assert brute_force_twisted_eq(_inst([(1, 0)], [(0, 0), (1, 1)], [(0, 1), (1, 0)]))
    assert brute_force_twisted_eq(_inst([], [(0, 0), (1, 1)], [(0, 1)])) == set()


def test_code_equivalence_examples():
    def code(N, *rows):
        return BinaryCode(N, np.array(rows, dtype=np.uint8).reshape(len(rows), N))

    assert brute_force_code_equivalence(code(2, [1, 1]), code(2, [1, 1])) == (0, 1)
    assert brute_force_code_equivalence(code(2, [1, 0]), code(2, [0, 1])) == (1, 0)
    assert brute_force_code_equivalence(code(2, [1, 1]), code(2, [1, 0])) is None


def test_piso_witnesses_verify():
    C4 = pg(4, "(1 2 3 4)")
    out = brute_force_piso(C4, C4)
    assert len(out) == 8 and out == sorted(out)


def test_budget_enforced():
    S6 = pg(6, "(1 2 3 4 5 6)", "(1 2)")
    with pytest.raises(BudgetExceeded):
        brute_force_piso(S6, S6, OracleBudget(max_degree=3))
