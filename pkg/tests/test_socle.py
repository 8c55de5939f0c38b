from __future__ import annotations

import math

import numpy as np
import pytest

from fitfree.catalog import catalog_group, small_groups
from fitfree.errors import NotFittingFree
from fitfree.group_core import normal_closure_elements
from fitfree.socle import decompose_socle, embed_via_conjugation, is_fitting_free, minimal_normal_subgroups


def test_fitting_free_examples():
    S3 = next(G for G in small_groups(6) if G.name == "S3")
    assert not is_fitting_free(S3)
    assert is_fitting_free(catalog_group("A5"))
    assert is_fitting_free(catalog_group("S6"))


def test_small_groups_are_not_fitting_free():
    assert not any(is_fitting_free(G) for G in small_groups(12) if G.n > 1)


def test_decompose_a5():
    d = decompose_socle(catalog_group("A5"))
    assert d.socle.count == 60 and d.k == 1 and d.pker.count == 60
    assert d.factor_perm_action.order == 1


def test_decompose_s5():
    d = decompose_socle(catalog_group("S5"))
    assert d.socle.count == 60 and d.k == 1 and d.pker.count == 120


def test_decompose_a5xa5():
    G = catalog_group("A5xA5")
    d = decompose_socle(G)
    assert d.k == 2 and d.socle.count == 3600 and d.pker.count == 3600
    assert len(d.minimal_normals) == 2


def test_decompose_rejects_solvable():
    with pytest.raises(NotFittingFree):
        decompose_socle(small_groups(6)[2])


def test_weights():
    G = catalog_group("A5xA5")
    d = decompose_socle(G)
    assert d.weight(0) == 0
    one = d.factors[0].elements[1]
    assert d.weight(one) == 1
    S5 = catalog_group("S5")
    ds = decompose_socle(S5)
    odd = [x for x in range(S5.n) if not ds.socle.mask[x]]
    assert odd and all(ds.weight(x) == math.inf for x in odd)


@pytest.mark.parametrize("name", ["A5", "S5", "A5xA5", "S6", "PSL(2,7)"])
def test_socle_invariants(name):
    G = catalog_group(name)
    d = decompose_socle(G)
    assert math.prod(V.count for V in d.factors) == d.socle.count
    t = G.table
    for i, V in enumerate(d.factors):
        for W in d.factors[i + 1:]:
            a, b = V.elements, W.elements
            assert np.array_equal(t[np.ix_(a, b)], t[np.ix_(b, a)].T)
    assert d.pker.mask[d.socle.mask].all()
    assert d.factor_perm_action.order * d.pker.count == G.n
    mins = minimal_normal_subgroups(G)
    union = np.zeros(G.n, dtype=bool)
    for N in mins:
        union |= N.mask
    assert union.sum() <= d.socle.count and d.socle.mask[union].all()


def test_weight_conjugation_invariant():
    G = catalog_group("A5xA5")
    d = decompose_socle(G)
    rng = np.random.default_rng(4)
    for _ in range(100):
        g, x = rng.integers(G.n, size=2)
        assert d.weight(G.conj(int(x), int(g))) == d.weight(int(x))


def test_embedding_counts():
    for name, size in (("A5", 60), ("S5", 120)):
        G = catalog_group(name)
        E = embed_via_conjugation(G, decompose_socle(G))
        assert np.unique(E.restrictions, axis=0).shape[0] == size
        assert E.perm_group.order == size


def test_normal_closure_of_socle_element():
    G = catalog_group("S5")
    d = decompose_socle(G)
    x = int(d.socle.elements[1])
    assert normal_closure_elements(G, x).count == 60
