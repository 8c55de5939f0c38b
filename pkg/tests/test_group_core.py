from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fitfree.catalog import catalog_group, cyclic, small_groups
from fitfree.errors import NoIdentityAtOne, NotAssociative, NotLatinSquare, PartsNotPermuted, ValidationFailed
from fitfree.group_core import (
    Subset,
    conjugation_action,
    direct_product,
    extend_homomorphism,
    group_from_permutations,
    is_isomorphism,
    is_normal,
    normal_closure_elements,
    random_relabel,
    subgroup_closure,
    validate_cayley,
)
from fitfree.gen_enum import first_isomorphism
from fitfree.perm_core import mul


def test_validate_c2():
    G = validate_cayley([[1, 2], [2, 1]])
    assert G.n == 2 and G.inv(1) == 1 and G.is_abelian()


def test_validate_rejects_non_latin():
    with pytest.raises(NotLatinSquare):
        validate_cayley([[1, 2], [2, 2]])


def test_validate_rejects_identity_elsewhere():
    with pytest.raises(NoIdentityAtOne):
        validate_cayley([[2, 1], [1, 2]])


def test_validate_rejects_out_of_range():
    with pytest.raises(ValidationFailed):
        validate_cayley([[1, 3], [3, 1]])


def test_validate_rejects_nonassociative():
    # latin square with identity 1 that is not a group (order 5 loop)
    t = [
        [1, 2, 3, 4, 5],
        [2, 1, 4, 5, 3],
        [3, 5, 1, 2, 4],
        [4, 3, 5, 1, 2],
        [5, 4, 2, 3, 1],
    ]
    with pytest.raises(NotAssociative):
        validate_cayley(t, check_assoc=True)


def test_subgroup_closure_in_c6():
    G = cyclic(6)
    assert sorted(subgroup_closure(G, [2]).elements.tolist()) == [0, 2, 4]
    assert subgroup_closure(G, [1]).count == 6


def test_normal_closure_transposition_in_s3():
    S3 = next(G for G in small_groups(6) if G.name == "S3")
    inv = [x for x in range(6) if x and S3.order_of(x) == 2]
    N = normal_closure_elements(S3, inv[0])
    assert N.count == 6 and is_normal(S3, N)


def test_normal_closure_of_three_cycle_in_s3():
    S3 = next(G for G in small_groups(6) if G.name == "S3")
    c = next(x for x in range(6) if S3.order_of(x) == 3)
    N = normal_closure_elements(S3, c)
    assert N.count == 3 and is_normal(S3, N)


def test_conjugation_action_permutes_factors():
    G = catalog_group("A5xA5")
    n = 60
    left = Subset.of(G.n, [a * n for a in range(n)])
    right = Subset.of(G.n, list(range(n)))
    act = conjugation_action(G, G.all(), [left, right])
    assert set(act.values()) == {(0, 1)}


def test_conjugation_action_rejects_non_parts():
    G = cyclic(4)
    with pytest.raises(PartsNotPermuted):
        conjugation_action(G, G.all(), [Subset.of(4, [0, 1]), Subset.of(4, [0, 1])])


def test_group_from_permutations_s3():
    G, E = group_from_permutations([(1, 2, 0), (1, 0, 2)], 3)
    assert G.n == 6 and tuple(E[0]) == (0, 1, 2)
    for a in range(6):
        for b in range(6):
            assert tuple(E[G.mul(a, b)]) == mul(tuple(E[a]), tuple(E[b]))


def test_direct_product_order():
    P = direct_product(cyclic(2), cyclic(3))
    assert P.n == 6 and P.is_abelian()
    f = first_isomorphism(P, cyclic(6))
    assert f is not None and is_isomorphism(P, cyclic(6), f)


def test_extend_homomorphism_rejects_bad_images():
    C4 = cyclic(4)
    assert extend_homomorphism(C4, [1], C4, [1]) is not None
    assert extend_homomorphism(cyclic(3), [1], cyclic(2), [1]) is None


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 23), st.integers(0, 2**32 - 1))
def test_relabel_gives_isomorphism(i, seed):
    G = small_groups(12)[i]
    H, sigma = random_relabel(G, np.random.default_rng(seed))
    assert is_isomorphism(G, H, sigma)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 23))
def test_inverse_and_identity(i):
    G = small_groups(12)[i]
    for x in range(G.n):
        assert G.mul(x, G.inv(x)) == 0 and G.mul(0, x) == x
