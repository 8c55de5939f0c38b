"""Brute-force reference implementations.

Each oracle refuses inputs beyond its budget instead of running unbounded.
None of these are called from the production code paths.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
from .gen_enum import first_isomorphism
from .group_core import CayleyGroup, is_isomorphism
from .perm_core import Perm, PermGroup, is_perm_isomorphism, mul


@dataclass(frozen=True)
class OracleBudget:
    max_group_order: int = 7200
    max_degree: int = 6
    max_candidates: int = 10_000_000
    max_code_length: int = 8


DEFAULT_BUDGET = OracleBudget()


def brute_force_group_iso(G: CayleyGroup, H: CayleyGroup, budget: OracleBudget = DEFAULT_BUDGET) -> np.ndarray | None:
    """An isomorphism G -> H by generator enumeration, or None."""
    if G.n != H.n:
        return None
    if G.n > budget.max_group_order:
        raise BudgetExceeded(f"group order {G.n} exceeds {budget.max_group_order}")
    f = first_isomorphism(G, H)
    if f is not None and not is_isomorphism(G, H, f):
        raise AssertionError("oracle witness failed verification")
    return f


def brute_force_coset_intersection(
    G: PermGroup, x: Perm, H: PermGroup, y: Perm, budget: OracleBudget = DEFAULT_BUDGET
) -> set[Perm]:
    if G.degree > budget.max_degree:
        raise BudgetExceeded(f"degree {G.degree} exceeds {budget.max_degree}")
    left = {mul(g, tuple(x)) for g in G.elements()}
    return {mul(h, tuple(y)) for h in H.elements()} & left


def brute_force_piso(G: PermGroup, H: PermGroup, budget: OracleBudget = DEFAULT_BUDGET) -> list[Perm]:
    m = G.degree
    if m > budget.max_degree + 2:
        raise BudgetExceeded(f"degree {m} too large for the exhaustive filter")
    return sorted(f for f in itertools.permutations(range(m)) if is_perm_isomorphism(G, H, f))


def brute_force_twisted_eq(inst, budget: OracleBudget = DEFAULT_BUDGET) -> set[Perm]:
    """Every encoded twisted equivalence mapping code A onto code B."""
    twists = inst.twist_perms
    count = 1
    for k, tw in zip(inst.lengths, twists):
        count *= math.factorial(k) * len(tw) ** k
    if count > budget.max_candidates:
        raise BudgetExceeded(f"{count} candidates exceed {budget.max_candidates}")
    m = inst.m
    out = set()
    if len(inst.code_a) != len(inst.code_b):
        return out
    pos_by_cls = [[p for p in range(m) if inst.cls[p] == c] for c in range(len(inst.lengths))]
    perms_per_cls = [list(itertools.permutations(ps)) for ps in pos_by_cls]
    for choice in itertools.product(*perms_per_cls):
        pi = [0] * m
        for ps, img in zip(pos_by_cls, choice):
            for p, q in zip(ps, img):
                pi[p] = q
        tw_choices = [twists[inst.cls[q]] for q in range(m)]
        for tw in itertools.product(*tw_choices):
            psi = inst.encode(pi, tw)
            if all(inst.apply(psi, s) in inst.code_b for s in inst.code_a):
                out.add(psi)
    return out


def brute_force_code_equivalence(C, C2, budget: OracleBudget = DEFAULT_BUDGET) -> tuple[int, ...] | None:
    """The lexicographically first column permutation alpha with C alpha = C2."""
    if C.N != C2.N:
        return None
    if C.N > budget.max_code_length:
        raise BudgetExceeded(f"code length {C.N} exceeds {budget.max_code_length}")
    if C.k != C2.k:
        return None
    target = C2.codewords
    for alpha in itertools.permutations(range(C.N)):
        if C.permuted(alpha) == target:
            return alpha
    return None


def all_blocks(G: PermGroup) -> list[frozenset[int]]:
    """Every block of a transitive G containing point 0, by subset scan."""
    m = G.degree
    els = list(G.elements())
    out = []
    for r in range(1, m + 1):
        if m % r:
            continue
        for rest in itertools.combinations(range(1, m), r - 1):
            B = frozenset((0,) + rest)
            if all(len({g[x] for x in B} & B) in (0, len(B)) for g in els):
                out.append(B)
    return out


def brute_force_structure_trees(G: PermGroup) -> list[tuple[tuple[frozenset[int], ...], ...]]:
    """Maximal chains of block systems, each as a tuple of layers (sorted block lists)."""
    m = G.degree
    if m > 8:
        raise BudgetExceeded("degree too large for the subset scan")
    systems = []
    for B in all_blocks(G):
        blocks = {frozenset(g[x] for x in B) for g in G.elements()}
        systems.append(tuple(sorted(blocks, key=lambda b: (min(b), sorted(b)))))

    def refines(fine, coarse) -> bool:
        return all(any(b <= c for c in coarse) for b in fine)

    size = {s: len(s[0]) for s in systems}
    top = [s for s in systems if size[s] == m]
    chains = []

    def extend(chain):
        cur = chain[-1]
        below = [s for s in systems if size[s] < size[cur] and refines(s, cur)]
        if not below:
            chains.append(tuple(chain))
            return
        # covering systems only: nothing strictly between
        for s in below:
            if not any(size[s] < size[t] < size[cur] and refines(s, t) and refines(t, cur) for t in below):
                extend(chain + [s])

    for t in top:
        extend([t])
    return sorted(chains, key=lambda c: (len(c) - 1, c))
