"""Socle, simple factors, minimal normal subgroups and PKer of Fitting-free groups.

Minimal normal subgroups are the minimal normal closures ncl(x); in a
Fitting-free group each is a power T^k of a non-Abelian simple group T, and
its simple factors are the smallest normal closures of elements inside it.
The conjugation embedding G* records how every element acts on the
nonidentity elements of the simple factors.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CentralizerNontrivial, InvariantViolation, NotFittingFree
from .group_core import (
    CayleyGroup,
    Subset,
    generated,
    is_abelian_subset,
    normal_closure_with_generators,
    small_generating_set,
)
from .parallel import pmap
from .perm_core import PermGroup

MAX_FACTORS = 20


def _class_reps(G: CayleyGroup) -> list[int]:
    return [int(c[0]) for c in G.conjugacy_classes if c[0] != 0]


_CLOSURES: "weakref.WeakKeyDictionary[CayleyGroup, list[tuple[Subset, bool]]]" = weakref.WeakKeyDictionary()


def _closures_marked(G: CayleyGroup, threads: int = 1) -> list[tuple[Subset, bool]]:
    """Distinct normal closures of nonidentity elements, each with an abelian flag."""
    if G not in _CLOSURES:
        found = pmap(lambda x: normal_closure_with_generators(G, x), _class_reps(G), threads)
        out: dict[bytes, tuple[Subset, bool]] = {}
        for S, gens in found:
            key = S.mask.tobytes()
            if key not in out:
                out[key] = (S, is_abelian_subset(G, np.array(gens)))
        _CLOSURES[G] = list(out.values())
    return _CLOSURES[G]


def _closures(G: CayleyGroup, threads: int = 1) -> list[Subset]:
    return [S for S, _ in _closures_marked(G, threads)]


def is_fitting_free(G: CayleyGroup, threads: int = 1) -> bool:
    """No nontrivial Abelian normal subgroup; ncl(x) of one element per class suffices."""
    if G.n == 1:
        return True
    return not any(ab for _, ab in _closures_marked(G, threads))


@dataclass
class SocleDecomposition:
    group: CayleyGroup
    socle: Subset
    factors: list[Subset]
    minimal_normals: list[list[int]]  # factor indices per minimal normal subgroup
    pker: Subset
    factor_perm_action: PermGroup
    factor_action: np.ndarray  # n x k: factor_action[g, j] = index of g V_j g^-1

    @property
    def k(self) -> int:
        return len(self.factors)

    @cached_property
    def factor_of(self) -> np.ndarray:
        """Factor index of each element lying in a single factor (identity and others: -1)."""
        out = np.full(self.group.n, -1, dtype=np.int64)
        for j, V in enumerate(self.factors):
            el = V.elements
            out[el[el != 0]] = j
        return out

    @cached_property
    def weights(self) -> np.ndarray:
        """wt(x) for every element; -1 stands for infinity."""
        G = self.group
        t = G.table
        x = np.arange(G.n)
        w = np.zeros(G.n, dtype=np.int64)
        for V in self.factors:
            gens = small_generating_set(G, V.elements)
            nontrivial = np.zeros(G.n, dtype=bool)
            for a in gens:
                nontrivial |= t[x, a] != t[a, x]
            w += nontrivial
        w[~self.socle.mask] = -1
        return w

    def weight(self, x: int) -> float:
        w = int(self.weights[x])
        return math.inf if w < 0 else w


def minimal_normal_subgroups(G: CayleyGroup, threads: int = 1) -> list[Subset]:
    closures = _closures(G, threads)
    out = []
    for S in closures:
        if not any(T.count < S.count and T.issubset(S) for T in closures):
            out.append(S)
    return sorted(out, key=lambda S: int(S.elements[1]))


def _factors_of(G: CayleyGroup, N: Subset) -> list[Subset]:
    """Simple factors of a minimal normal N = T^k: G-conjugates of a smallest ncl_N(x)."""
    t, inv = G.table, G.inverse
    nel = N.elements
    best: Subset | None = None
    reps = [int(c[0]) for c in G.conjugacy_classes if c[0] != 0 and N.mask[c[0]]]
    ngens = small_generating_set(G, nel)
    for x in reps:
        S, _ = normal_closure_with_generators(G, x, ngens)
        if best is None or S.count < best.count:
            best = S
    assert best is not None
    found = {best.mask.tobytes(): best}
    frontier = [best]
    gens = G.generators
    while frontier:
        nxt = []
        for V in frontier:
            for g in gens:
                img = t[t[inv[g], V.elements], g]
                S = Subset.of(G.n, img)
                if S.mask.tobytes() not in found:
                    found[S.mask.tobytes()] = S
                    nxt.append(S)
        frontier = nxt
    return list(found.values())


def decompose_socle(G: CayleyGroup, threads: int = 1) -> SocleDecomposition:
    if G.n == 1 or not is_fitting_free(G, threads):
        raise NotFittingFree("group has a nontrivial Abelian normal subgroup" if G.n > 1 else "trivial group")
    mins = minimal_normal_subgroups(G, threads)
    factors: list[Subset] = []
    owner: list[int] = []
    for i, N in enumerate(mins):
        for V in _factors_of(G, N):
            factors.append(V)
            owner.append(i)
    order = sorted(range(len(factors)), key=lambda j: int(factors[j].elements[1]))
    factors = [factors[j] for j in order]
    owner = [owner[j] for j in order]
    k = len(factors)
    if k > MAX_FACTORS:
        raise InvariantViolation(f"{k} simple factors exceed the cap {MAX_FACTORS}")
    minimal_normals = [[j for j in range(k) if owner[j] == i] for i in range(len(mins))]
    minimal_normals.sort(key=lambda js: js[0])
    socle_mask = np.zeros(G.n, dtype=bool)
    for N in mins:
        socle_mask |= N.mask
    socle = Subset.of(G.n, generated(G, np.flatnonzero(socle_mask)))
    size = 1
    for V in factors:
        size *= V.count
    if size != socle.count:
        raise InvariantViolation("socle is not the direct product of the factors")
    # conjugation action on factors: g V_j g^-1 contains g r_j g^-1
    factor_of = np.full(G.n, -1, dtype=np.int64)
    for j, V in enumerate(factors):
        el = V.elements
        factor_of[el[el != 0]] = j
    t, inv = G.table, G.inverse
    g = np.arange(G.n)
    act = np.empty((G.n, k), dtype=np.int64)
    for j, V in enumerate(factors):
        r = int(V.elements[1])
        act[:, j] = factor_of[t[t[g, r], inv[g]]]
    if (act < 0).any():
        raise InvariantViolation("factors are not permuted by conjugation")
    pker = Subset((act == np.arange(k)).all(axis=1))
    gens = G.generators
    star = PermGroup(k, [tuple(int(v) for v in act[x]) for x in gens], check=False)
    if star.order * pker.count != G.n:
        raise InvariantViolation("|G*| |PKer| != |G|")
    return SocleDecomposition(G, socle, factors, minimal_normals, pker, star, act)


def weight(dec: SocleDecomposition, x: int) -> float:
    return dec.weight(x)


# --------------------------------------------------------------------------
# conjugation embedding


@dataclass
class ConjugationEmbedding:
    """Action of every element on the nonidentity elements of a set of factors.

    points are sorted element indices; restrictions[g] is the permutation of
    local point indices induced by x -> g^-1 x g.
    """

    group: CayleyGroup
    factor_ids: list[int]
    points: np.ndarray
    local: np.ndarray  # element index -> local point index, -1 off points
    restrictions: np.ndarray  # n x d
    generators: list[int]

    @property
    def degree(self) -> int:
        return len(self.points)

    @cached_property
    def perm_group(self) -> PermGroup:
        return PermGroup(self.degree, [tuple(int(v) for v in self.restrictions[g]) for g in self.generators], check=False)

    def restriction(self, g: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.restrictions[g])


def embed_via_conjugation(
    G: CayleyGroup, dec: SocleDecomposition, factor_ids: list[int] | None = None, check_faithful: bool = True
) -> ConjugationEmbedding:
    if factor_ids is None:
        factor_ids = list(range(dec.k))
    pts = np.unique(np.concatenate([dec.factors[j].elements for j in factor_ids]))
    pts = pts[pts != 0]
    local = np.full(G.n, -1, dtype=np.int64)
    local[pts] = np.arange(len(pts))
    t, inv = G.table, G.inverse
    g = np.arange(G.n)[:, None]
    img = t[t[inv[g], pts[None, :]], g]
    R = local[img]
    if (R < 0).any():
        raise InvariantViolation("factor set is not normalized")
    if check_faithful and factor_ids == list(range(dec.k)):
        if np.unique(R, axis=0).shape[0] != G.n:
            raise CentralizerNontrivial("the centralizer of the socle is nontrivial")
    return ConjugationEmbedding(G, list(factor_ids), pts, local, R, G.generators)
