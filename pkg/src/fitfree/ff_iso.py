"""Isomorphism of Fitting-free groups given by Cayley tables.

A Fitting-free group acts faithfully by conjugation on its socle, so an
isomorphism G -> H is the same thing as a socle isomorphism c that conjugates
the embedded copy G* onto H*.  Socle isomorphisms are parametrized by a
permutation of simple factors together with one isomorphism of the reference
simple group per factor (a diagonal product).  One minimal normal subgroup is
handled directly; several are reduced to twisted code equivalence, with one
position per minimal normal subgroup and letters given by the induced
automorphisms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    ChiNotIsomorphism,
    GNotFittingFree,
    InvariantViolation,
    NotUniqueMinimalNormal,
    SocleMismatch,
)
from .gen_enum import all_isomorphisms, first_isomorphism
from .group_core import CayleyGroup, group_from_table, is_isomorphism, small_generating_set
from .perm_core import Perm, PermGroup, conj, inv
from .piso import piso_transitive
from .socle import ConjugationEmbedding, SocleDecomposition, decompose_socle, embed_via_conjugation, is_fitting_free
from .twisted_codeq import DPStats, TwistedCodeInstance, iter_group_code_equivalences, solve_twisted_codeq

CONJUGATOR_BUDGET = 5_000_000


@dataclass
class IsoStats:
    diag_counts: list[int] = field(default_factory=list)
    diag_bound: int = 0
    conjugator_checks: int = 0

    @property
    def bound_respected(self) -> bool:
        return all(c <= self.diag_bound for c in self.diag_counts)


@dataclass
class IsoSetReport:
    isomorphic: bool
    witness: np.ndarray | None = None
    reason: str = ""
    trail: dict = field(default_factory=dict)
    stats: IsoStats = field(default_factory=IsoStats)

    def to_dict(self) -> dict:
        out = {"isomorphic": self.isomorphic, "reason": self.reason, "trail": self.trail}
        out["diagonal_counts"] = list(self.stats.diag_counts)
        out["diagonal_bound"] = self.stats.diag_bound
        if self.witness is not None:
            out["witness"] = [int(v) + 1 for v in self.witness]
        return out


# --------------------------------------------------------------------------
# frames: one minimal normal subgroup seen through conjugation


def _subgroup_cayley(G: CayleyGroup, elements: np.ndarray) -> CayleyGroup:
    el = np.asarray(elements, dtype=np.int64)
    sub = G.table[np.ix_(el, el)]
    return group_from_table(np.searchsorted(el, sub), check_assoc=False)


@dataclass
class Frame:
    """A minimal normal subgroup N = V_0 x ... x V_{k-1} with the action of G on it."""

    group: CayleyGroup
    emb: ConjugationEmbedding
    T: CayleyGroup  # V_0 relabeled by its sorted element list
    T_elems: np.ndarray
    phi: np.ndarray  # k x |T|: phi[j, t] = element of V_j, an isomorphism T -> V_j
    pt_table: np.ndarray  # k x |T|: local point index of phi[j, t]; -1 at t = 0
    pt_factor: np.ndarray
    pt_tloc: np.ndarray
    P: PermGroup  # action of G on the k factors

    @property
    def k(self) -> int:
        return self.phi.shape[0]

    @cached_property
    def row_index(self) -> dict[bytes, int]:
        R = self.emb.restrictions
        out: dict[bytes, int] = {}
        for g in range(R.shape[0]):
            out.setdefault(R[g].tobytes(), g)
        return out


def build_frame(G: CayleyGroup, dec: SocleDecomposition, which: int) -> Frame:
    fids = dec.minimal_normals[which]
    emb = embed_via_conjugation(G, dec, fids)
    T_elems = dec.factors[fids[0]].elements.astype(np.int64)
    T = _subgroup_cayley(G, T_elems)
    t, inv_ = G.table, G.inverse
    k = len(fids)
    phi = np.empty((k, len(T_elems)), dtype=np.int64)
    for j, f in enumerate(fids):
        # g with g^-1 V_0 g = V_j, i.e. g V_j g^-1 = V_0
        g = int(np.flatnonzero(dec.factor_action[:, f] == fids[0])[0])
        phi[j] = t[t[inv_[g], T_elems], g]
    pt_table = emb.local[phi]
    d = emb.degree
    pt_factor = np.empty(d, dtype=np.int64)
    pt_tloc = np.empty(d, dtype=np.int64)
    jj, tt = np.nonzero(pt_table >= 0)
    pt_factor[pt_table[jj, tt]] = jj
    pt_tloc[pt_table[jj, tt]] = tt
    first = pt_table[:, 1]
    P = PermGroup(k, [tuple(int(pt_factor[r[first[j]]]) for j in range(k)) for r in emb.perm_group.generators], check=False)
    return Frame(G, emb, T, T_elems, phi, pt_table, pt_factor, pt_tloc, P)


def _iso_key(X: Frame, Y: Frame) -> tuple[int, int]:
    return (id(X.T), id(Y.T))


class IsoCache:
    """All isomorphisms between reference simple groups, per pair of frames."""

    def __init__(self):
        self._data: dict[tuple[int, int], np.ndarray] = {}

    def get(self, X: Frame, Y: Frame) -> np.ndarray:
        key = _iso_key(X, Y)
        if key not in self._data:
            if X.T.n != Y.T.n:
                self._data[key] = np.zeros((0, X.T.n), dtype=np.int64)
            else:
                self._data[key] = all_isomorphisms(X.T, Y.T)
        return self._data[key]


def socle_conjugators(
    X: Frame,
    Y: Frame,
    isos: np.ndarray,
    stats: IsoStats | None = None,
    first_only: bool = False,
) -> Iterator[Perm]:
    """Socle isomorphisms c: F(X) -> F(Y) with c^-1 X* c = Y*, in a fixed order.

    c sends factor j to factor pi(j) by phi^Y_{pi j} a_{pi j} (phi^X_j)^-1
    where pi runs over PISO of the factor actions and a over isomorphisms of
    the reference simple groups.
    """
    if X.k != Y.k or X.T.n != Y.T.n or len(isos) == 0:
        return
    A, B = X.emb.perm_group, Y.emb.perm_group
    if A.order != B.order or X.emb.degree != Y.emb.degree:
        return
    k = X.k
    count = len(isos) ** k
    if stats is not None:
        stats.diag_counts.append(count)
        if stats.diag_bound and count > stats.diag_bound:
            raise InvariantViolation(f"|D| = {count} exceeds |H|^2 = {stats.diag_bound}")
    if k == 1:
        pis = [(0,)]
    else:
        pis = piso_transitive(X.P, Y.P).elements()
    if len(pis) * count > CONJUGATOR_BUDGET:
        raise BudgetExceeded(f"{len(pis) * count} socle isomorphism candidates")
    gens = A.generators
    for pi in pis:
        tgt = np.asarray(pi, dtype=np.int64)[X.pt_factor]
        for choice in itertools.product(range(len(isos)), repeat=k):
            ch = np.asarray(choice, dtype=np.int64)
            c = Y.pt_table[tgt, isos[ch[tgt], X.pt_tloc]]
            cp = tuple(int(v) for v in c)
            if stats is not None:
                stats.conjugator_checks += 1
            if all(conj(r, cp) in B for r in gens):
                yield cp
                if first_only:
                    return


def _transport_rows(R: np.ndarray, c: np.ndarray) -> np.ndarray:
    """conj(r, c) for every row r."""
    out = np.empty_like(R)
    out[:, c] = c[R]
    return out


def lift_conjugator(X: Frame, Y: Frame, c: Sequence[int]) -> np.ndarray | None:
    """The bijection G -> H with f(g)* = c^-1 g* c, if every image exists."""
    c = np.asarray(c, dtype=np.int64)
    rows = _transport_rows(X.emb.restrictions, c)
    idx = Y.row_index
    f = np.empty(rows.shape[0], dtype=np.int64)
    for g in range(rows.shape[0]):
        h = idx.get(rows[g].tobytes())
        if h is None:
            return None
        f[g] = h
    return f


# --------------------------------------------------------------------------
# diagonal products


@dataclass
class DiagonalProduct:
    """Isomorphisms phi_j: T_{class(j)} -> V_j for every simple factor V_j."""

    references: list[int]  # factor index of the reference copy of each class
    factor_class: list[int]
    maps: list[np.ndarray]  # maps[j][t] = element of V_j for reference-local index t

    def is_valid(self, G: CayleyGroup, dec: SocleDecomposition) -> bool:
        for j, f in enumerate(self.maps):
            V = set(int(x) for x in dec.factors[j].elements)
            if set(int(x) for x in f) != V:
                return False
            T = _subgroup_cayley(G, dec.factors[self.references[self.factor_class[j]]].elements)
            if not np.array_equal(f[T.table.astype(np.int64)], G.table[np.ix_(f, f)]):
                return False
        return True


def _factor_classes(G: CayleyGroup, dec: SocleDecomposition) -> tuple[list[int], list[int], list[np.ndarray]]:
    """Isomorphism classes of simple factors with a base isomorphism from each reference."""
    refs: list[int] = []
    cls: list[int] = []
    base: list[np.ndarray] = []
    cay = [_subgroup_cayley(G, V.elements) for V in dec.factors]
    for j, V in enumerate(dec.factors):
        for i, r in enumerate(refs):
            f = first_isomorphism(cay[r], cay[j])
            if f is not None:
                cls.append(i)
                base.append(V.elements[f])
                break
        else:
            refs.append(j)
            cls.append(len(refs) - 1)
            base.append(V.elements.astype(np.int64))
    return refs, cls, base


def diagonal_product_count(G: CayleyGroup, dec: SocleDecomposition) -> int:
    refs, cls, _ = _factor_classes(G, dec)
    total = 1
    for i, r in enumerate(refs):
        T = _subgroup_cayley(G, dec.factors[r].elements)
        total *= len(all_isomorphisms(T, T)) ** cls.count(i)
    return total


def enumerate_diagonal_products(G: CayleyGroup, dec: SocleDecomposition) -> Iterator[DiagonalProduct]:
    """Every diagonal product: base isomorphisms composed with automorphisms, per factor."""
    refs, cls, base = _factor_classes(G, dec)
    auts = []
    for r in refs:
        T = _subgroup_cayley(G, dec.factors[r].elements)
        auts.append(all_isomorphisms(T, T))
    for choice in itertools.product(*[range(len(auts[cls[j]])) for j in range(dec.k)]):
        maps = [base[j][auts[cls[j]][a]] for j, a in enumerate(choice)]
        yield DiagonalProduct(refs, cls, maps)


# --------------------------------------------------------------------------
# extension of socle isomorphisms


def extend_socle_iso(
    G: CayleyGroup, H: CayleyGroup, decG: SocleDecomposition, decH: SocleDecomposition, chi
) -> np.ndarray | None:
    """The unique isomorphism G -> H restricting to chi on the socle, if any.

    chi maps every socle element of G (given as an array over all elements,
    entries off the socle ignored, or as a dict) to H.
    """
    soc = decG.socle.elements
    if isinstance(chi, dict):
        arr = np.full(G.n, -1, dtype=np.int64)
        for a, b in chi.items():
            arr[int(a)] = int(b)
        chi = arr
    chi = np.asarray(chi, dtype=np.int64)
    img = chi[soc]
    if G.n != H.n or decG.socle.count != decH.socle.count:
        raise ChiNotIsomorphism("socles have different orders")
    if (img < 0).any() or np.unique(img).size != soc.size or not decH.socle.mask[img].all():
        raise ChiNotIsomorphism("chi is not a bijection of socles")
    for a in small_generating_set(G, soc):
        if not np.array_equal(chi[G.table[soc, a]], H.table[img, chi[a]]):
            raise ChiNotIsomorphism("chi is not a homomorphism")
    EG = embed_via_conjugation(G, decG)
    EH = embed_via_conjugation(H, decH)
    c = EH.local[chi[EG.points]]
    if (c < 0).any():
        return None
    rows = _transport_rows(EG.restrictions, c)
    index = {EH.restrictions[h].tobytes(): h for h in range(H.n)}
    f = np.empty(G.n, dtype=np.int64)
    for g in range(G.n):
        h = index.get(rows[g].tobytes())
        if h is None:
            return None
        f[g] = h
    return f if is_isomorphism(G, H, f) else None


# --------------------------------------------------------------------------
# one minimal normal subgroup


def _prepare(G: CayleyGroup, H: CayleyGroup, threads: int):
    decG = decompose_socle(G, threads)
    decH = decompose_socle(H, threads)
    return decG, decH


def iso_unique_min_normal(
    G: CayleyGroup,
    H: CayleyGroup,
    decG: SocleDecomposition | None = None,
    decH: SocleDecomposition | None = None,
    threads: int = 1,
    stats: IsoStats | None = None,
) -> IsoSetReport:
    stats = stats if stats is not None else IsoStats()
    stats.diag_bound = H.n**2
    if decG is None:
        decG = decompose_socle(G, threads)
    if decH is None:
        decH = decompose_socle(H, threads)
    if len(decG.minimal_normals) != 1 or len(decH.minimal_normals) != 1:
        raise NotUniqueMinimalNormal("both groups need exactly one minimal normal subgroup")
    if G.n != H.n:
        return IsoSetReport(False, reason="order mismatch", stats=stats)
    X, Y = build_frame(G, decG, 0), build_frame(H, decH, 0)
    if X.k != Y.k or X.T.n != Y.T.n:
        return IsoSetReport(False, reason="socle factor multiset mismatch", stats=stats)
    isos = all_isomorphisms(X.T, Y.T)
    if len(isos) == 0:
        return IsoSetReport(False, reason="simple factors not isomorphic", stats=stats)
    for c in socle_conjugators(X, Y, isos, stats, first_only=True):
        f = lift_conjugator(X, Y, c)
        if f is not None and is_isomorphism(G, H, f):
            trail = {"route": "unique-minimal-normal", "factors": X.k, "checked": stats.conjugator_checks}
            return IsoSetReport(True, f, "socle conjugator lifts", trail, stats)
    trail = {"route": "unique-minimal-normal", "factors": X.k, "checked": stats.conjugator_checks}
    return IsoSetReport(False, None, "no socle isomorphism conjugates G* onto H*", trail, stats)


# --------------------------------------------------------------------------
# reduction to twisted code equivalence


@dataclass
class CodeReduction:
    instance: TwistedCodeInstance
    g_strings: np.ndarray  # n x m letters of G's elements (class-ordered positions)
    h_index: dict[tuple[int, ...], int]
    g_positions: list[int]  # minimal normal index of each position
    h_positions: list[int]
    w_groups: list[list[Perm]]
    gens_a: list[tuple[int, ...]]

    def lift(self, psi: Perm) -> np.ndarray | None:
        S = self.g_strings
        out = np.empty_like(S)
        for p, (q, tw) in enumerate(self.instance.decode(psi)):
            out[:, q] = np.asarray(tw, dtype=np.int64)[S[:, p]]
        f = np.empty(S.shape[0], dtype=np.int64)
        for g, row in enumerate(out.tolist()):
            h = self.h_index.get(tuple(row))
            if h is None:
                return None
            f[g] = h
        return f


def _w_cayley(W: np.ndarray, base: np.ndarray) -> CayleyGroup:
    """Cayley table of a permutation group listed as rows (identity first)."""
    keys = {W[i, base].tobytes(): i for i in range(len(W))}
    n = len(W)
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        prod = W[:, W[a, base]]  # row b: (a then b) on the base
        table[a] = [keys[r.tobytes()] for r in prod]
    return group_from_table(table, check_assoc=False)


def reduce_to_twisted_codeq(
    G: CayleyGroup,
    H: CayleyGroup,
    decG: SocleDecomposition,
    decH: SocleDecomposition,
    stats: IsoStats | None = None,
    cache: IsoCache | None = None,
) -> CodeReduction:
    stats = stats if stats is not None else IsoStats()
    cache = cache if cache is not None else IsoCache()
    FG = [build_frame(G, decG, i) for i in range(len(decG.minimal_normals))]
    FH = [build_frame(H, decH, i) for i in range(len(decH.minimal_normals))]
    if len(FG) != len(FH):
        raise SocleMismatch("different numbers of minimal normal subgroups")
    refs: list[Frame] = []
    g_cls, g_chi, h_cls, h_chi = [], [], [], []

    def classify(X: Frame, allow_new: bool) -> tuple[int, Perm]:
        for i, R in enumerate(refs):
            c = next(socle_conjugators(R, X, cache.get(R, X), stats, first_only=True), None)
            if c is not None:
                return i, c
        if not allow_new:
            raise SocleMismatch("a minimal normal subgroup of H matches no alphabet of G")
        refs.append(X)
        return len(refs) - 1, tuple(range(X.emb.degree))

    for X in FG:
        i, c = classify(X, True)
        g_cls.append(i)
        g_chi.append(c)
    for Y in FH:
        i, c = classify(Y, False)
        h_cls.append(i)
        h_chi.append(c)
    r = len(refs)
    lengths = [g_cls.count(i) for i in range(r)]
    if lengths != [h_cls.count(i) for i in range(r)]:
        raise SocleMismatch("alphabet multiplicities differ")
    g_pos = sorted(range(len(FG)), key=lambda p: (g_cls[p], p))
    h_pos = sorted(range(len(FH)), key=lambda p: (h_cls[p], p))

    sizes, groups, actions, w_groups, letter_idx, letters = [], [], [], [], [], []
    for i, R in enumerate(refs):
        gamma = np.unique(R.emb.restrictions, axis=0)
        letters.append(gamma)
        letter_idx.append({row.tobytes(): a for a, row in enumerate(gamma)})
        Ws = sorted(socle_conjugators(R, R, cache.get(R, R), stats))  # identity first
        W = np.array(Ws, dtype=gamma.dtype)
        w_groups.append(Ws)
        base = np.unique(R.pt_table[:, 1:].ravel())
        groups.append(_w_cayley(W, base))
        act = np.empty((len(W), len(gamma)), dtype=np.int64)
        for w in range(len(W)):
            moved = _transport_rows(gamma, W[w])
            try:
                act[w] = [letter_idx[i][row.tobytes()] for row in moved]
            except KeyError as exc:
                raise InvariantViolation("W does not normalize the alphabet") from exc
        actions.append(act)
        sizes.append(len(gamma))

    def strings(frames, pos, cls, chis) -> np.ndarray:
        n = frames[0].emb.restrictions.shape[0]
        S = np.empty((n, len(pos)), dtype=np.int64)
        for col, p in enumerate(pos):
            ci = np.asarray(inv(chis[p]), dtype=np.int64)
            rows = _transport_rows(frames[p].emb.restrictions, ci)
            idx = letter_idx[cls[p]]
            try:
                S[:, col] = [idx[row.tobytes()] for row in rows]
            except KeyError as exc:
                raise InvariantViolation("restriction is not a letter of its alphabet") from exc
        return S

    SG = strings(FG, g_pos, g_cls, g_chi)
    SH = strings(FH, h_pos, h_cls, h_chi)
    inst = TwistedCodeInstance(
        tuple(sizes),
        tuple(lengths),
        tuple(groups),
        tuple(actions),
        frozenset(map(tuple, SG.tolist())),
        frozenset(map(tuple, SH.tolist())),
    )
    h_index = {tuple(row): h for h, row in enumerate(SH.tolist())}
    gens_a = [tuple(int(v) for v in SG[g]) for g in G.generators]
    return CodeReduction(inst, SG, h_index, g_pos, h_pos, w_groups, gens_a)


# --------------------------------------------------------------------------
# top level


def _socle_signature(dec: SocleDecomposition) -> list[tuple[int, int]]:
    return sorted((dec.factors[js[0]].count, len(js)) for js in dec.minimal_normals)


def iso_fitting_free(
    G: CayleyGroup, H: CayleyGroup, threads: int = 1, stats: IsoStats | None = None, solver: str = "group"
) -> IsoSetReport:
    """Decide G = H for Fitting-free G; solver 'dp' uses the generic twisted-code DP."""
    stats = stats if stats is not None else IsoStats()
    stats.diag_bound = H.n**2
    if not is_fitting_free(G, threads) or G.n == 1:
        raise GNotFittingFree("the first group is not Fitting-free")
    if G.n != H.n:
        return IsoSetReport(False, reason="order mismatch", stats=stats)
    if not is_fitting_free(H, threads):
        return IsoSetReport(False, reason="H is not Fitting-free", stats=stats)
    decG, decH = _prepare(G, H, threads)
    if _socle_signature(decG) != _socle_signature(decH):
        return IsoSetReport(False, reason="socle factor multiset mismatch", stats=stats)
    if len(decG.minimal_normals) == 1:
        return iso_unique_min_normal(G, H, decG, decH, threads, stats)
    try:
        red = reduce_to_twisted_codeq(G, H, decG, decH, stats)
    except SocleMismatch as exc:
        return IsoSetReport(False, reason=f"socle mismatch: {exc}", stats=stats)
    trail = {
        "route": "twisted-code-equivalence",
        "solver": solver,
        "positions": red.instance.m,
        "alphabet_sizes": list(red.instance.alphabet_sizes),
        "w_orders": [len(w) for w in red.w_groups],
    }
    if solver == "dp":
        res = solve_twisted_codeq(red.instance, DPStats(), threads=threads, validate=False)
        psi = None if res.is_empty else res.rep
    else:
        psi = next(iter_group_code_equivalences(red.instance, red.gens_a, first_only=True), None)
    if psi is None:
        return IsoSetReport(False, None, "codes are not twisted-equivalent", trail, stats)
    trail["position_map"] = [q + 1 for q, _ in red.instance.decode(psi)]
    f = red.lift(psi)
    if f is None or not is_isomorphism(G, H, f):
        raise InvariantViolation("twisted equivalence did not lift to an isomorphism")
    return IsoSetReport(True, f, "twisted equivalence lifts", trail, stats)
