"""Listing permutational isomorphisms between transitive groups.

A permutational isomorphism from G to H is a bijection f of the domain with
f^-1 G f = H.  The set PISO(G, H) is empty or the coset PAut(G) f.  The
transitive case is handled by induction along a structure tree of G: the
bottom layer of blocks, the action on those blocks, and per-block extension
of a block bijection.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .blocks_trees import (
    BlockSystem,
    blocks_action,
    enumerate_structure_trees,
    minimal_blocks_containing,
    setwise_stabilizer,
)
from .errors import (
    IsGiant,
    NotPrimitive,
    NotSubdirectAlternating,
    NotTransitive,
    PhiNotHomomorphism,
    PreconditionViolated,
)
from .perm_core import (
    Perm,
    PermGroup,
    augmented,
    conj,
    cycle_type,
    element_mapping,
    identity,
    inv,
    is_perm_isomorphism,
    mul,
    pointwise_stabilizer,
    reduce_generators,
    restrict,
    symmetric_group,
)
from .subcoset import EMPTY, Subcoset

LIST_LIMIT = 10_000


@dataclass
class PisoSet:
    """PISO(G, H) as a coset, plus the explicit sorted list when small."""

    coset: Subcoset
    listing: list[Perm] | None = None

    @property
    def is_empty(self) -> bool:
        return self.coset.is_empty

    def __len__(self) -> int:
        return len(self.coset)

    def representative(self) -> Perm | None:
        if self.is_empty:
            return None
        return self.listing[0] if self.listing else self.coset.rep

    def elements(self) -> list[Perm]:
        if self.listing is not None:
            return self.listing
        return sorted(self.coset.elements())


def _from_list(perms: Iterable[Perm], degree: int) -> Subcoset:
    perms = sorted(set(perms))
    if not perms:
        return EMPTY
    f0 = perms[0]
    f0i = inv(f0)
    gens = [mul(f, f0i) for f in perms[1:]]
    grp = reduce_generators(PermGroup(degree, gens, check=False))
    return Subcoset(grp, f0)


def _as_set(coset: Subcoset) -> PisoSet:
    if coset.is_empty:
        return PisoSet(EMPTY, [])
    if len(coset) <= LIST_LIMIT:
        return PisoSet(coset, sorted(coset.elements()))
    return PisoSet(coset, None)


def is_giant(G: PermGroup) -> bool:
    m = G.degree
    return G.is_transitive() and G.order in (math.factorial(m), max(1, math.factorial(m) // 2))


def is_primitive(G: PermGroup) -> bool:
    return G.is_transitive() and (G.degree <= 1 or not minimal_blocks_containing(G, 0))


# --------------------------------------------------------------------------
# realizing an abstract isomorphism


def _realize(G: PermGroup, images: Sequence[Perm], start: int, y: int) -> Perm | None:
    """The bijection f with f(start) = y and f(i^g) = f(i)^phi(g), if consistent."""
    m = G.degree
    f = [-1] * m
    f[start] = y
    used = {y}
    queue = [start]
    for i in queue:
        fi = f[i]
        for g, h in zip(G.generators, images):
            j, v = g[i], h[fi]
            if f[j] < 0:
                if v in used:
                    return None
                f[j] = v
                used.add(v)
                queue.append(j)
            elif f[j] != v:
                return None
    if len(queue) != m:
        return None
    return tuple(f)


def piso_from_abstract_iso(G: PermGroup, H: PermGroup, phi: Sequence[Perm] | dict) -> list[Perm]:
    """All bijections f with f^-1 g f = phi(g) for every generator g of G."""
    if not G.is_transitive():
        raise NotTransitive("G must be transitive")
    images = [tuple(phi[g]) for g in G.generators] if isinstance(phi, dict) else [tuple(p) for p in phi]
    if len(images) != len(G.generators):
        raise PhiNotHomomorphism("one image per generator required")
    if G.generators:
        A = augmented(G, images, H.degree)
        if A.order != G.order:
            raise PhiNotHomomorphism("generator images do not define a homomorphism")
    out = []
    for y in range(H.degree):
        f = _realize(G, images, 0, y)
        if f is not None:
            out.append(f)
    return out


def piso_primitive(G: PermGroup, H: PermGroup) -> PisoSet:
    """PISO for a primitive non-giant G, by enumerating abstract isomorphisms
    on a reduced generating sequence and realizing each one."""
    if not is_primitive(G):
        raise NotPrimitive("G is not primitive")
    if is_giant(G):
        raise IsGiant("G is a giant; handle it as Sym or Alt")
    m = G.degree
    if H.degree != m or G.order != H.order or not is_primitive(H):
        return PisoSet(EMPTY, [])
    gens = reduce_generators(G).generators
    by_type: dict[tuple, list[Perm]] = {}
    for h in H.elements():
        by_type.setdefault(cycle_type(h), []).append(h)
    cands = [sorted(by_type.get(cycle_type(g), [])) for g in gens]
    Gr = PermGroup(m, gens, check=False)
    found = []
    for images in itertools.product(*cands):
        for y in range(m):
            f = _realize(Gr, images, 0, y)
            if f is not None:
                found.append(f)
    found = [f for f in set(found) if is_perm_isomorphism(G, H, f)]
    return _as_set(_from_list(found, m))


# --------------------------------------------------------------------------
# block-respecting extensions


def _block_restriction(G: PermGroup, block: Sequence[int]) -> PermGroup:
    """Action of the setwise stabilizer of block on block, relabeled locally."""
    return restrict(setwise_stabilizer(G, block), block)


def _kernel_part_trivial(K: PermGroup, block: Sequence[int]) -> bool:
    return all(g[x] == x for g in K.generators for x in block)


def _lift_block_action(H: PermGroup, blocks: BlockSystem, tau: Perm) -> Perm | None:
    """Some h in H inducing tau on the blocks."""
    star_images = []
    idx = blocks.index
    for h in H.generators:
        star_images.append(tuple(idx[h[b[0]]] for b in blocks.blocks))
    A = augmented(H, star_images, len(blocks))
    m = H.degree
    pts = [m + i for i in range(len(blocks))]
    g = element_mapping(A, pts, [m + tau[i] for i in range(len(blocks))])
    return None if g is None else g[:m]


def piso_extensions_trivial_kernel(
    G: PermGroup, H: PermGroup, blocks_g: BlockSystem, blocks_h: BlockSystem, pi: Perm
) -> list[Perm]:
    """Every f extending the block bijection pi when the kernel is trivial."""
    Gs, K = blocks_action(G, blocks_g)
    Hs, L = blocks_action(H, blocks_h)
    b0 = blocks_g.blocks[0]
    if not _kernel_part_trivial(K, b0):
        raise PreconditionViolated("kernel acts nontrivially on a block")
    if _block_restriction(G, b0).order == 1:
        raise PreconditionViolated("block action is trivial")
    if L.order != 1:
        return []
    images = []
    for gs in Gs.generators:
        h = _lift_block_action(H, blocks_h, conj(gs, pi))
        if h is None:
            return []
        images.append(h)
    # G is isomorphic to its block action; generators of G and of Gs correspond
    start = b0[0]
    out = []
    for y in blocks_h.blocks[pi[0]]:
        f = _realize(G, images, start, y)
        if f is not None and is_perm_isomorphism(G, H, f):
            out.append(f)
    return out


def piso_extend_unique(
    G: PermGroup, H: PermGroup, blocks_g: BlockSystem, blocks_h: BlockSystem, pi: Perm
) -> Perm | None:
    """The unique f extending pi; uniqueness needs distinct point stabilizers in a block."""
    b0 = blocks_g.blocks[0]
    stabs = [pointwise_stabilizer(G, [x]) for x in b0]
    if any(stabs[0].same_group(S) for S in stabs[1:]):
        raise PreconditionViolated("points of a block share their stabilizer, so extensions are not unique")
    found = piso_extensions_trivial_kernel(G, H, blocks_g, blocks_h, pi)
    return found[0] if found else None


def _diagonal_classes(K: PermGroup, blocks: Sequence[Sequence[int]]) -> tuple[list[int], dict[tuple[int, int], dict[int, int]]]:
    """Class representative per block and linking maps f_ij between blocks of one class."""
    l = len(blocks)
    orders = [restrict(K, b).order for b in blocks]
    rep = list(range(l))
    links: dict[tuple[int, int], dict[int, int]] = {}
    for i in range(l):
        if rep[i] != i:
            continue
        for j in range(i + 1, l):
            if rep[j] != j:
                continue
            pair = restrict(K, list(blocks[i]) + list(blocks[j]))
            if pair.order == orders[i]:
                rep[j] = i
                fmap = {}
                for x in blocks[i]:
                    S = pointwise_stabilizer(K, [x])
                    fixed = [y for y in blocks[j] if all(g[y] == y for g in S.generators)]
                    if len(fixed) != 1:
                        raise NotSubdirectAlternating("linking map is not defined")
                    fmap[x] = fixed[0]
                links[(i, j)] = fmap
    return rep, links


def piso_kernel_diagonal(
    K: PermGroup,
    L: PermGroup,
    blocks_k: Sequence[Sequence[int]],
    blocks_l: Sequence[Sequence[int]],
    pi: Perm,
) -> PisoSet:
    """PISO(K, L; pi) for subdirect products of alternating or symmetric groups
    on blocks, using the permutation-diagonal structure of K and L."""
    m = K.degree
    k = len(blocks_k[0])
    if k < 5 or k == 6:
        return _as_set(_from_list(_exhaustive_block_bijections(K, L, blocks_k, blocks_l, pi), m))
    half = math.factorial(k) // 2
    for b in blocks_k:
        if restrict(K, b).order < half:
            raise NotSubdirectAlternating("kernel does not contain the alternating group on a block")
    if K.order != L.order:
        return PisoSet(EMPTY, [])
    rep_k, link_k = _diagonal_classes(K, blocks_k)
    rep_l, link_l = _diagonal_classes(L, blocks_l)
    l = len(blocks_k)
    # pi must carry classes onto classes
    for i in range(l):
        for j in range(l):
            if (rep_k[i] == rep_k[j]) != (rep_l[pi[i]] == rep_l[pi[j]]):
                return PisoSet(EMPTY, [])
    reps = sorted(set(rep_k))

    def link(links, rep, blocks, a, b):
        """Map block a -> block b of one class, through the class representative."""
        c = rep[a]
        first = {x: x for x in blocks[a]} if a == c else {v: u for u, v in links[(c, a)].items()}
        second = {x: x for x in blocks[c]} if b == c else links[(c, b)]
        return {x: second[first[x]] for x in blocks[a]}

    choices = [list(itertools.permutations(blocks_l[pi[r]])) for r in reps]
    out = []
    for combo in itertools.product(*choices):
        f = [-1] * m
        for r, imgs in zip(reps, combo):
            for x, y in zip(blocks_k[r], imgs):
                f[x] = y
            for j in range(l):
                if j == r or rep_k[j] != r:
                    continue
                fk = link(link_k, rep_k, blocks_k, r, j)  # block r -> block j of K
                fk_inv = {v: u for u, v in fk.items()}
                gl = link(link_l, rep_l, blocks_l, pi[r], pi[j])  # block pi r -> block pi j of L
                for yj in blocks_k[j]:
                    f[yj] = gl[f[fk_inv[yj]]]
        f = tuple(f)
        if is_perm_isomorphism(K, L, f):
            out.append(f)
    return _as_set(_from_list(out, m))


def _exhaustive_block_bijections(K, L, blocks_k, blocks_l, pi) -> list[Perm]:
    m = K.degree
    per_block = [list(itertools.permutations(blocks_l[pi[i]])) for i in range(len(blocks_k))]
    out = []
    for combo in itertools.product(*per_block):
        f = [0] * m
        for blk, imgs in zip(blocks_k, combo):
            for x, y in zip(blk, imgs):
                f[x] = y
        f = tuple(f)
        if is_perm_isomorphism(K, L, f):
            out.append(f)
    return out


# --------------------------------------------------------------------------
# transitive groups


@dataclass
class PisoStats:
    trees_g: int = 0
    tree_pairs: int = 0
    block_bijections: int = 0
    candidates: int = 0


def piso_transitive(G: PermGroup, H: PermGroup, stats: PisoStats | None = None) -> PisoSet:
    if not G.is_transitive():
        raise NotTransitive("G must be transitive")
    stats = stats if stats is not None else PisoStats()
    return _as_set(_piso(G, H, stats))


def _piso(G: PermGroup, H: PermGroup, stats: PisoStats) -> Subcoset:
    m = G.degree
    if H.degree != m or G.order != H.order or not H.is_transitive():
        return EMPTY
    if m <= 1:
        return Subcoset(PermGroup(m, [], check=False), identity(m))
    if is_primitive(G):
        if not is_primitive(H):
            return EMPTY
        if is_giant(G):
            return Subcoset(symmetric_group(m), identity(m))
        return piso_primitive(G, H).coset
    if is_primitive(H):
        return EMPTY
    trees_g = enumerate_structure_trees(G)
    stats.trees_g += len(trees_g)
    tree = trees_g[0]
    shape = tuple(len(layer) for layer in tree.layers)
    sigma = BlockSystem(tree.layers[-2])
    bottoms = []
    for U in enumerate_structure_trees(H):
        if tuple(len(layer) for layer in U.layers) == shape and U.layers[-2] not in bottoms:
            bottoms.append(U.layers[-2])
    Gs, K = blocks_action(G, sigma)
    Gi = _block_restriction(G, sigma.blocks[0])
    giant = is_giant(Gi)
    kernel_trivial = _kernel_part_trivial(K, sigma.blocks[0])
    found: set[Perm] = set()
    prim_cache: dict[tuple[int, int], list[dict[int, int]]] = {}
    for layer in bottoms:
        stats.tree_pairs += 1
        delta = BlockSystem(layer)
        Hs, L = blocks_action(H, delta)
        if K.order != L.order:
            continue
        P = _piso(Gs, Hs, stats)
        if P.is_empty:
            continue
        for pi in P.elements():
            stats.block_bijections += 1
            if not giant:
                cands = _extend_nongiant(G, H, sigma, delta, pi, prim_cache)
            elif kernel_trivial:
                cands = piso_extensions_trivial_kernel(G, H, sigma, delta, pi)
            else:
                cands = piso_kernel_diagonal(K, L, sigma.blocks, delta.blocks, pi).elements()
            for f in cands:
                stats.candidates += 1
                if f not in found and is_perm_isomorphism(G, H, f):
                    found.add(f)
    return _from_list(found, m)


def _extend_nongiant(G, H, sigma: BlockSystem, delta: BlockSystem, pi: Perm, cache) -> list[Perm]:
    """Products of per-block permutational isomorphisms G(i) -> H(pi i)."""
    per_block = []
    for i, blk in enumerate(sigma.blocks):
        key = (i, pi[i])
        if key not in cache:
            tgt = delta.blocks[pi[i]]
            P = piso_primitive(_block_restriction(G, blk), _block_restriction(H, tgt))
            cache[key] = [{blk[a]: tgt[b] for a, b in enumerate(f)} for f in P.elements()]
        if not cache[key]:
            return []
        per_block.append(cache[key])
    out = []
    m = G.degree
    for combo in itertools.product(*per_block):
        f = [0] * m
        for part in combo:
            for x, y in part.items():
                f[x] = y
        out.append(tuple(f))
    return out
