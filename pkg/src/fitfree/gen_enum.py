"""Isomorphisms of Cayley groups by enumerating images of a generating sequence.

Images of the first generator are taken up to conjugacy in the target; every
isomorphism is an inner automorphism of the target composed with one found
that way.  Candidates are pruned by element order, class size and the orders
of short products before the BFS extension is attempted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .group_core import CayleyGroup, generated, small_generating_set

PAIR_TRIALS = 64


@dataclass
class Layers:
    """BFS spanning tree of G over a generating sequence."""

    gens: list[int]
    steps: list[tuple[np.ndarray, np.ndarray, np.ndarray]]  # (elements, parents, generator slot)


def spanning_layers(G: CayleyGroup, gens: Sequence[int]) -> Layers:
    gens = [int(g) for g in gens]
    seen = np.zeros(G.n, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    steps = []
    while frontier.size:
        els, pars, slots = [], [], []
        for i, g in enumerate(gens):
            nxt = G.table[frontier, g].astype(np.int64)
            new = ~seen[nxt]
            nxt, par = nxt[new], frontier[new]
            nxt, first = np.unique(nxt, return_index=True)
            seen[nxt] = True
            els.append(nxt)
            pars.append(par[first])
            slots.append(np.full(nxt.size, i))
        e = np.concatenate(els)
        if e.size == 0:
            break
        steps.append((e, np.concatenate(pars), np.concatenate(slots)))
        frontier = e
    return Layers(gens, steps)


def extend_on_layers(G: CayleyGroup, layers: Layers, H: CayleyGroup, images: Sequence[int]) -> np.ndarray | None:
    """The isomorphism G -> H sending gens to images, or None."""
    imgs = np.asarray(images, dtype=np.int64)
    f = np.full(G.n, -1, dtype=np.int64)
    f[0] = 0
    Ht = H.table
    for els, pars, slots in layers.steps:
        f[els] = Ht[f[pars], imgs[slots]]
    if (f < 0).any():
        return None
    hit = np.zeros(H.n, dtype=bool)
    hit[f] = True
    if not hit.all():
        return None
    Gt = G.table
    for g, h in zip(layers.gens, imgs):
        if not np.array_equal(Ht[f, h], f[Gt[:, g]]):
            return None
    return f


def _profile(G: CayleyGroup) -> np.ndarray:
    return G.element_orders * (G.n + 1) + G.class_sizes


def generating_pair(G: CayleyGroup) -> list[int] | None:
    """A 2-element generating sequence, preferring generators in small classes."""
    if G.n == 1:
        return []
    classes = sorted(G.conjugacy_classes, key=lambda c: (len(c), int(c[0])))
    reps = [int(c[0]) for c in classes if c[0] != 0]
    others = [int(x) for c in classes for x in c if x != 0]
    # a bounded, evenly spread trial per first generator, then the full scan
    stride = max(1, len(others) // PAIR_TRIALS)
    for limit in (others[::stride], others):
        for y in reps:
            for x in limit:
                if generated(G, [y, x]).size == G.n:
                    return [y, x]
    return None


def good_generators(G: CayleyGroup) -> list[int]:
    if G.n == 1:
        return []
    for x in range(1, G.n):
        if generated(G, [x]).size == G.n:
            return [x]
    pair = generating_pair(G)
    if pair is not None:
        return pair
    return small_generating_set(G)


def _candidates(G: CayleyGroup, H: CayleyGroup, gens: list[int], reduce_first: bool) -> list[np.ndarray]:
    pg, ph = _profile(G), _profile(H)
    out = []
    for i, g in enumerate(gens):
        cand = np.flatnonzero(ph == pg[g])
        if i == 0 and reduce_first:
            reps = {int(c[0]) for c in H.conjugacy_classes}
            cand = np.array([c for c in cand if int(c) in reps], dtype=np.int64)
        out.append(cand)
    return out


def iter_isomorphisms(G: CayleyGroup, H: CayleyGroup, up_to_inner: bool = True) -> Iterator[np.ndarray]:
    """Isomorphisms G -> H; with up_to_inner the first generator image is a class representative."""
    if G.n != H.n:
        return
    if G.n == 1:
        yield np.zeros(1, dtype=np.int64)
        return
    if not np.array_equal(np.sort(_profile(G)), np.sort(_profile(H))):
        return
    gens = good_generators(G)
    layers = spanning_layers(G, gens)
    cands = _candidates(G, H, gens, up_to_inner)
    oG, oH = G.element_orders, H.element_orders
    Gt, Ht = G.table, H.table
    Ginv, Hinv = G.inverse, H.inverse
    if len(gens) == 1:
        for a in cands[0]:
            f = extend_on_layers(G, layers, H, [a])
            if f is not None:
                yield f
        return
    x, y = gens[0], gens[1]
    want = (oG[Gt[x, y]], oG[Gt[x, Ginv[y]]], oG[Gt[Gt[Ginv[x], Ginv[y]], Gt[x, y]]])
    for a in cands[0]:
        ys = cands[1]
        ok = (oH[Ht[a, ys]] == want[0]) & (oH[Ht[a, Hinv[ys]]] == want[1])
        ys = ys[ok]
        comm = Ht[Ht[Hinv[a], Hinv[ys]], Ht[a, ys]]
        ys = ys[oH[comm] == want[2]]
        rest = cands[2:]
        for b in ys:
            for tail in itertools.product(*rest):
                f = extend_on_layers(G, layers, H, (a, b) + tuple(tail))
                if f is not None:
                    yield f


def first_isomorphism(G: CayleyGroup, H: CayleyGroup) -> np.ndarray | None:
    return next(iter_isomorphisms(G, H), None)


def all_isomorphisms(G: CayleyGroup, H: CayleyGroup) -> np.ndarray:
    """Every isomorphism G -> H as rows of an array, sorted lexicographically."""
    base = list(iter_isomorphisms(G, H, up_to_inner=True))
    if not base:
        return np.zeros((0, G.n), dtype=np.int64)
    Ht, Hinv = H.table.astype(np.int64), H.inverse.astype(np.int64)
    gens = good_generators(G)
    h = np.arange(H.n)
    seen: set[tuple[int, ...]] = set()
    rows = []
    for f in base:
        # t -> h^-1 f(t) h for every h; an isomorphism is fixed by its generator images
        keys = Ht[Ht[Hinv[h][:, None], f[gens][None, :]], h[:, None]]
        for hi, key in zip(h, map(tuple, keys.tolist())):
            if key not in seen:
                seen.add(key)
                rows.append(Ht[Ht[Hinv[hi], f], hi])
    out = np.array(rows, dtype=np.int64)
    return out[np.lexsort(out.T[::-1])]
