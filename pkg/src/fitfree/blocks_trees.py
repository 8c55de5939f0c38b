"""Orbits, blocks of imprimitivity and structure trees."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import NotABlockSystem, NotTransitive
from .perm_core import PermGroup, action_kernel, set_orbit

Block = tuple[int, ...]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            if a < b:
                self.parent[b] = a
            else:
                self.parent[a] = b


def orbits(G: PermGroup) -> list[list[int]]:
    uf = _UnionFind(G.degree)
    for g in G.generators:
        for i, j in enumerate(g):
            uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(G.degree):
        groups.setdefault(uf.find(i), []).append(i)
    return sorted(groups.values(), key=lambda o: o[0])


@dataclass(frozen=True)
class BlockSystem:
    blocks: tuple[Block, ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "BlockSystem":
        return cls(tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0])))

    @property
    def block_size(self) -> int:
        return len(self.blocks[0]) if self.blocks else 0

    @property
    def index(self) -> dict[int, int]:
        return {x: i for i, b in enumerate(self.blocks) for x in b}

    def __len__(self) -> int:
        return len(self.blocks)


def block_system_of(G: PermGroup, B: Iterable[int]) -> BlockSystem:
    orbit, _, _ = set_orbit(G, B)
    return BlockSystem.from_blocks(orbit)


def is_block(G: PermGroup, B: Iterable[int]) -> bool:
    B = set(B)
    for g in G.generators:
        img = {g[x] for x in B}
        if img != B and img & B:
            return False
    # closure under the group, not only generators: check the orbit is a partition
    orbit, _, _ = set_orbit(G, B)
    seen: set[int] = set()
    for O in orbit:
        if O & seen:
            return False
        seen |= O
    return True


def _pair_orbit(G: PermGroup, x: int, y: int) -> list[tuple[int, int]]:
    seen = {(x, y)}
    queue = [(x, y)]
    for a, b in queue:
        for g in G.generators:
            p = (g[a], g[b])
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return queue


def smallest_block(G: PermGroup, x: int, y: int) -> Block:
    """The connected component of x in the orbital digraph of (x, y)."""
    uf = _UnionFind(G.degree)
    for a, b in _pair_orbit(G, x, y):
        uf.union(a, b)
    r = uf.find(x)
    return tuple(i for i in range(G.degree) if uf.find(i) == r)


def minimal_blocks_containing(G: PermGroup, x: int) -> list[Block]:
    if not G.is_transitive():
        raise NotTransitive("group is not transitive")
    m = G.degree
    cands = set()
    for y in range(m):
        if y != x:
            B = smallest_block(G, x, y)
            if len(B) < m:
                cands.add(B)
    minimal = [B for B in cands if not any(len(C) < len(B) and set(C) <= set(B) for C in cands)]
    return sorted(minimal, key=lambda b: (len(b), b))


def blocks_action(G: PermGroup, B: BlockSystem) -> tuple[PermGroup, PermGroup]:
    idx = B.index
    if len(idx) != G.degree:
        raise NotABlockSystem("blocks do not partition the domain")
    images = []
    for g in G.generators:
        img = []
        for blk in B.blocks:
            targets = {idx[g[x]] for x in blk}
            if len(targets) != 1:
                raise NotABlockSystem("a generator splits a block")
            img.append(targets.pop())
        images.append(tuple(img))
    star = PermGroup(len(B), images, check=False)
    if not G.generators:
        return star, G
    return star, action_kernel(G, images)


@dataclass(frozen=True)
class StructureTree:
    """Layers from the root (one block, the whole domain) to the singletons."""

    layers: tuple[tuple[Block, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.layers) - 1

    def children(self, level: int, block: Block) -> list[Block]:
        s = set(block)
        return [b for b in self.layers[level + 1] if b[0] in s]

    def describe(self) -> str:
        def fmt(b):
            return "{" + ",".join(str(x + 1) for x in b) + "}"

        return " | ".join(" ".join(fmt(b) for b in layer) for layer in self.layers)


def _tree_from_chain(G: PermGroup, chain: list[Block]) -> StructureTree:
    """chain runs from the whole domain down to a singleton."""
    layers = tuple(block_system_of(G, B).blocks for B in chain)
    return StructureTree(layers)


def enumerate_structure_trees(G: PermGroup, threads: int = 1) -> list[StructureTree]:
    """All structure trees, as maximal chains of blocks through point 0."""
    if not G.is_transitive():
        raise NotTransitive("group is not transitive")
    m = G.degree
    if m <= 1:
        return [StructureTree(((tuple(range(m)),),))]
    chains: list[list[Block]] = []

    def grow(chain: list[Block]) -> None:
        B = chain[-1]
        if len(B) == m:
            chains.append(chain)
            return
        system = block_system_of(G, B)
        star, _ = blocks_action(G, system)
        bi = system.index[B[0]]
        ups = minimal_blocks_containing(star, bi) if len(system) > 1 else []
        if not ups:
            grow(chain + [tuple(range(m))])
            return
        for U in ups:
            grow(chain + [tuple(sorted(x for j in U for x in system.blocks[j]))])

    grow([(0,)])
    trees = {_tree_from_chain(G, list(reversed(c))) for c in chains}
    return sorted(trees, key=lambda t: (t.depth, t.layers))


def canonical_trees(trees) -> list[list[list[list[int]]]]:
    """Layer sequences as root-first lists of sorted blocks, blocks sorted, trees sorted."""
    out = []
    for layers in trees:
        t = [sorted(sorted(int(x) for x in b) for b in layer) for layer in layers]
        t.sort(key=lambda layer: -len(layer[0]))
        out.append(t)
    return sorted(out, key=lambda t: (len(t), t))


def structure_tree_bound(m: int) -> float:
    return m ** (2 * math.log2(m)) if m > 1 else 1


def setwise_stabilizer(G: PermGroup, B: Iterable[int]) -> PermGroup:
    return set_orbit(G, B)[2]


def children_action(G: PermGroup, tree: StructureTree, level: int, block: Block) -> PermGroup:
    """Action of Stab_G(block) on the children of block."""
    kids = tree.children(level, block)
    stab = setwise_stabilizer(G, block)
    where = {x: i for i, k in enumerate(kids) for x in k}
    images = [tuple(where[g[k[0]]] for k in kids) for g in stab.generators]
    return PermGroup(len(kids), images, check=False)


def verify_tree(G: PermGroup, tree: StructureTree) -> bool:
    """Check the structure-tree invariants, including primitivity at each node."""
    m = G.degree
    if tree.layers[0] != (tuple(range(m)),):
        return False
    if any(len(b) != 1 for b in tree.layers[-1]):
        return False
    if m > 1 and tree.depth > math.ceil(math.log2(m)):
        return False
    for level in range(tree.depth):
        for blk in tree.layers[level]:
            kids = tree.children(level, blk)
            if len(kids) < 2 or sorted(x for k in kids for x in k) != list(blk):
                return False
            act = children_action(G, tree, level, blk)
            if not act.is_transitive() or minimal_blocks_containing(act, 0):
                return False
        if block_system_of(G, tree.layers[level + 1][0]).blocks != tree.layers[level + 1]:
            return False
    return True
