"""Finite groups given by full multiplication tables.

Elements are 0-based indices internally, with the identity at index 0.  The
file format and anything shown to a user is 1-based (identity at 1).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import NoIdentityAtOne, NotAssociative, NotLatinSquare, PartsNotPermuted, ValidationFailed

log = logging.getLogger(__name__)

ASSOC_CHECK_LIMIT = 256


def _index_dtype(n: int):
    return np.int16 if n < 32768 else np.int32


@dataclass(frozen=True, eq=False)
class CayleyGroup:
    """A group of order n stored as an n x n table of 0-based indices."""

    table: np.ndarray
    inverse: np.ndarray
    name: str = ""

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conj(self, x: int, g: int) -> int:
        """x^g = g^-1 x g."""
        return int(self.table[self.table[self.inverse[g], x], g])

    def power(self, x: int, e: int) -> int:
        r = 0
        for _ in range(e % self.order_of(x)):
            r = int(self.table[r, x])
        return r

    def order_of(self, x: int) -> int:
        return int(self.element_orders[x])

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.n
        idx = np.arange(n)
        cur = idx.copy()
        orders = np.zeros(n, dtype=np.int64)
        k = 1
        while True:
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            if orders.all():
                return orders
            cur = self.table[cur, idx].astype(np.int64)
            k += 1

    @cached_property
    def conjugacy_classes(self) -> list[np.ndarray]:
        """Classes as sorted index arrays, ordered by their least element."""
        n = self.n
        seen = np.zeros(n, dtype=bool)
        classes = []
        t, inv = self.table, self.inverse
        g = np.arange(n)
        for x in range(n):
            if seen[x]:
                continue
            cls = np.unique(t[t[inv, x], g])
            seen[cls] = True
            classes.append(cls)
        return classes

    @cached_property
    def class_index(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        for i, c in enumerate(self.conjugacy_classes):
            out[c] = i
        return out

    @cached_property
    def class_sizes(self) -> np.ndarray:
        sizes = np.array([len(c) for c in self.conjugacy_classes])
        return sizes[self.class_index]

    @cached_property
    def generators(self) -> list[int]:
        """A small generating set, fixed once per group."""
        return small_generating_set(self)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def all(self) -> "Subset":
        return Subset(np.ones(self.n, dtype=bool))


@dataclass(frozen=True, eq=False)
class Subset:
    """A subset of a group's elements held as a boolean mask."""

    mask: np.ndarray

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> "Subset":
        m = np.zeros(n, dtype=bool)
        m[np.fromiter(elements, dtype=np.int64)] = True
        return cls(m)

    @cached_property
    def count(self) -> int:
        return int(self.mask.sum())

    @cached_property
    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self) -> int:
        return self.count

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[x])

    def __iter__(self):
        return iter(int(x) for x in self.elements)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subset) and np.array_equal(self.mask, other.mask)

    def __hash__(self) -> int:
        return hash(self.mask.tobytes())

    def __and__(self, other: "Subset") -> "Subset":
        return Subset(self.mask & other.mask)

    def __or__(self, other: "Subset") -> "Subset":
        return Subset(self.mask | other.mask)

    def issubset(self, other: "Subset") -> bool:
        return not bool((self.mask & ~other.mask).any())


# --------------------------------------------------------------------------
# construction and validation


def group_from_table(table: np.ndarray, check_assoc: bool | None = None, name: str = "") -> CayleyGroup:
    """Validate a 0-based table and return the group."""
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise ValidationFailed(f"table must be a nonempty square array, got shape {t.shape}")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise ValidationFailed("table entries out of range")
    t = t.astype(_index_dtype(n))
    idx = np.arange(n)
    if not (np.array_equal(t[0], idx) and np.array_equal(t[:, 0], idx)):
        bad = np.flatnonzero((t[0] != idx) | (t[:, 0] != idx))[0]
        raise NoIdentityAtOne(f"element 1 is not the identity (cell involving element {bad + 1})")
    srt = np.sort(t, axis=1)
    rows_bad = np.flatnonzero((srt != idx).any(axis=1))
    if rows_bad.size:
        r = int(rows_bad[0])
        raise NotLatinSquare(f"row {r + 1} is not a permutation of 1..{n}")
    srt = np.sort(t, axis=0)
    cols_bad = np.flatnonzero((srt != idx[:, None]).any(axis=0))
    if cols_bad.size:
        c = int(cols_bad[0])
        raise NotLatinSquare(f"column {c + 1} is not a permutation of 1..{n}")
    if check_assoc is None:
        check_assoc = n <= ASSOC_CHECK_LIMIT
        if not check_assoc:
            log.warning("skipping associativity check for n=%d", n)
    if check_assoc:
        _check_associative(t)
    inverse = np.argmin(t, axis=1).astype(_index_dtype(n))  # t[j, inv[j]] == 0
    return CayleyGroup(t, inverse, name)


def _check_associative(t: np.ndarray) -> None:
    n = t.shape[0]
    for a in range(n):
        # (a b) c versus a (b c) for all b, c at once
        left = t[t[a]]  # row b: (a b) c over c
        right = t[a][t]
        if not np.array_equal(left, right):
            b, c = np.argwhere(left != right)[0]
            raise NotAssociative(f"(x{a + 1} x{b + 1}) x{c + 1} != x{a + 1} (x{b + 1} x{c + 1})")


def validate_cayley(table, check_assoc: bool | None = None, name: str = "") -> CayleyGroup:
    """Validate a 1-based table (identity at 1) as in the file format."""
    t = np.asarray(table, dtype=np.int64)
    if t.size and (t.min() < 1 or t.max() > t.shape[0]):
        raise ValidationFailed("entries must lie in 1..n")
    return group_from_table(t - 1, check_assoc=check_assoc, name=name)


def relabel(G: CayleyGroup, sigma: Sequence[int]) -> CayleyGroup:
    """Transport G along the bijection sigma (sigma[0] must be 0)."""
    s = np.asarray(sigma, dtype=np.int64)
    if s[0] != 0:
        raise ValueError("relabeling must fix the identity")
    sinv = np.argsort(s)
    # new table[s a, s b] = s(table[a, b])
    new = s[G.table[np.ix_(sinv, sinv)].astype(np.int64)]
    return CayleyGroup(new.astype(G.table.dtype), s[G.inverse[sinv]].astype(G.inverse.dtype), G.name)


def random_relabel(G: CayleyGroup, rng: np.random.Generator) -> tuple[CayleyGroup, np.ndarray]:
    s = np.concatenate([[0], 1 + rng.permutation(G.n - 1)])
    return relabel(G, s), s


def group_from_permutations(gens: Sequence[Sequence[int]], degree: int, name: str = "") -> tuple[CayleyGroup, np.ndarray]:
    """Cayley table of the permutation group generated by gens.

    Returns the group and the element list (n x degree, row 0 = identity,
    the rest sorted lexicographically).  Products follow the right action:
    row a times row b means apply a first.
    """
    gens = np.array([tuple(g) for g in gens], dtype=np.int64).reshape(-1, degree)
    ident = np.arange(degree, dtype=np.int64)
    row = np.dtype((np.void, 8 * max(degree, 1)))

    def keys(P: np.ndarray) -> np.ndarray:
        return np.ascontiguousarray(P).view(row).ravel()

    # breadth-first enumeration, one generator step per layer
    layers = [ident[None, :]]
    seen = keys(ident[None, :]).copy()
    frontier = ident[None, :]
    while len(frontier):
        cand = np.concatenate([g[frontier] for g in gens]) if len(gens) else frontier[:0]
        k = keys(cand)
        _, first = np.unique(k, return_index=True)
        cand = cand[np.sort(first)]
        fresh = cand[~np.isin(keys(cand), seen)]
        seen = np.concatenate([seen, keys(fresh)])
        layers.append(fresh)
        frontier = fresh
    allel = np.concatenate(layers)
    rest = allel[1:]
    rest = rest[np.lexsort(rest.T[::-1])] if len(rest) else rest
    E = np.concatenate([ident[None, :], rest])
    n = len(E)
    ekeys = keys(E)
    order = np.argsort(ekeys)
    skeys = ekeys[order]

    def index_of(P: np.ndarray) -> np.ndarray:
        return order[np.searchsorted(skeys, keys(P))]

    # right multiplication by each generator: R[s][x] = index of x * s
    R = [index_of(g[E]) for g in gens]
    # spanning tree: every element other than 1 is parent * generator
    parent = np.full(n, -1, dtype=np.int64)
    via = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    done[0] = True
    bfs = [0]
    for b in bfs:
        for j, Rs in enumerate(R):
            c = int(Rs[b])
            if not done[c]:
                done[c] = True
                parent[c], via[c] = b, j
                bfs.append(c)
    table = np.empty((n, n), dtype=_index_dtype(n))
    table[:, 0] = np.arange(n)
    for b in bfs[1:]:
        table[:, b] = R[via[b]][table[:, parent[b]]]
    inverse = index_of(np.argsort(E, axis=1)).astype(_index_dtype(n))
    return CayleyGroup(table, inverse, name), E


def direct_product(G: CayleyGroup, H: CayleyGroup, name: str = "") -> CayleyGroup:
    n, m = G.n, H.n
    a = np.arange(n * m)
    g, h = a // m, a % m
    table = G.table[np.ix_(g, g)].astype(np.int64) * m + H.table[np.ix_(h, h)]
    return group_from_table(table, check_assoc=False, name=name)


# --------------------------------------------------------------------------
# subgroup machinery


def subgroup_closure(G: CayleyGroup, seed: Subset | Iterable[int], stats: dict | None = None) -> Subset:
    """Smallest subgroup containing seed, by doubling S <- S u S.S."""
    mask = seed.mask.copy() if isinstance(seed, Subset) else Subset.of(G.n, seed).mask
    if not mask.any():
        raise ValueError("seed must be nonempty")
    mask[0] = True
    rounds = 0
    while True:
        el = np.flatnonzero(mask)
        prod = G.table[np.ix_(el, el)]
        new = mask.copy()
        new[prod.ravel()] = True
        if new.sum() == mask.sum():
            break
        mask = new
        rounds += 1
    if stats is not None:
        stats["rounds"] = rounds
    return Subset(mask)


def generated(G: CayleyGroup, gens: Iterable[int]) -> np.ndarray:
    """Sorted elements of the subgroup generated by gens (BFS closure)."""
    gens = np.array(sorted(set(int(g) for g in gens) - {0}), dtype=np.int64)
    mask = np.zeros(G.n, dtype=bool)
    mask[0] = True
    frontier = np.array([0])
    while frontier.size and gens.size:
        nxt = G.table[np.ix_(frontier, gens)].ravel()
        nxt = np.unique(nxt[~mask[nxt]])
        mask[nxt] = True
        frontier = nxt
    return np.flatnonzero(mask)


def generated_mask(G: CayleyGroup, gens: Iterable[int]) -> np.ndarray:
    m = np.zeros(G.n, dtype=bool)
    m[generated(G, gens)] = True
    return m


def closure_with(G: CayleyGroup, mask: np.ndarray, new: Iterable[int]) -> np.ndarray:
    """Mask of the subgroup generated by the subgroup `mask` and `new`."""
    el = np.flatnonzero(mask)
    gens = set(int(x) for x in new) | set(int(x) for x in _some_generators(G, el))
    return generated_mask(G, gens)


def _some_generators(G: CayleyGroup, elements: np.ndarray) -> list[int]:
    """A small generating set of the subgroup with the given elements."""
    target = len(elements)
    gens: list[int] = []
    cur = np.zeros(G.n, dtype=bool)
    cur[0] = True
    for x in elements:
        if cur.sum() == target:
            break
        if not cur[x]:
            gens.append(int(x))
            cur = generated_mask(G, gens)
    return gens


def small_generating_set(G: CayleyGroup, elements: np.ndarray | None = None) -> list[int]:
    """Greedy generating set; each new generator at least doubles the span."""
    if elements is None:
        elements = np.arange(G.n)
    return _some_generators(G, np.asarray(elements))


def conjugates(G: CayleyGroup, x: int) -> np.ndarray:
    """All g^-1 x g as g ranges over G (indexed by g)."""
    g = np.arange(G.n)
    return G.table[G.table[G.inverse, x], g]


def normal_closure_with_generators(
    G: CayleyGroup, x: int, conjugators: Sequence[int] | None = None
) -> tuple[Subset, list[int]]:
    """The normal closure of <x> under <conjugators> (default: G) and a
    generating set of it made of conjugates of x.

    Conjugates of current generators by the conjugators are added until the
    span is closed, so only a few BFS closures are needed.
    """
    conjugators = G.generators if conjugators is None else [int(c) for c in conjugators]
    if x == 0:
        return Subset.of(G.n, [0]), []
    gens = [int(x)]
    mask = generated_mask(G, gens)
    queue = [int(x)]
    while queue:
        s = queue.pop()
        for g in conjugators:
            y = G.conj(s, g)
            if not mask[y]:
                gens.append(y)
                queue.append(y)
                mask = generated_mask(G, gens)
    return Subset(mask), gens


def normal_closure_elements(G: CayleyGroup, x: int) -> Subset:
    """The normal closure of <x> in G."""
    return normal_closure_with_generators(G, x)[0]


def normal_closure_of_set(G: CayleyGroup, xs: Iterable[int]) -> Subset:
    gens = set()
    for x in xs:
        gens.update(int(c) for c in np.unique(conjugates(G, int(x))))
    return Subset(generated_mask(G, gens))


def is_normal(G: CayleyGroup, S: Subset) -> bool:
    el = S.elements
    for g in G.generators:
        img = G.table[G.table[G.inverse[g], el], g]
        if not S.mask[img].all():
            return False
    return True


def is_abelian_subset(G: CayleyGroup, S: Subset | np.ndarray) -> bool:
    """Whether the elements pairwise commute (pass generators to test a subgroup)."""
    el = S.elements if isinstance(S, Subset) else np.asarray(S)
    sub = G.table[np.ix_(el, el)]
    return bool(np.array_equal(sub, sub.T))


def conjugation_action(G: CayleyGroup, subgroup: Subset, parts: Sequence[Subset]) -> dict[int, tuple[int, ...]]:
    """For each g in subgroup, the permutation p of parts with g P_i g^-1 = P_p[i]."""
    keys = {p.mask.tobytes(): i for i, p in enumerate(parts)}
    if len(keys) != len(parts):
        raise PartsNotPermuted("parts must be distinct")
    out: dict[int, tuple[int, ...]] = {}
    t, inv = G.table, G.inverse
    for g in subgroup:
        perm = []
        for i, p in enumerate(parts):
            img = t[t[g, p.elements], inv[g]]
            m = np.zeros(G.n, dtype=bool)
            m[img] = True
            j = keys.get(m.tobytes())
            if j is None:
                raise PartsNotPermuted(f"element {g + 1} maps part {i} outside the listed parts")
            perm.append(j)
        out[g] = tuple(perm)
    return out


# --------------------------------------------------------------------------
# homomorphisms


def extend_homomorphism(
    G: CayleyGroup, gens: Sequence[int], H: CayleyGroup, images: Sequence[int]
) -> np.ndarray | None:
    """Extend gens -> images to a homomorphism on <gens>.

    Returns an array f with f[x] = -1 off <gens>, or None when the
    assignment is not consistent with any homomorphism.
    """
    f = np.full(G.n, -1, dtype=np.int64)
    f[0] = 0
    gens = np.asarray(gens, dtype=np.int64)
    imgs = np.asarray(images, dtype=np.int64)
    frontier = np.array([0], dtype=np.int64)
    while frontier.size:
        src = G.table[np.ix_(frontier, gens)].astype(np.int64)  # x * g_i
        val = H.table[np.ix_(f[frontier], imgs)].astype(np.int64)  # f(x) * h_i
        src, val = src.ravel(), val.ravel()
        known = f[src] >= 0
        if (f[src[known]] != val[known]).any():
            return None
        src_n, val_n = src[~known], val[~known]
        if src_n.size == 0:
            break
        u, first = np.unique(src_n, return_index=True)
        # all proposals for the same new element must agree
        order = np.argsort(src_n, kind="stable")
        s_sorted, v_sorted = src_n[order], val_n[order]
        starts = np.searchsorted(s_sorted, u)
        if (v_sorted != np.repeat(v_sorted[starts], np.diff(np.append(starts, len(s_sorted))))).any():
            return None
        f[u] = v_sorted[starts]
        frontier = u
    return f


def is_isomorphism(G: CayleyGroup, H: CayleyGroup, f: Sequence[int]) -> bool:
    """Exhaustive bijection and homomorphism check."""
    f = np.asarray(f, dtype=np.int64)
    if G.n != H.n or f.shape != (G.n,):
        return False
    if not np.array_equal(np.sort(f), np.arange(G.n)):
        return False
    lhs = f[G.table.astype(np.int64)]
    rhs = H.table[np.ix_(f, f)]
    return bool(np.array_equal(lhs, rhs))


# --------------------------------------------------------------------------
# file format


def format_cayley(G: CayleyGroup) -> str:
    lines = [f"cayley {G.n}"]
    t = G.table.astype(np.int64) + 1
    lines.extend(" ".join(map(str, row)) for row in t.tolist())
    return "\n".join(lines) + "\n"


def parse_cayley_lines(lines: list[str], check_assoc: bool | None = None, name: str = "") -> CayleyGroup:
    header = lines[0].split()
    if len(header) != 2 or header[0] != "cayley":
        raise ValidationFailed(f"expected 'cayley <n>', got {lines[0]!r}")
    n = int(header[1])
    rows = [ln.split() for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValidationFailed(f"expected {n} rows of {n} entries")
    return validate_cayley(np.array(rows, dtype=np.int64), check_assoc=check_assoc, name=name)
