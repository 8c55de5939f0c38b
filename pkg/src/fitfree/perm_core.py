"""Permutation groups given by generators, with a deterministic stabilizer chain.

A permutation of degree m is a tuple p of 0-based images, p[i] = i^p.  The
product p*q applies p first: (p*q)[i] = q[p[i]].  Cycle notation in files and
on screen is 1-based.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import DegreeCapExceeded, DegreeMismatch, ElementNotInGroup, NotAHomomorphism, ValidationFailed

Perm = tuple[int, ...]
Word = tuple[int, ...]  # signed 1-based generator indices; -i means inverse of generator i

MAX_DEGREE = 64


def identity(m: int) -> Perm:
    return tuple(range(m))


def mul(p: Perm, q: Perm) -> Perm:
    return tuple(map(q.__getitem__, p))


def inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def conj(p: Perm, f: Perm) -> Perm:
    """f^-1 p f, the image of p under relabeling points by f."""
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[f[i]] = f[j]
    return tuple(out)


def mul_all(perms: Iterable[Perm], m: int) -> Perm:
    r = identity(m)
    for p in perms:
        r = mul(r, p)
    return r


def is_identity(p: Perm) -> bool:
    return all(i == j for i, j in enumerate(p))


def perm_order(p: Perm) -> int:
    seen = [False] * len(p)
    o = 1
    for i in range(len(p)):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                length += 1
            o = o * length // math.gcd(o, length)
    return o


def moved_points(p: Perm) -> list[int]:
    return [i for i, j in enumerate(p) if i != j]


def from_cycles(text: str, m: int) -> Perm:
    """Parse 1-based cycle notation such as '(1 2 3)(4 5)'."""
    img = list(range(m))
    for cyc in re.findall(r"\(([^)]*)\)", text):
        pts = [int(x) - 1 for x in re.split(r"[\s,]+", cyc.strip()) if x]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            if not 0 <= a < m:
                raise ValidationFailed(f"point {a + 1} outside degree {m}")
            img[a] = b
    if sorted(img) != list(range(m)):
        raise ValidationFailed(f"{text!r} is not a permutation")
    return tuple(img)


def to_cycles(p: Perm) -> str:
    seen = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def parse_perm(text: str, m: int) -> Perm:
    """Cycle notation or whitespace/comma separated 1-based image form."""
    text = text.strip()
    if text.startswith("(") or text in ("", "id"):
        return from_cycles(text if text != "id" else "", m)
    img = tuple(int(x) - 1 for x in re.split(r"[\s,]+", text) if x)
    if len(img) != m or sorted(img) != list(range(m)):
        raise ValidationFailed(f"{text!r} is not a permutation of degree {m}")
    return img


def check_perm(p: Sequence[int], m: int) -> Perm:
    p = tuple(int(x) for x in p)
    if len(p) != m or sorted(p) != list(range(m)):
        raise ValidationFailed(f"not a permutation of degree {m}: {p}")
    return p


def eval_word(word: Word, gens: Sequence[Perm], m: int) -> Perm:
    r = identity(m)
    for s in word:
        g = gens[abs(s) - 1]
        r = mul(r, g if s > 0 else inv(g))
    return r


def _free_reduce(word: list[int]) -> list[int]:
    out: list[int] = []
    for s in word:
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return out


# --------------------------------------------------------------------------
# stabilizer chain


@dataclass
class _Level:
    point: int
    gens: list[int]  # indices into the strong generating list
    transversal: dict[int, Perm] = field(default_factory=dict)
    tree: dict[int, tuple[int, int]] = field(default_factory=dict)  # point -> (parent, strong gen index)


class StabChain:
    """Base, strong generators and Schreier trees (deterministic Schreier-Sims)."""

    def __init__(self, degree: int, gens: Sequence[Perm], base_prefix: Sequence[int] = ()):
        self.degree = degree
        self.ident = identity(degree)
        self.strong: list[Perm] = []
        # recipe[k] lists signed references: +/-(i+1) for original generator i,
        # or ('s', k', sign) for an earlier strong generator
        self._recipes: list[list[tuple[int, int]]] = []
        self.base: list[int] = list(base_prefix)
        self.levels: list[_Level] = []
        self.n_input = len(gens)
        for i, g in enumerate(gens):
            if not is_identity(g):
                self._add_strong(g, [(-1 - i, 1)])
        self._schreier_sims()

    # -- construction -----------------------------------------------------
    def _add_strong(self, g: Perm, recipe: list[tuple[int, int]]) -> int:
        self.strong.append(g)
        self._recipes.append(recipe)
        return len(self.strong) - 1

    def _fixes_prefix(self, g: Perm, k: int) -> bool:
        return all(g[b] == b for b in self.base[:k])

    def _rebuild_level(self, i: int) -> None:
        lev = self.levels[i]
        lev.gens = [k for k, g in enumerate(self.strong) if self._fixes_prefix(g, i)]
        b = lev.point
        trans = {b: self.ident}
        tree = {b: (-1, -1)}
        queue = [b]
        for x in queue:
            ux = trans[x]
            for k in lev.gens:
                g = self.strong[k]
                y = g[x]
                if y not in trans:
                    trans[y] = mul(ux, g)
                    tree[y] = (x, k)
                    queue.append(y)
        lev.transversal = trans
        lev.tree = tree

    def _new_base_point(self, g: Perm) -> None:
        pt = next(i for i, j in enumerate(g) if i != j)
        self.base.append(pt)

    def _schreier_sims(self) -> None:
        for g in self.strong:
            if self._fixes_prefix(g, len(self.base)):
                self._new_base_point(g)
        self.levels = [_Level(b, []) for b in self.base]
        for i in range(len(self.base)):
            self._rebuild_level(i)
        i = len(self.base) - 1
        while i >= 0:
            lev = self.levels[i]
            restart = None
            for beta in list(lev.transversal):
                u_beta = lev.transversal[beta]
                for k in list(lev.gens):
                    g = self.strong[k]
                    gamma = g[beta]
                    sg = mul(mul(u_beta, g), inv(lev.transversal[gamma]))
                    if is_identity(sg):
                        continue
                    h, j, used = self._sift_from(sg, i + 1)
                    if j < len(self.base) or not is_identity(h):
                        recipe = (
                            self._path_recipe(i, beta)
                            + [(k, 1)]
                            + self._inv_recipe(self._path_recipe(i, gamma))
                            + used
                        )
                        self._add_strong(h, recipe)
                        if j == len(self.base):
                            self._new_base_point(h)
                            self.levels.append(_Level(self.base[-1], []))
                        for l in range(i + 1, j + 1):
                            self._rebuild_level(l)
                        restart = j
                        break
                if restart is not None:
                    break
            if restart is not None:
                i = restart
            else:
                i -= 1

    def _path(self, level: int, point: int) -> list[int]:
        tree = self.levels[level].tree
        path = []
        while True:
            parent, k = tree[point]
            if parent < 0:
                break
            path.append(k)
            point = parent
        path.reverse()
        return path

    def _path_recipe(self, level: int, point: int) -> list[tuple[int, int]]:
        return [(k, 1) for k in self._path(level, point)]

    @staticmethod
    def _inv_recipe(rec: list[tuple[int, int]]) -> list[tuple[int, int]]:
        return [(k, -s) for k, s in reversed(rec)]

    def _sift_from(self, g: Perm, start: int) -> tuple[Perm, int, list[tuple[int, int]]]:
        """Sift g from level start; returns residue, stopping level and the
        recipe of the transversal inverses applied."""
        used: list[tuple[int, int]] = []
        for l in range(start, len(self.levels)):
            lev = self.levels[l]
            beta = g[lev.point]
            u = lev.transversal.get(beta)
            if u is None:
                return g, l, used
            g = mul(g, inv(u))
            used.extend(self._inv_recipe(self._path_recipe(l, beta)))
        return g, len(self.levels), used

    # -- queries ----------------------------------------------------------
    @cached_property
    def order(self) -> int:
        return math.prod(len(l.transversal) for l in self.levels)

    def sift(self, g: Perm) -> tuple[Perm, int]:
        for l, lev in enumerate(self.levels):
            u = lev.transversal.get(g[lev.point])
            if u is None:
                return g, l
            g = mul(g, inv(u))
        return g, len(self.levels)

    def contains(self, g: Perm) -> bool:
        h, _ = self.sift(g)
        return is_identity(h)

    def strong_word(self, k: int, memo: dict[int, list[int]] | None = None) -> list[int]:
        memo = {} if memo is None else memo
        if k in memo:
            return memo[k]
        out: list[int] = []
        for ref, sign in self._recipes[k]:
            if ref < 0:
                w = [-1 - ref + 1]
            else:
                w = self.strong_word(ref, memo)
            out.extend(w if sign > 0 else [-s for s in reversed(w)])
        memo[k] = _free_reduce(out)
        return memo[k]

    def word_for(self, g: Perm) -> Word | None:
        parts: list[list[int]] = []
        memo: dict[int, list[int]] = {}
        for l, lev in enumerate(self.levels):
            beta = g[lev.point]
            u = lev.transversal.get(beta)
            if u is None:
                return None
            w: list[int] = []
            for k in self._path(l, beta):
                w.extend(self.strong_word(k, memo))
            parts.append(w)
            g = mul(g, inv(u))
        if not is_identity(g):
            return None
        out: list[int] = []
        for w in reversed(parts):
            out.extend(w)
        return tuple(_free_reduce(out))

    def stabilizer_gens(self, k: int) -> list[Perm]:
        """Strong generators of the stabilizer of the first k base points."""
        return [g for g in self.strong if self._fixes_prefix(g, k)]

    def transversals(self) -> list[list[Perm]]:
        return [list(l.transversal.values()) for l in self.levels]


# --------------------------------------------------------------------------
# groups


class PermGroup:
    """A permutation group of degree m with a lazily built stabilizer chain."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = (), check: bool = True):
        self.degree = degree
        gens = []
        for g in generators:
            g = tuple(g)
            if check:
                if len(g) != degree:
                    raise DegreeMismatch(f"generator of degree {len(g)} in a group of degree {degree}")
                check_perm(g, degree)
            gens.append(g)
        self.generators: tuple[Perm, ...] = tuple(gens)
        self._chains: dict[tuple[int, ...], StabChain] = {}

    def __repr__(self) -> str:
        gens = ", ".join(to_cycles(g) for g in self.generators[:4])
        more = "..." if len(self.generators) > 4 else ""
        return f"PermGroup(degree={self.degree}, <{gens}{more}>)"

    @property
    def chain(self) -> StabChain:
        return self.chain_with_base(())

    def chain_with_base(self, prefix: Sequence[int]) -> StabChain:
        key = tuple(prefix)
        ch = self._chains.get(key)
        if ch is None:
            ch = StabChain(self.degree, self.generators, key)
            self._chains[key] = ch
        return ch

    @property
    def order(self) -> int:
        return self.chain.order

    def __contains__(self, g: Sequence[int]) -> bool:
        return self.chain.contains(tuple(g))

    def is_trivial(self) -> bool:
        return all(is_identity(g) for g in self.generators)

    def identity(self) -> Perm:
        return identity(self.degree)

    def elements(self) -> Iterator[Perm]:
        """All elements, as products u_r ... u_1 of transversal elements."""
        trans = self.chain.transversals()
        for combo in itertools.product(*reversed(trans)):
            yield mul_all(combo, self.degree)

    def random_element(self, rng) -> Perm:
        g = self.identity()
        for t in reversed(self.chain.transversals()):
            g = mul(g, t[int(rng.integers(len(t)))])
        return g

    def orbit(self, x: int) -> list[int]:
        seen = {x}
        queue = [x]
        for y in queue:
            for g in self.generators:
                z = g[y]
                if z not in seen:
                    seen.add(z)
                    queue.append(z)
        return sorted(seen)

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbit(0)) == self.degree

    def same_group(self, other: "PermGroup") -> bool:
        return (
            self.degree == other.degree
            and self.order == other.order
            and all(g in other for g in self.generators)
        )

    def conjugate(self, f: Perm) -> "PermGroup":
        """f^-1 G f."""
        return PermGroup(self.degree, [conj(g, f) for g in self.generators], check=False)


def build_chain(G: PermGroup) -> PermGroup:
    G.chain  # noqa: B018 - builds and caches
    return G


def membership(G: PermGroup, sigma: Sequence[int]) -> Word | None:
    sigma = tuple(sigma)
    if len(sigma) != G.degree:
        raise DegreeMismatch(f"permutation of degree {len(sigma)} vs group of degree {G.degree}")
    return G.chain.word_for(sigma)


def pointwise_stabilizer(G: PermGroup, B: Iterable[int]) -> PermGroup:
    B = sorted(set(B))
    if not B:
        return G
    ch = G.chain_with_base(B)
    return PermGroup(G.degree, ch.stabilizer_gens(len(B)), check=False)


def augmented(G: PermGroup, images: Sequence[Perm], d: int) -> PermGroup:
    """The group generated by (g, a(g)) on the disjoint union of both domains."""
    m = G.degree
    gens = [tuple(g) + tuple(m + x for x in a) for g, a in zip(G.generators, images)]
    return PermGroup(m + d, gens, check=False)


def action_kernel(G: PermGroup, action: Sequence[Perm] | dict) -> PermGroup:
    """Kernel of the action given by images of the generators.

    The map is a homomorphism exactly when the group generated by the pairs
    (g, a(g)) projects isomorphically onto G, so the check is an order test.
    """
    images = [tuple(action[g]) for g in G.generators] if isinstance(action, dict) else [tuple(a) for a in action]
    if len(images) != len(G.generators):
        raise NotAHomomorphism("one image per generator required")
    d = len(images[0]) if images else 0
    if G.is_trivial():
        return PermGroup(G.degree, [], check=False)
    A = augmented(G, images, d)
    if A.order != G.order:
        raise NotAHomomorphism("generator images do not define a homomorphism")
    m = G.degree
    K = pointwise_stabilizer(A, range(m, m + d))
    return PermGroup(m, [g[:m] for g in K.generators], check=False)


def action_image(G: PermGroup, action: Sequence[Perm]) -> PermGroup:
    d = len(action[0]) if action else 0
    return PermGroup(d, action, check=False)


def normal_closure(G: PermGroup, S: Iterable[Sequence[int]]) -> PermGroup:
    S = [tuple(s) for s in S]
    for s in S:
        if s not in G:
            raise ElementNotInGroup(f"{to_cycles(s)} is not in the group")
    gens = [s for s in S if not is_identity(s)]
    N = PermGroup(G.degree, gens, check=False)
    changed = True
    while changed:
        changed = False
        for g in G.generators:
            for n in list(N.generators):
                c = conj(n, g)
                if c not in N:
                    gens.append(c)
                    N = PermGroup(G.degree, gens, check=False)
                    changed = True
    return N


def reduce_generators(G: PermGroup, extra: Iterable[Perm] = ()) -> PermGroup:
    """Non-redundant generating sequence: keep a candidate only when it lies
    outside the group generated by those kept so far."""
    target = G.order
    kept: list[Perm] = []
    cur = PermGroup(G.degree, [], check=False)
    for g in itertools.chain(G.generators, extra):
        if cur.order == target:
            break
        if g not in cur:
            kept.append(g)
            cur = PermGroup(G.degree, kept, check=False)
    return cur


def is_perm_isomorphism(G: PermGroup, H: PermGroup, f: Sequence[int]) -> bool:
    f = tuple(f)
    if G.degree != H.degree or len(f) != G.degree:
        raise DegreeMismatch("degrees must agree")
    if sorted(f) != list(range(G.degree)):
        return False
    if G.order != H.order:
        return False
    if not all(conj(g, f) in H for g in G.generators):
        return False
    finv = inv(f)
    return all(conj(h, finv) in G for h in H.generators)


def set_orbit(G: PermGroup, S: Iterable[int]) -> tuple[list[frozenset[int]], list[Perm], PermGroup]:
    """Orbit of the set S, a transversal (t_i maps S to the i-th orbit element)
    and the setwise stabilizer of S."""
    S0 = frozenset(S)
    index = {S0: 0}
    orbit = [S0]
    trans = [G.identity()]
    acts: list[list[int]] = [[] for _ in G.generators]
    for i, T in enumerate(orbit):
        for gi, g in enumerate(G.generators):
            U = frozenset(g[x] for x in T)
            j = index.get(U)
            if j is None:
                j = len(orbit)
                index[U] = j
                orbit.append(U)
                trans.append(mul(trans[i], g))
            acts[gi].append(j)
    if len(orbit) == 1:
        return orbit, trans, G
    images = [tuple(a) for a in acts]
    A = augmented(G, images, len(orbit))
    m = G.degree
    ch = A.chain_with_base([m])
    stab = PermGroup(m, [g[:m] for g in ch.stabilizer_gens(1)], check=False)
    return orbit, trans, stab


def check_degree_cap(m: int, cap: int | None = MAX_DEGREE) -> None:
    if cap is not None and m > cap:
        raise DegreeCapExceeded(f"degree {m} exceeds the cap of {cap}")


# --------------------------------------------------------------------------
# file format


def format_permgroup(G: PermGroup) -> str:
    lines = [f"permgroup {G.degree} {len(G.generators)}"]
    lines.extend(" ".join(str(x + 1) for x in g) for g in G.generators)
    return "\n".join(lines) + "\n"


def parse_permgroup_lines(lines: list[str], cap: int | None = MAX_DEGREE) -> PermGroup:
    header = lines[0].split()
    if len(header) != 3 or header[0] != "permgroup":
        raise ValidationFailed(f"expected 'permgroup <m> <k>', got {lines[0]!r}")
    m, k = int(header[1]), int(header[2])
    check_degree_cap(m, cap)
    if len(lines) - 1 != k:
        raise ValidationFailed(f"expected {k} generator lines, got {len(lines) - 1}")
    gens = [parse_perm(ln, m) for ln in lines[1:]]
    return PermGroup(m, gens)


def element_mapping(G: PermGroup, points: Sequence[int], images: Sequence[int]) -> Perm | None:
    """Some g in G with points[i]^g = images[i] for all i, or None."""
    if not points:
        return G.identity()
    ch = G.chain_with_base(list(points))
    targets = list(images)
    vs = []
    for j in range(len(points)):
        u = ch.levels[j].transversal.get(targets[j])
        if u is None:
            return None
        vs.append(u)
        ui = inv(u)
        targets = [ui[t] for t in targets]
    return mul_all(reversed(vs), G.degree)


def restrict(G: PermGroup, points: Sequence[int]) -> PermGroup:
    """Action of G on an invariant point set, relabeled to 0..len-1 in the given order."""
    where = {x: i for i, x in enumerate(points)}
    return PermGroup(len(points), [tuple(where[g[x]] for x in points) for g in G.generators], check=False)


def symmetric_group(m: int) -> PermGroup:
    if m <= 1:
        return PermGroup(m, [], check=False)
    cyc = tuple((i + 1) % m for i in range(m))
    tr = (1, 0) + tuple(range(2, m))
    return PermGroup(m, [cyc, tr] if m > 2 else [tr], check=False)


def cycle_type(p: Perm) -> tuple[int, ...]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                length += 1
            out.append(length)
    return tuple(sorted(out))
