"""Subcosets and coset intersection by divide and conquer over a rectangle.

Problem II: given L acting on Gamma x Delta in product form (L is stored as
a permutation group on the disjoint union Gamma + Delta), a permutation z of
the same form, a set Pi of pairs and a rectangle Theta = Phi x Psi stabilized
by L, compute { x in Lz : (Pi n Theta)^x = Pi n Theta^x }.  Coset
intersection Gx n Hy is the case L = G x H, z = (x, y), Pi = the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegreeMismatch, InvariantViolation
from .perm_core import (
    MAX_DEGREE,
    Perm,
    PermGroup,
    check_degree_cap,
    identity,
    inv,
    mul,
    reduce_generators,
    set_orbit,
)


@dataclass(frozen=True, eq=False)
class Subcoset:
    """Empty (group is None) or the coset group * rep."""

    group: PermGroup | None
    rep: Perm | None

    @staticmethod
    def empty() -> "Subcoset":
        return EMPTY

    @property
    def is_empty(self) -> bool:
        return self.group is None

    def __len__(self) -> int:
        return 0 if self.group is None else self.group.order

    @property
    def size(self) -> int:
        return len(self)

    def __contains__(self, g: Sequence[int]) -> bool:
        if self.group is None:
            return False
        return mul(tuple(g), inv(self.rep)) in self.group

    def elements(self):
        if self.group is None:
            return
        for k in self.group.elements():
            yield mul(k, self.rep)

    def same_as(self, other: "Subcoset") -> bool:
        if self.is_empty or other.is_empty:
            return self.is_empty and other.is_empty
        return self.group.same_group(other.group) and self.rep in other

    def __repr__(self) -> str:
        if self.group is None:
            return "Subcoset(empty)"
        return f"Subcoset(order={self.group.order}, rep={self.rep})"


EMPTY = Subcoset(None, None)


def merge_cosets(cosets: Sequence[Subcoset], degree: int) -> Subcoset:
    """Union of cosets known to form a single coset, by balanced pairwise merges."""
    items = [c for c in cosets if not c.is_empty]
    if not items:
        return EMPTY
    while len(items) > 1:
        nxt = []
        for i in range(0, len(items) - 1, 2):
            a, b = items[i], items[i + 1]
            if b.rep in a:
                gens = a.group.generators + b.group.generators
            else:
                gens = a.group.generators + b.group.generators + (mul(b.rep, inv(a.rep)),)
            grp = reduce_generators(PermGroup(degree, gens, check=False))
            nxt.append(Subcoset(grp, a.rep))
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


# --------------------------------------------------------------------------
# Problem II


@dataclass
class SolveStats:
    calls: int = 0
    max_depth: int = 0
    depth_bound: int = 0
    violations: int = 0


@dataclass
class ProblemII:
    L: PermGroup
    z: Perm
    Pi: frozenset[tuple[int, int]]
    Phi: tuple[int, ...]
    Psi: tuple[int, ...]
    n_gamma: int  # |Gamma|; Delta points sit at n_gamma + j in L's domain


def _is_pow2(k: int) -> bool:
    return k > 0 and k & (k - 1) == 0


def _check_instance(inst: ProblemII) -> None:
    if not (_is_pow2(len(inst.Phi)) and _is_pow2(len(inst.Psi))):
        raise InvariantViolation("rectangle sides must have power-of-two sizes")
    a = inst.n_gamma
    Phi, Psi = set(inst.Phi), {a + j for j in inst.Psi}
    for g in inst.L.generators:
        if {g[x] for x in Phi} != Phi or {g[x] for x in Psi} != Psi:
            raise InvariantViolation("L does not stabilize the rectangle")


def solve_problem_II(inst: ProblemII, stats: SolveStats | None = None) -> Subcoset:
    _check_instance(inst)
    stats = stats if stats is not None else SolveStats()
    stats.depth_bound = int(math.log2(len(inst.Phi))) + int(math.log2(len(inst.Psi)))
    return _solve(inst.L, inst.z, inst.Pi, tuple(sorted(inst.Phi)), tuple(sorted(inst.Psi)), inst.n_gamma, stats, 0)


def _solve(L: PermGroup, z: Perm, Pi, Phi, Psi, a: int, stats: SolveStats, depth: int) -> Subcoset:
    stats.calls += 1
    stats.max_depth = max(stats.max_depth, depth)
    if depth > stats.depth_bound:
        stats.violations += 1
    deg = L.degree
    sPhi, sPsi = set(Phi), set(Psi)
    inside = [p for p in Pi if p[0] in sPhi and p[1] in sPsi]
    zPhi = {z[x] for x in Phi}
    zPsi = {z[a + y] - a for y in Psi}
    inside_z = [p for p in Pi if p[0] in zPhi and p[1] in zPsi]
    if len(inside) != len(inside_z):
        return EMPTY  # case 1
    if not inside:
        return Subcoset(L, z)  # case 2
    if len(inside) == 1:  # case 3
        (pa, pb), (qa, qb) = inside[0], inside_z[0]
        zi = inv(z)
        ta, tb = zi[qa], zi[a + qb]
        ch = L.chain_with_base([pa, a + pb])
        u1 = ch.levels[0].transversal.get(ta)
        if u1 is None:
            return EMPTY
        need = inv(u1)[tb]
        k = ch.levels[1].transversal.get(need)
        if k is None:
            return EMPTY
        l = mul(k, u1)
        stab = PermGroup(deg, ch.stabilizer_gens(2), check=False)
        return Subcoset(stab, mul(l, z))
    # case 4
    if len(Phi) > 1:
        h = len(Phi) // 2
        first = (Phi[:h], Psi)
        second = (Phi[h:], Psi)
        points = Phi[:h]
    else:
        h = len(Psi) // 2
        first = (Phi, Psi[:h])
        second = (Phi, Psi[h:])
        points = tuple(a + y for y in Psi[:h])
    _, trans, M = set_orbit(L, points)
    parts = []
    for t in trans:
        r1 = _solve(M, mul(t, z), Pi, first[0], first[1], a, stats, depth + 1)
        if r1.is_empty:
            continue
        r2 = _solve(r1.group, r1.rep, Pi, second[0], second[1], a, stats, depth + 1)
        if not r2.is_empty:
            parts.append(r2)
    return merge_cosets(parts, deg)


# --------------------------------------------------------------------------
# coset intersection


def _pad(p: Perm, M: int) -> Perm:
    return tuple(p) + tuple(range(len(p), M))


def coset_intersect(
    G: PermGroup,
    x: Sequence[int],
    H: PermGroup,
    y: Sequence[int],
    stats: SolveStats | None = None,
    max_degree: int | None = MAX_DEGREE,
) -> Subcoset:
    """G x n H y as a subcoset of Sym(m)."""
    m = G.degree
    x, y = tuple(x), tuple(y)
    if H.degree != m or len(x) != m or len(y) != m:
        raise DegreeMismatch("groups and representatives must share one degree")
    check_degree_cap(m, max_degree)
    xyi = mul(x, inv(y))
    if G.is_trivial():
        return Subcoset(G, x) if xyi in H else EMPTY
    if H.is_trivial():
        return Subcoset(H, y) if xyi in G else EMPTY
    if G.same_group(H):
        return Subcoset(G, x) if xyi in G else EMPTY
    M = 1 << max(0, (m - 1).bit_length())
    ident = identity(M)
    gens = [_pad(g, M) + tuple(M + i for i in range(M)) for g in G.generators]
    gens += [ident + tuple(M + i for i in _pad(h, M)) for h in H.generators]
    L = PermGroup(2 * M, gens, check=False)
    z = _pad(x, M) + tuple(M + i for i in _pad(y, M))
    Pi = frozenset((i, i) for i in range(m))
    inst = ProblemII(L, z, Pi, tuple(range(M)), tuple(range(M)), M)
    res = solve_problem_II(inst, stats)
    if res.is_empty:
        return EMPTY
    grp = PermGroup(m, [g[:m] for g in res.group.generators], check=False)
    return Subcoset(grp, res.rep[:m])


def intersect_groups(G: PermGroup, H: PermGroup, max_degree: int | None = MAX_DEGREE) -> PermGroup:
    e = G.identity()
    return coset_intersect(G, e, H, e, max_degree=max_degree).group


def intersect_many(cosets: Iterable[Subcoset], degree: int) -> Subcoset:
    """Left-to-right intersection with early exit on the empty set."""
    cur: Subcoset | None = None
    for c in cosets:
        if c.is_empty:
            return EMPTY
        if cur is None:
            cur = c
        elif cur is c:
            continue
        else:
            cur = coset_intersect(cur.group, cur.rep, c.group, c.rep, max_degree=None)
            if cur.is_empty:
                return EMPTY
    return cur if cur is not None else EMPTY
