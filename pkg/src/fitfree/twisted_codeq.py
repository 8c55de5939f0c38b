"""Twisted code equivalence by dynamic programming over partial strings.

Positions 0..m-1 are grouped by alphabet class (class 0 first).  A twisted
equivalence maps position p of the first code to position pi(p) of the same
class and transforms its letter by a group element attached to the target
position.  Equivalences are encoded as permutations of the composite domain
of (position, letter) pairs, point offset[p] + letter, so that sets of them
are subcosets.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, MalformedInstance, RestrictionNotIsomorphism
from .group_core import CayleyGroup, parse_cayley_lines
from .perm_core import Perm, PermGroup, conj, identity, inv, mul
from .parallel import pmap
from .subcoset import EMPTY, Subcoset, intersect_many, merge_cosets

MAX_LENGTH = 16
MAX_GROUP_TOTAL = 10_000

String = tuple[int, ...]


@dataclass(eq=False)
class TwistedCodeInstance:
    alphabet_sizes: tuple[int, ...]
    lengths: tuple[int, ...]  # k_i, positions per class
    groups: tuple[CayleyGroup, ...]
    actions: tuple[np.ndarray, ...]  # actions[i][g, letter] = letter^g
    code_a: frozenset[String]
    code_b: frozenset[String]

    def __post_init__(self):
        self.alphabet_sizes = tuple(self.alphabet_sizes)
        self.lengths = tuple(self.lengths)
        self.groups = tuple(self.groups)
        self.actions = tuple(np.asarray(a, dtype=np.int64) for a in self.actions)
        self.code_a = frozenset(tuple(s) for s in self.code_a)
        self.code_b = frozenset(tuple(s) for s in self.code_b)

    @property
    def m(self) -> int:
        return sum(self.lengths)

    @cached_property
    def cls(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.lengths) for _ in range(k))

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for p in range(self.m):
            out.append(acc)
            acc += self.alphabet_sizes[self.cls[p]]
        return tuple(out)

    @property
    def degree(self) -> int:
        return sum(k * a for k, a in zip(self.lengths, self.alphabet_sizes))

    @cached_property
    def twist_perms(self) -> tuple[tuple[Perm, ...], ...]:
        """Distinct letter permutations realized by each acting group."""
        out = []
        for act in self.actions:
            seen = dict.fromkeys(tuple(int(v) for v in row) for row in act)
            out.append(tuple(seen))
        return tuple(out)

    def validate(self) -> None:
        r = len(self.alphabet_sizes)
        if not (len(self.lengths) == len(self.groups) == len(self.actions) == r):
            raise MalformedInstance("per-class data has inconsistent lengths")
        for i, (G, act) in enumerate(zip(self.groups, self.actions)):
            if act.shape != (G.n, self.alphabet_sizes[i]):
                raise MalformedInstance(f"action table {i + 1} has shape {act.shape}")
            if not np.array_equal(act[0], np.arange(self.alphabet_sizes[i])):
                raise MalformedInstance(f"identity of group {i + 1} does not act trivially")
            # (x^g)^h = x^(gh)
            lhs = act[:, act]  # lhs[h, g, x] = (x^g)^h
            t = G.table.astype(np.int64)
            rhs = act[t.T]  # rhs[h, g, x] = x^(g h)
            if not np.array_equal(lhs, rhs):
                raise MalformedInstance(f"action {i + 1} is not a group action")
        for name, code in (("A", self.code_a), ("B", self.code_b)):
            for s in code:
                if len(s) != self.m or any(not 0 <= s[p] < self.alphabet_sizes[self.cls[p]] for p in range(self.m)):
                    raise MalformedInstance(f"string {s} of code {name} is not well typed")

    def apply(self, psi: Perm, string: String) -> String:
        """Image of a first-code string under an encoded equivalence."""
        out = [0] * self.m
        decoded = self.decode(psi)
        for p, (q, tw) in enumerate(decoded):
            out[q] = tw[string[p]]
        return tuple(out)

    def decode(self, psi: Perm) -> list[tuple[int, tuple[int, ...]]]:
        """Per source position: (target position, letter map)."""
        where = {}
        for q in range(self.m):
            where[self.offsets[q]] = q
        out = []
        for p in range(self.m):
            a = self.alphabet_sizes[self.cls[p]]
            img0 = psi[self.offsets[p]]
            # target position is the one whose fiber contains img0
            q = max(k for k in range(self.m) if self.offsets[k] <= img0)
            out.append((q, tuple(psi[self.offsets[p] + x] - self.offsets[q] for x in range(a))))
        return out

    def encode(self, pi: Sequence[int], twists: Sequence[Sequence[int]]) -> Perm:
        """pi[p] = target position, twists[q] = letter map attached to target q."""
        img = [0] * self.degree
        for p in range(self.m):
            q = pi[p]
            for x in range(self.alphabet_sizes[self.cls[p]]):
                img[self.offsets[p] + x] = self.offsets[q] + twists[q][x]
        return tuple(img)


@dataclass
class DPStats:
    stage_order: list[int] = field(default_factory=list)
    entries: int = 0
    intersections: int = 0


def _canonical(inst: TwistedCodeInstance, U: Sequence[int], V: Sequence[int]) -> Perm:
    """Order-preserving class-wise map U -> V and complement -> complement."""
    m = inst.m
    img = [0] * inst.degree
    Uc = [p for p in range(m) if p not in set(U)]
    Vc = [p for p in range(m) if p not in set(V)]
    for src, dst in ((sorted(U), sorted(V)), (Uc, Vc)):
        by_cls_dst: dict[int, list[int]] = defaultdict(list)
        for q in dst:
            by_cls_dst[inst.cls[q]].append(q)
        used: dict[int, int] = defaultdict(int)
        for p in src:
            c = inst.cls[p]
            q = by_cls_dst[c][used[c]]
            used[c] += 1
            for x in range(inst.alphabet_sizes[c]):
                img[inst.offsets[p] + x] = inst.offsets[q] + x
    return tuple(img)


def solve_twisted_codeq(
    inst: TwistedCodeInstance, stats: DPStats | None = None, threads: int = 1, validate: bool = True
) -> Subcoset:
    """All twisted equivalences mapping code A onto code B, as a subcoset."""
    if validate:
        inst.validate()
    m = inst.m
    if m > MAX_LENGTH:
        raise BudgetExceeded(f"code length {m} exceeds {MAX_LENGTH}")
    if sum(G.n for G in inst.groups) > MAX_GROUP_TOTAL:
        raise BudgetExceeded("acting groups too large")
    if len(inst.code_a) != len(inst.code_b) or not inst.code_a:
        return EMPTY
    stats = stats if stats is not None else DPStats()
    D = inst.degree
    cls = inst.cls
    twists = inst.twist_perms

    # y: prefix of length l of code A strings; z: (V, letters on sorted V)
    a_by_prefix: dict[tuple, list[String]] = defaultdict(list)
    for s in sorted(inst.code_a):
        for l in range(m + 1):
            a_by_prefix[s[:l]].append(s)

    # reachable pairs, with their admissible (s, twist) moves
    moves: dict[tuple, list[tuple[int, int, list[tuple]]]] = {}
    b_members: dict[tuple, list[String]] = {((), ()): sorted(inst.code_b)}
    stage: list[list[tuple]] = [[] for _ in range(m + 1)]
    root = ((), ((), ()))
    stage[0].append(root)
    seen = {root}
    for l in range(m):
        t = l
        c = cls[t]
        for key in stage[l]:
            y, zk = key
            V, zl = zk
            A_y = a_by_prefix[y]
            B_z = b_members[zk]
            lt = sorted({s[t] for s in A_y})
            count_a = {g: sum(1 for s in A_y if s[t] == g) for g in lt}
            opts = []
            for s_pos in range(m):
                if s_pos in V or cls[s_pos] != c:
                    continue
                count_b: dict[int, int] = defaultdict(int)
                for x in B_z:
                    count_b[x[s_pos]] += 1
                if len(count_b) != len(lt):
                    continue
                for wi, w in enumerate(twists[c]):
                    if any(count_b.get(w[g], 0) != count_a[g] for g in lt):
                        continue
                    kids = []
                    Vn = tuple(sorted(V + (s_pos,)))
                    ins = Vn.index(s_pos)
                    for g in lt:
                        zl_n = zl[:ins] + (w[g],) + zl[ins:]
                        zkn = (Vn, zl_n)
                        if zkn not in b_members:
                            b_members[zkn] = [x for x in B_z if x[s_pos] == w[g]]
                        kid = (y + (g,), zkn)
                        kids.append(kid)
                        if kid not in seen:
                            seen.add(kid)
                            stage[l + 1].append(kid)
                    opts.append((s_pos, wi, kids))
            moves[key] = opts

    full = Subcoset(PermGroup(D, [], check=False), identity(D))
    table: dict[tuple, Subcoset] = {}
    for key in stage[m]:
        table[key] = full
    stats.stage_order.append(m)
    canon_cache: dict[tuple, Perm] = {}

    def canon(U, V):
        k = (tuple(U), tuple(V))
        if k not in canon_cache:
            canon_cache[k] = _canonical(inst, U, V)
        return canon_cache[k]

    def entry(key) -> Subcoset:
        y, (V, _) = key
        l = len(y)
        t = l
        U = tuple(range(l))
        Un = tuple(range(l + 1))
        base = canon(U, V)
        parts = []
        for s_pos, wi, kids in moves[key]:
            J = intersect_many((table[k] for k in kids), D)
            stats.intersections += len(kids)
            if J.is_empty:
                continue
            Vn = tuple(sorted(V + (s_pos,)))
            cn = canon(Un, Vn)
            cn_inv = inv(cn)
            w = twists[cls[t]][wi]
            # d = cn^-1 followed by the desired map, on the fibers of Vn only
            d = list(range(D))
            for q in Vn:
                a = inst.alphabet_sizes[cls[q]]
                p = cn_inv[inst.offsets[q]]
                # p is the first point of the source fiber
                src = max(k for k in range(m) if inst.offsets[k] <= p)
                for x in range(a):
                    if src == t:
                        d[inst.offsets[q] + x] = inst.offsets[s_pos] + w[x]
                    else:
                        d[inst.offsets[q] + x] = base[inst.offsets[src] + x]
            d = tuple(d)
            parts.append(Subcoset(J.group, mul(J.rep, d)))
        return merge_cosets(parts, D)

    for l in range(m - 1, -1, -1):
        keys = stage[l]
        results = pmap(entry, keys, threads)
        for k, r in zip(keys, results):
            table[k] = r
        stats.entries += len(keys)
        stats.stage_order.append(l)
    res = table[root]
    if not res.is_empty:
        img = {inst.apply(res.rep, s) for s in inst.code_a}
        if img != set(inst.code_b):
            raise AssertionError("twisted equivalence failed verification")
    return res


# --------------------------------------------------------------------------
# building codes from group embeddings


def code_of_group_embedding(
    restrictions: Sequence[Sequence[Perm]],
    alphabets: Sequence[dict[Perm, int]],
    chis: Sequence[Perm],
) -> frozenset[String]:
    """String of each element: position p carries the letter chi_p^-1 r chi_p.

    restrictions[e][p] is the restriction of element e to block p, a
    permutation of that block's points; alphabets[p] maps letters (as
    permutations) to letter indices; chis[p] relabels block p's points.
    """
    if not restrictions:
        raise RestrictionNotIsomorphism("empty group")
    code = set()
    for row in restrictions:
        s = []
        for p, r in enumerate(row):
            letter = conj(r, chis[p])
            idx = alphabets[p].get(letter)
            if idx is None:
                raise RestrictionNotIsomorphism(f"restriction at block {p} is not a letter of its alphabet")
            s.append(idx)
        code.add(tuple(s))
    return frozenset(code)


# --------------------------------------------------------------------------
# file format


def parse_tcode_lines(lines: list[str]) -> TwistedCodeInstance:
    it = iter(lines)
    head = next(it).split()
    if len(head) != 2 or head[0] != "tcode":
        raise MalformedInstance("expected 'tcode <r>'")
    r = int(head[1])
    sizes, lengths, groups, actions = [], [], [], []
    for i in range(r):
        al = next(it).split()
        if al[0] != "alphabet" or int(al[1]) != i + 1:
            raise MalformedInstance(f"expected 'alphabet {i + 1} ...'")
        sizes.append(int(al[2]))
        lengths.append(int(al[3]))
        gl = next(it).split()
        if gl[0] != "group" or int(gl[1]) != i + 1:
            raise MalformedInstance(f"expected 'group {i + 1} <order>'")
        n = int(gl[2])
        rows = [next(it) for _ in range(n)]
        groups.append(parse_cayley_lines([f"cayley {n}"] + rows))
        act = [[int(x) - 1 for x in next(it).split()] for _ in range(n)]
        actions.append(np.array(act, dtype=np.int64).reshape(n, sizes[-1]))
    codes = []
    for name in ("codeA", "codeB"):
        cl = next(it).split()
        if cl[0] != name:
            raise MalformedInstance(f"expected '{name} <count>'")
        codes.append(frozenset(tuple(int(x) - 1 for x in next(it).split()) for _ in range(int(cl[1]))))
    inst = TwistedCodeInstance(tuple(sizes), tuple(lengths), tuple(groups), tuple(actions), codes[0], codes[1])
    inst.validate()
    return inst


def format_tcode(inst: TwistedCodeInstance) -> str:
    out = [f"tcode {len(inst.alphabet_sizes)}"]
    for i, (a, k, G, act) in enumerate(zip(inst.alphabet_sizes, inst.lengths, inst.groups, inst.actions)):
        out.append(f"alphabet {i + 1} {a} {k}")
        out.append(f"group {i + 1} {G.n}")
        out.extend(" ".join(str(x + 1) for x in row) for row in G.table.tolist())
        out.extend(" ".join(str(x + 1) for x in row) for row in act.tolist())
    for name, code in (("codeA", inst.code_a), ("codeB", inst.code_b)):
        out.append(f"{name} {len(code)}")
        out.extend(" ".join(str(x + 1) for x in s) for s in sorted(code))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# codes that are groups


def iter_group_code_equivalences(
    inst: TwistedCodeInstance, gens_a: Sequence[String], first_only: bool = False
) -> Iterator[Perm]:
    """Twisted equivalences when both codes are subgroups of a product of letter
    groups and every twist acts by an automorphism.

    Such a map carries code A onto a subgroup of the same order, so it is an
    equivalence iff it sends the generators gens_a into code B.  Positions are
    assigned in order; partial images are checked against projections of B.
    """
    if len(inst.code_a) != len(inst.code_b):
        return
    m = inst.m
    cls = inst.cls
    twists = inst.twist_perms
    B = inst.code_b
    gens = [tuple(g) for g in gens_a]
    proj_cache: dict[tuple[int, ...], set] = {}

    def proj(targets: tuple[int, ...]) -> set:
        if targets not in proj_cache:
            proj_cache[targets] = {tuple(s[q] for q in targets) for s in B}
        return proj_cache[targets]

    pi = [-1] * m
    tw: list[tuple[int, ...] | None] = [None] * m
    used = [False] * m
    found = 0

    def ok(depth: int) -> bool:
        # sources 0..depth-1 are assigned; compare on their sorted targets
        targets = tuple(sorted(pi[p] for p in range(depth)))
        src_of = {pi[p]: p for p in range(depth)}
        P = proj(targets)
        return all(tuple(tw[q][g[src_of[q]]] for q in targets) in P for g in gens)

    def rec(p: int) -> Iterator[Perm]:
        nonlocal found
        if p == m:
            found += 1
            yield inst.encode(pi, tw)
            return
        for q in range(m):
            if used[q] or cls[q] != cls[p]:
                continue
            used[q] = True
            pi[p] = q
            for w in twists[cls[q]]:
                tw[q] = w
                if ok(p + 1):
                    yield from rec(p + 1)
                    if first_only and found:
                        return
            tw[q] = None
            used[q] = False
            pi[p] = -1

    yield from rec(0)
