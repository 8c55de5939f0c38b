"""From binary linear codes to Fitting-free permutation groups.

For a code C <= F_2^N, G_C is the preimage of C under the coordinatewise sign
map S_5^N -> F_2^N.  It is generated by two generators of A_5 in each block of
five points together with one element sigma_i per basis vector v_i, where
sigma_i is the transposition (1 2) in every block j with (v_i)_j = 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DependentRows, InvariantViolation, LengthMismatch, MalformedInstance
from .perm_core import Perm, PermGroup, from_cycles, is_perm_isomorphism

BLOCK = 5
A5_GENS = ("(1 2 3 4 5)", "(1 2 3)")


def gf2_rank(rows: np.ndarray) -> int:
    M = np.array(rows, dtype=np.uint8) % 2
    if M.size == 0:
        return 0
    r = 0
    for c in range(M.shape[1]):
        piv = next((i for i in range(r, M.shape[0]) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        for i in range(M.shape[0]):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        r += 1
        if r == M.shape[0]:
            break
    return r


@dataclass(frozen=True, eq=False)
class BinaryCode:
    N: int
    basis: np.ndarray  # k x N over {0, 1}

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.uint8).reshape(-1, self.N)
        object.__setattr__(self, "basis", b)
        if self.N < 1:
            raise MalformedInstance("code length must be positive")
        if not np.isin(b, (0, 1)).all():
            raise MalformedInstance("basis entries must be 0 or 1")
        if gf2_rank(b) != b.shape[0]:
            raise DependentRows("basis rows are linearly dependent over F_2")

    @property
    def k(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def codewords(self) -> frozenset[tuple[int, ...]]:
        out = set()
        for coeffs in itertools.product((0, 1), repeat=self.k):
            v = np.zeros(self.N, dtype=np.uint8)
            for c, row in zip(coeffs, self.basis):
                if c:
                    v ^= row
            out.add(tuple(int(x) for x in v))
        return frozenset(out)

    def permuted(self, alpha: Sequence[int]) -> frozenset[tuple[int, ...]]:
        """Codewords after moving coordinate j to alpha[j]."""
        out = set()
        for v in self.codewords:
            w = [0] * self.N
            for j, x in enumerate(v):
                w[alpha[j]] = x
            out.add(tuple(w))
        return frozenset(out)

    def same_code(self, other: "BinaryCode") -> bool:
        return self.N == other.N and self.codewords == other.codewords


def parse_code_lines(lines: list[str]) -> BinaryCode:
    lines = [l.strip() for l in lines if l.strip() and not l.strip().startswith("#")]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "code2":
        raise MalformedInstance("expected 'code2 <k> <N>'")
    k, N = int(head[1]), int(head[2])
    rows = lines[1 : 1 + k]
    if len(rows) != k or any(len(r) != N or set(r) - {"0", "1"} for r in rows):
        raise MalformedInstance(f"expected {k} rows of {N} binary digits")
    basis = np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).reshape(k, N)
    return BinaryCode(N, basis)


def format_code(C: BinaryCode) -> str:
    rows = ["".join(str(int(x)) for x in row) for row in C.basis]
    return "\n".join([f"code2 {C.k} {C.N}"] + rows) + "\n"


@dataclass
class ReducedGroup:
    group: PermGroup
    code: BinaryCode
    tags: list[str] = field(default_factory=list)

    @property
    def expected_order(self) -> int:
        return 60**self.code.N * 2**self.code.k


def _shift(p: Perm, j: int, degree: int) -> Perm:
    img = list(range(degree))
    for i, x in enumerate(p):
        img[BLOCK * j + i] = BLOCK * j + x
    return tuple(img)


def build_group_from_code(C: BinaryCode, verify: bool = True) -> ReducedGroup:
    N = C.N
    degree = BLOCK * N
    gens, tags = [], []
    a5 = [from_cycles(c, BLOCK) for c in A5_GENS]
    for j in range(N):
        for name, g in zip(A5_GENS, a5):
            gens.append(_shift(g, j, degree))
            tags.append(f"block {j + 1} {name}")
    t12 = from_cycles("(1 2)", BLOCK)
    for i, row in enumerate(C.basis):
        img = list(range(degree))
        for j in range(N):
            if row[j]:
                img[BLOCK * j], img[BLOCK * j + 1] = BLOCK * j + t12[0], BLOCK * j + t12[1]
        gens.append(tuple(img))
        tags.append(f"sigma {i + 1}")
    R = ReducedGroup(PermGroup(degree, gens), C, tags)
    if len(gens) != 2 * N + C.k:
        raise InvariantViolation("generator count must be 2N + k")
    if verify and R.group.order != R.expected_order:
        raise InvariantViolation(f"|G_C| = {R.group.order}, expected {R.expected_order}")
    return R


def block_bijection(alpha: Sequence[int]) -> Perm:
    """The point bijection moving block j onto block alpha[j] pointwise."""
    img = [0] * (BLOCK * len(alpha))
    for j, a in enumerate(alpha):
        for t in range(BLOCK):
            img[BLOCK * j + t] = BLOCK * a + t
    return tuple(img)


@dataclass
class SoundnessReport:
    equivalent: bool
    alpha: tuple[int, ...] | None
    perm_isomorphic: bool | None  # block bijection of alpha is a permutational isomorphism
    abstract_isomorphic: bool | None  # None when the groups are too large to tabulate

    @property
    def consistent(self) -> bool:
        checks = [c for c in (self.perm_isomorphic, self.abstract_isomorphic) if c is not None]
        return all(c == self.equivalent for c in checks)


CAYLEY_LIMIT = 7200


def reduction_soundness_check(C: BinaryCode, C2: BinaryCode, abstract: bool = True) -> SoundnessReport:
    from .oracle import brute_force_code_equivalence

    if C.N != C2.N:
        raise LengthMismatch("codes must have equal length")
    alpha = brute_force_code_equivalence(C, C2)
    G, H = build_group_from_code(C).group, build_group_from_code(C2).group
    perm_iso = None
    if alpha is not None:
        perm_iso = is_perm_isomorphism(G, H, block_bijection(alpha))
    abst = None
    if abstract and G.order <= CAYLEY_LIMIT and H.order <= CAYLEY_LIMIT:
        from .ff_iso import iso_fitting_free
        from .group_core import group_from_permutations

        GC = group_from_permutations(G.generators, G.degree)[0]
        HC = group_from_permutations(H.generators, H.degree)[0]
        abst = iso_fitting_free(GC, HC).isomorphic
    return SoundnessReport(alpha is not None, alpha, perm_iso, abst)
