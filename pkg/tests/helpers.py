"""Shared generators of test inputs."""

from __future__ import annotations

import itertools
import random

import numpy as np

from fitfree.group_core import group_from_permutations
from fitfree.perm_core import PermGroup, from_cycles
from fitfree.twisted_codeq import TwistedCodeInstance


# one PASS/FAIL line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pg(m: int, *cycles: str) -> PermGroup:
    return PermGroup(m, [from_cycles(c, m) for c in cycles])


# fixed sample of transitive groups of degree <= 6
TRANSITIVE_SAMPLE = {
    "C1": (1, ()),
    "C2": (2, ("(1 2)",)),
    "C3": (3, ("(1 2 3)",)),
    "S3": (3, ("(1 2 3)", "(1 2)")),
    "C4": (4, ("(1 2 3 4)",)),
    "V4": (4, ("(1 2)(3 4)", "(1 3)(2 4)")),
    "D4": (4, ("(1 2 3 4)", "(1 3)")),
    "A4": (4, ("(1 2 3)", "(2 3 4)")),
    "S4": (4, ("(1 2 3 4)", "(1 2)")),
    "C5": (5, ("(1 2 3 4 5)",)),
    "D5": (5, ("(1 2 3 4 5)", "(2 5)(3 4)")),
    "F20": (5, ("(1 2 3 4 5)", "(2 3 5 4)")),
    "A5": (5, ("(1 2 3 4 5)", "(1 2 3)")),
    "S5": (5, ("(1 2 3 4 5)", "(1 2)")),
    "C6": (6, ("(1 2 3 4 5 6)",)),
    "S3reg": (6, ("(1 2 3)(4 5 6)", "(1 4)(2 6)(3 5)")),
    "D6": (6, ("(1 2 3 4 5 6)", "(2 6)(3 5)")),
    "A4on6": (6, ("(1 2 3)(4 5 6)", "(1 4)(2 5)")),
    "PSL25": (6, ("(1 2 3 4 5)", "(1 6)(2 5)")),
    "S6": (6, ("(1 2 3 4 5 6)", "(1 2)")),
}

# degree 7 and 8 additions for the structure-tree checks
TRANSITIVE_7_8 = {
    "C7": (7, ("(1 2 3 4 5 6 7)",)),
    "D7": (7, ("(1 2 3 4 5 6 7)", "(2 7)(3 6)(4 5)")),
    "C8": (8, ("(1 2 3 4 5 6 7 8)",)),
    "D8": (8, ("(1 2 3 4 5 6 7 8)", "(2 8)(3 7)(4 6)")),
    "C2^3": (8, ("(1 2)(3 4)(5 6)(7 8)", "(1 3)(2 4)(5 7)(6 8)", "(1 5)(2 6)(3 7)(4 8)")),
    "C2wrC4": (8, ("(1 2)", "(1 3 5 7)(2 4 6 8)")),
    "C2^3:C7": (8, ("(1 2 3 4 5 6 7)", "(1 8)(2 4)(3 7)(5 6)")),
}
STRUCTURE_SAMPLE = list(TRANSITIVE_SAMPLE) + list(TRANSITIVE_7_8) + ["PSL27on8"]


def sample_group(name: str) -> PermGroup:
    if name == "PSL27on8":
        from fitfree.catalog import catalog_permgroup

        return catalog_permgroup("PSL(2,7)")
    m, cyc = {**TRANSITIVE_SAMPLE, **TRANSITIVE_7_8}[name]
    return pg(m, *cyc)


def random_perm(rng: random.Random, m: int) -> tuple[int, ...]:
    p = list(range(m))
    rng.shuffle(p)
    return tuple(p)


def random_subgroup(rng: random.Random, m: int, max_gens: int = 2, min_gens: int = 0) -> PermGroup:
    return PermGroup(m, [random_perm(rng, m) for _ in range(rng.randint(min_gens, max_gens))])


def _group_action(rng: random.Random, a: int):
    """A group of order <= 6 acting on a letters, from random generators."""
    gens = [random_perm(rng, a) for _ in range(rng.randint(0, 2))]
    for cut in (len(gens), 1, 0):
        G, E = group_from_permutations(gens[:cut], a)
        if G.n <= 6:
            return G, E
    raise AssertionError("unreachable")


def random_twisted_instance(rng: random.Random, max_len: int = 5, max_candidates: int = 200_000) -> TwistedCodeInstance:
    """m <= max_len positions, alphabets of size <= 4, acting groups of order <= 6."""
    while True:
        r = rng.randint(1, 2)
        sizes, lens, groups, acts = [], [], [], []
        for _ in range(r):
            a = rng.randint(1, 4)
            G, E = _group_action(rng, a)
            sizes.append(a)
            lens.append(rng.randint(1, 3))
            groups.append(G)
            acts.append(E)
        base = TwistedCodeInstance(sizes, lens, groups, acts, [], [])
        m = base.m
        if m > max_len:
            continue
        count = 1
        for k, tw in zip(lens, base.twist_perms):
            count *= len(list(itertools.permutations(range(k)))) * len(tw) ** k
        if count > max_candidates:
            continue
        strings = list(itertools.product(*[range(sizes[c]) for c in base.cls]))
        A = set(rng.sample(strings, rng.randint(1, min(6, len(strings)))))
        if rng.random() < 0.6:
            pi = list(range(m))
            for c in range(r):
                idx = [p for p in range(m) if base.cls[p] == c]
                sh = idx[:]
                rng.shuffle(sh)
                for p, q in zip(idx, sh):
                    pi[p] = q
            tw = [rng.choice(base.twist_perms[base.cls[q]]) for q in range(m)]
            psi = base.encode(pi, tw)
            B = {base.apply(psi, s) for s in A}
        else:
            B = set(rng.sample(strings, len(A)))
        return TwistedCodeInstance(sizes, lens, groups, acts, A, B)


def all_codes(N: int):
    """Every subspace of F_2^N once, each with the first basis found."""
    from fitfree.code_reduction import BinaryCode
    from fitfree.errors import DependentRows

    vecs = [np.array(v, dtype=np.uint8) for v in itertools.product((0, 1), repeat=N)]
    seen = {}
    for k in range(N + 1):
        for rows in itertools.combinations(vecs[1:], k):
            try:
                C = BinaryCode(N, np.array(rows, dtype=np.uint8).reshape(k, N))
            except DependentRows:
                continue
            seen.setdefault(C.codewords, C)
    return list(seen.values())
