"""Built-in test groups from explicit permutation presentations."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .group_core import CayleyGroup, direct_product, group_from_permutations, group_from_table
from .perm_core import Perm, PermGroup, from_cycles

# GF(9) = GF(3)[i] / (i^2 + 1); element a + b i has index a + 3 b.


def _gf9_add(x: int, y: int) -> int:
    return (x % 3 + y % 3) % 3 + 3 * ((x // 3 + y // 3) % 3)


def _gf9_mul(x: int, y: int) -> int:
    a, b, c, d = x % 3, x // 3, y % 3, y // 3
    return (a * c - b * d) % 3 + 3 * ((a * d + b * c) % 3)


def _gf9_inv(x: int) -> int:
    return next(y for y in range(1, 9) if _gf9_mul(x, y) == 1)


_OMEGA9 = 1 + 3  # 1 + i generates GF(9)^*
_INF = 9


def _proj9(f) -> Perm:
    """Permutation of the projective line over GF(9) (point 9 is infinity)."""
    return tuple(f(x) for x in range(10))


def _frac(a: int, b: int, c: int, d: int):
    """x -> (a x + b) / (c x + d) over GF(9)."""

    def f(x: int) -> int:
        if x == _INF:
            return _INF if c == 0 else _gf9_mul(a, _gf9_inv(c))
        num = _gf9_add(_gf9_mul(a, x), b)
        den = _gf9_add(_gf9_mul(c, x), d)
        if den == 0:
            return _INF
        return _gf9_mul(num, _gf9_inv(den))

    return f


def _pgl9_gens(extra: str) -> list[Perm]:
    w = _OMEGA9
    w2 = _gf9_mul(w, w)
    neg1 = 2
    gens = [
        _proj9(_frac(1, 1, 0, 1)),  # x + 1
        _proj9(_frac(w2, 0, 0, 1)),  # square multiplier
        _proj9(_frac(0, neg1, 1, 0)),  # -1 / x
    ]
    if extra == "pgl":
        gens.append(_proj9(_frac(w, 0, 0, 1)))
    elif extra == "m10":
        # x -> w x^3 (x^3 is the Frobenius of GF(9))
        def f(x: int) -> int:
            if x == _INF:
                return _INF
            return _gf9_mul(w, _gf9_mul(x, _gf9_mul(x, x)))

        gens.append(_proj9(f))
    return gens


def _psl27_gens() -> list[Perm]:
    def frac(a, b, c, d):
        def f(x):
            if x == 7:
                return 7 if c == 0 else a * pow(c, -1, 7) % 7
            den = (c * x + d) % 7
            if den == 0:
                return 7
            return (a * x + b) * pow(den, -1, 7) % 7

        return tuple(f(x) for x in range(8))

    return [frac(1, 1, 0, 1), frac(2, 0, 0, 1), frac(0, 6, 1, 0)]


def _a5x5() -> list[Perm]:
    a, b = from_cycles("(1 2 3 4 5)", 10), from_cycles("(1 2 3)", 10)
    c, d = from_cycles("(6 7 8 9 10)", 10), from_cycles("(6 7 8)", 10)
    return [a, b, c, d]


PRESENTATIONS: dict[str, tuple[int, list[Perm], int]] = {}


def _register():
    PRESENTATIONS["A5"] = (5, [from_cycles("(1 2 3 4 5)", 5), from_cycles("(1 2 3)", 5)], 60)
    PRESENTATIONS["S5"] = (5, [from_cycles("(1 2 3 4 5)", 5), from_cycles("(1 2)", 5)], 120)
    PRESENTATIONS["A6"] = (6, [from_cycles("(1 2 3 4 5)", 6), from_cycles("(4 5 6)", 6)], 360)
    PRESENTATIONS["S6"] = (6, [from_cycles("(1 2 3 4 5 6)", 6), from_cycles("(1 2)", 6)], 720)
    PRESENTATIONS["PGL(2,9)"] = (10, _pgl9_gens("pgl"), 720)
    PRESENTATIONS["M10"] = (10, _pgl9_gens("m10"), 720)
    PRESENTATIONS["PSL(2,7)"] = (8, _psl27_gens(), 168)
    PRESENTATIONS["A5xA5"] = (10, _a5x5(), 3600)


_register()

CATALOG_NAMES = tuple(PRESENTATIONS)
_ALIASES = {k.lower().replace("(", "").replace(")", "").replace(",", ""): k for k in PRESENTATIONS}


def canonical_name(name: str) -> str:
    key = name.lower().replace("(", "").replace(")", "").replace(",", "").replace("×", "x")
    if key not in _ALIASES:
        raise KeyError(f"unknown catalog group {name!r}; known: {', '.join(CATALOG_NAMES)}")
    return _ALIASES[key]


def catalog_permgroup(name: str) -> PermGroup:
    degree, gens, order = PRESENTATIONS[canonical_name(name)]
    G = PermGroup(degree, gens)
    if G.order != order:
        raise AssertionError(f"{name}: expected order {order}, got {G.order}")
    return G


@lru_cache(maxsize=None)
def catalog_group(name: str) -> CayleyGroup:
    key = canonical_name(name)
    degree, gens, order = PRESENTATIONS[key]
    G, _ = group_from_permutations(gens, degree, name=key)
    if G.n != order:
        raise AssertionError(f"{key}: expected order {order}, got {G.n}")
    return G


# --------------------------------------------------------------------------
# small groups used by tests


def cyclic(n: int) -> CayleyGroup:
    gen = tuple((i + 1) % n for i in range(n))
    return group_from_permutations([gen], n, name=f"C{n}")[0]


def elementary_abelian_2(k: int) -> CayleyGroup:
    G = cyclic(2)
    for _ in range(k - 1):
        G = direct_product(G, cyclic(2))
    return G


def alternating4_times_c5() -> CayleyGroup:
    a4 = group_from_permutations([from_cycles("(1 2 3)", 4), from_cycles("(2 3 4)", 4)], 4, name="A4")[0]
    return direct_product(a4, cyclic(5), name="A4xC5")


def metacyclic(m: int, s: int, r: int, t: int, name: str = "") -> CayleyGroup:
    """<a, x | a^m = 1, x^s = a^t, x a x^-1 = a^r> on pairs (i, j) = a^i x^j."""
    n = m * s
    table = np.empty((n, n), dtype=np.int64)
    for p in range(n):
        i1, j1 = divmod(p, s)
        for q in range(n):
            i2, j2 = divmod(q, s)
            i = i1 + pow(r, j1, m) * i2
            j = j1 + j2
            if j >= s:
                i, j = i + t, j - s
            table[p, q] = (i % m) * s + j
    return group_from_table(table, name=name)


@lru_cache(maxsize=None)
def small_groups(max_order: int = 12) -> tuple[CayleyGroup, ...]:
    """One group per isomorphism type of order at most 12."""
    c = cyclic
    a4 = group_from_permutations([from_cycles("(1 2 3)", 4), from_cycles("(2 3 4)", 4)], 4, name="A4")[0]
    out = [c(1), c(2), c(3), c(4), direct_product(c(2), c(2), "C2xC2"), c(5), c(6),
           metacyclic(3, 2, -1, 0, "S3"), c(7), c(8), direct_product(c(4), c(2), "C4xC2"),
           elementary_abelian_2(3), metacyclic(4, 2, -1, 0, "D4"), metacyclic(4, 2, -1, 2, "Q8"),
           c(9), direct_product(c(3), c(3), "C3xC3"), c(10), metacyclic(5, 2, -1, 0, "D5"), c(11),
           c(12), direct_product(c(2), c(6), "C2xC6"), metacyclic(6, 2, -1, 0, "D6"), a4,
           metacyclic(6, 2, -1, 3, "Dic3")]
    return tuple(G for G in out if G.n <= max_order)
