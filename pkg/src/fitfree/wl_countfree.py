"""Count-free Weisfeiler-Leman refinement on Cayley tables and the pebble game.

Colors of k-tuples start from their atomic type (which products and
equalities hold among the entries, and which entries are pinned).  A round
replaces the color of u by the pair (old color, set of (atp(u, g),
color(u[g/1]), ..., color(u[g/k])) over g), where atp(u, g) records the
product relations that involve all three of u_1, u_2, g (needed only when
k = 2; for k >= 3 they are seen by the substituted tuples).  Colors are
interned jointly over the groups being compared, with ids given by the rank
of the sorted signatures, so they are invariant under relabeling.

Spoiler wins the (k+1)-pebble game in R rounds from the empty position iff
the sets of colors of diagonal tuples (g, ..., g) differ after R - 1 rounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, NotFittingFree
from .group_core import CayleyGroup

TUPLE_BUDGET = 400_000_000
CHUNK_ENTRIES = 1 << 21
SENTINEL = np.iinfo(np.int64).max


@dataclass
class ColoringState:
    k: int
    round: int
    colors: np.ndarray  # flattened over (n,) * k
    individualized: tuple[int, ...] = ()
    stable: bool = False

    @property
    def num_colors(self) -> int:
        return int(np.unique(self.colors).size)

    def diagonal_colors(self, n: int) -> set[int]:
        step = sum(n**i for i in range(self.k))
        return set(int(c) for c in self.colors[np.arange(n) * step])


@dataclass
class WLVerdict:
    distinguished: bool
    round: int | None  # game rounds Spoiler needs, when distinguished
    rounds_used: int
    pins: list[tuple[int, int]] = field(default_factory=list)
    pins_tried: int = 0

    @property
    def label(self) -> str:
        return "Distinguished" if self.distinguished else "NotDistinguishedWithinBudget"


def _check_budget(n: int, k: int) -> None:
    if k not in (2, 3):
        raise BudgetExceeded("dimension k must be 2 or 3")
    if n**k > TUPLE_BUDGET:
        raise BudgetExceeded(f"n^k = {n ** k} exceeds {TUPLE_BUDGET}")


def _coords(idx: np.ndarray, n: int, k: int) -> list[np.ndarray]:
    return list(np.unravel_index(idx, (n,) * k))


def _atomic_keys(G: CayleyGroup, k: int, pins: Sequence[int]) -> np.ndarray:
    """Atomic type of every k-tuple: packed relation bits, then one pin id per position."""
    n = G.n
    idx = np.arange(n**k)
    x = _coords(idx, n, k)
    T = G.table
    key = np.zeros(n**k, dtype=np.int64)
    bit = 0
    for i, j, l in itertools.product(range(k), repeat=3):
        key |= (T[x[i], x[j]] == x[l]).astype(np.int64) << bit
        bit += 1
    for i, j in itertools.combinations(range(k), 2):
        key |= (x[i] == x[j]).astype(np.int64) << bit
        bit += 1
    if not pins:
        return key[:, None]
    pin_id = np.zeros(n, dtype=np.int64)
    for c, p in reversed(list(enumerate(pins))):
        pin_id[p] = c + 1
    return np.stack([key] + [pin_id[x[i]] for i in range(k)], axis=1)


def _rank(keys: list[np.ndarray]) -> list[np.ndarray]:
    """Joint dense ranks of key rows."""
    width = max(k_.shape[1] for k_ in keys)
    keys = [np.pad(k_, ((0, 0), (0, width - k_.shape[1]))) for k_ in keys]
    allk = np.concatenate(keys)
    if width == 1:
        _, inv = np.unique(allk[:, 0], return_inverse=True)
    else:
        _, inv = np.unique(allk, axis=0, return_inverse=True)
    inv = inv.ravel()
    out, pos = [], 0
    for k_ in keys:
        out.append(inv[pos : pos + len(k_)].astype(np.int64))
        pos += len(k_)
    return out


def _triple_bits(G: CayleyGroup, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Six relations among (a, b, g) for every g; shape (len(a), n)."""
    T = G.table
    g = np.arange(G.n)[None, :]
    a_, b_ = a[:, None], b[:, None]
    bits = [
        T[a, b][:, None] == g,
        T[b, a][:, None] == g,
        T[a_, g] == b_,
        T[g, a_] == b_,
        T[b_, g] == a_,
        T[g, b_] == a_,
    ]
    out = np.zeros((len(a), G.n), dtype=np.int64)
    for i, m in enumerate(bits):
        out |= m.astype(np.int64) << i
    return out


def _signatures(
    G: CayleyGroup, k: int, colors: np.ndarray, idx: np.ndarray, width: int, seen: dict[bytes, int]
) -> np.ndarray:
    """Provisional ids of the canonical signatures (old color + sorted neighbor set) of the tuples idx."""
    n = G.n
    shift = [n ** (k - 1 - i) for i in range(k)]
    out = np.empty(len(idx), dtype=np.int64)
    rows = max(1, CHUNK_ENTRIES // n)
    g = np.arange(n, dtype=np.int64)[None, :]
    for s in range(0, len(idx), rows):
        part = idx[s : s + rows]
        x = _coords(part, n, k)
        key = np.zeros((len(part), n), dtype=np.int64)
        off = 0
        for i in range(k):
            sub = part[:, None] - x[i][:, None] * shift[i] + g * shift[i]
            key |= colors[sub] << off
            off += width
        if k == 2:
            key |= _triple_bits(G, x[0], x[1]) << off
        key.sort(axis=1)
        dup = np.zeros_like(key, dtype=bool)
        dup[:, 1:] = key[:, 1:] == key[:, :-1]
        key[dup] = SENTINEL
        key.sort(axis=1)
        full = np.ascontiguousarray(np.concatenate([colors[part][:, None], key], axis=1))
        rowview = full.view(np.dtype((np.void, full.dtype.itemsize * full.shape[1]))).ravel()
        uniq, first, inv = np.unique(rowview, return_index=True, return_inverse=True)
        ids = np.array([seen.setdefault(full[i].tobytes(), len(seen)) for i in first], dtype=np.int64)
        out[s : s + len(part)] = ids[inv.ravel()]
    return out


def _refine(groups: Sequence[CayleyGroup], k: int, colors: Sequence[np.ndarray], diag_only: bool = False) -> list[np.ndarray]:
    ncol = max(int(c.max()) for c in colors) + 1
    width = max(1, ncol.bit_length())
    if k * width + (6 if k == 2 else 0) > 63:
        raise BudgetExceeded("too many colors to pack a signature")
    seen: dict[bytes, int] = {}
    tmp = []
    for G, c in zip(groups, colors):
        n = G.n
        if diag_only:
            step = sum(n**i for i in range(k))
            idx = np.arange(n, dtype=np.int64) * step
        else:
            idx = np.arange(n**k, dtype=np.int64)
        tmp.append(_signatures(G, k, c, idx, width, seen))
    # final ids are ranks of the sorted signatures, hence labeling invariant
    keys = list(seen)
    order = sorted(range(len(keys)), key=keys.__getitem__)
    rank = np.empty(len(keys), dtype=np.int64)
    rank[order] = np.arange(len(keys))
    return [rank[t] for t in tmp]


def _initial(groups: Sequence[CayleyGroup], k: int, pins: Sequence[Sequence[int]]) -> list[np.ndarray]:
    return _rank([_atomic_keys(G, k, p) for G, p in zip(groups, pins)])


def wl_refine(G: CayleyGroup, k: int = 2, max_rounds: int = 20, individualized: Sequence[int] = ()) -> ColoringState:
    _check_budget(G.n, k)
    (c,) = _initial([G], k, [tuple(individualized)])
    r = 0
    stable = False
    while r < max_rounds:
        (nc,) = _refine([G], k, [c])
        r += 1
        if np.unique(nc).size == np.unique(c).size:
            stable = True
            c = nc
            break
        c = nc
    return ColoringState(k, r, c, tuple(individualized), stable)


def _diag_set(c: np.ndarray, n: int, k: int) -> set[int]:
    step = sum(n**i for i in range(k))
    return set(int(v) for v in c[np.arange(n) * step])


def distinguish(
    G: CayleyGroup,
    H: CayleyGroup,
    k: int = 2,
    max_rounds: int = 20,
    pins_g: Sequence[int] = (),
    pins_h: Sequence[int] = (),
) -> WLVerdict:
    """Distinguished at round R iff Spoiler wins the (k+1)-pebble game within R rounds."""
    if G.n != H.n:
        return WLVerdict(True, 0, 0)
    _check_budget(G.n, k)
    n = G.n
    groups = [G, H]
    cur = _initial(groups, k, [tuple(pins_g), tuple(pins_h)])
    prev = cur
    for R in range(1, max_rounds + 1):
        if R == 1:
            dg, dh = _diag_set(cur[0], n, k), _diag_set(cur[1], n, k)
        else:
            d = _refine(groups, k, prev, diag_only=True)
            dg, dh = set(d[0].tolist()), set(d[1].tolist())
        if dg != dh:
            return WLVerdict(True, R, R)
        if R == max_rounds:
            break
        if R >= 2:
            nxt = _refine(groups, k, prev)
            if np.unique(np.concatenate(nxt)).size == np.unique(np.concatenate(prev)).size:
                return WLVerdict(False, None, R)
            cur = nxt
        prev = cur
    return WLVerdict(False, None, max_rounds)


# --------------------------------------------------------------------------
# pebble game


@dataclass
class GameResult:
    winner: str
    pebbles: int
    rounds: int


def _partial_iso(G: CayleyGroup, H: CayleyGroup, pairs: Sequence[tuple[int, int]]) -> bool:
    GT, HT = G.table, H.table
    for (x1, y1), (x2, y2) in itertools.product(pairs, repeat=2):
        if (x1 == x2) != (y1 == y2):
            return False
    for (x1, y1), (x2, y2), (x3, y3) in itertools.product(pairs, repeat=3):
        if (GT[x1, x2] == x3) != (HT[y1, y2] == y3):
            return False
    return True


def pebble_game_solve(G: CayleyGroup, H: CayleyGroup, pebbles: int, rounds: int) -> GameResult:
    """Exact value of the pebble game by alternating search over positions."""
    if G.n > 12 or H.n > 12 or pebbles > 4 or rounds > 6:
        raise BudgetExceeded("game tree guard: orders <= 12, pebbles <= 4, rounds <= 6")
    if G.n != H.n:
        return GameResult("Spoiler", pebbles, 0)

    @lru_cache(maxsize=None)
    def spoiler_wins(pos: frozenset, r: int) -> bool:
        if r == 0:
            return False
        bases = [pos - {q} for q in pos]
        if len(pos) < pebbles:
            bases.append(pos)
        for base in dict.fromkeys(bases):
            for x in range(G.n):
                if all(_loses(base | {(x, y)}, r) for y in range(H.n)):
                    return True
            for y in range(H.n):
                if all(_loses(base | {(x, y)}, r) for x in range(G.n)):
                    return True
        return False

    @lru_cache(maxsize=None)
    def _loses(pos: frozenset, r: int) -> bool:
        """Duplicator's answer leading to pos loses (with r - 1 rounds left)."""
        return not _partial_iso(G, H, sorted(pos)) or spoiler_wins(pos, r - 1)

    winner = "Spoiler" if spoiler_wins(frozenset(), rounds) else "Duplicator"
    return GameResult(winner, pebbles, rounds)


# --------------------------------------------------------------------------
# individualize and refine

# generator words evaluated in every simple factor, as sequences over (a, b)
PIN_WORDS = ("a", "b", "ab", "ba", "abb", "aab", "abab")


def _word(G: CayleyGroup, w: str, a: int, b: int) -> int:
    x = 0
    for ch in w:
        x = G.mul(x, a if ch == "a" else b)
    return x


def pin_schedule(G: CayleyGroup, rng_seed: int = 0) -> list[int]:
    """Socle-structured pins first, then the remaining elements in a seeded order."""
    from .gen_enum import generating_pair
    from .socle import decompose_socle

    dec = decompose_socle(G)
    pairs = []
    for V in dec.factors:
        from .ff_iso import _subgroup_cayley

        T = _subgroup_cayley(G, V.elements)
        pr = generating_pair(T)
        pairs.append((int(V.elements[pr[0]]), int(V.elements[pr[1]])))
    pins: list[int] = []
    xs = []
    for w in PIN_WORDS:
        x = 0
        for a, b in pairs:
            x = G.mul(x, _word(G, w, a, b))
        xs.append(x)
        pins.append(x)
    k = len(pairs)
    for t in range(max(1, math.ceil(math.log2(k))) if k > 1 else 0):
        p = 0
        for i, (a, b) in enumerate(pairs):
            if not (i >> t) & 1:
                p = G.mul(p, _word(G, PIN_WORDS[0], a, b))
        pins.append(p)
    rng = np.random.default_rng(rng_seed)
    rest = [int(x) for x in rng.permutation(G.n)]
    return list(dict.fromkeys(pins + rest))


def individualize_and_refine(
    G: CayleyGroup, H: CayleyGroup, k: int = 2, budget: int = 100, max_rounds: int = 20
) -> WLVerdict:
    """Distinguished when some pin p of G is separated from every candidate in H."""
    base = distinguish(G, H, k, max_rounds)
    if base.distinguished:
        return base
    try:
        schedule = pin_schedule(G)
    except NotFittingFree:
        raise
    prof_g = G.element_orders * (G.n + 1) + G.class_sizes
    prof_h = H.element_orders * (H.n + 1) + H.class_sizes
    tried = 0
    for p in schedule:
        if tried >= budget:
            break
        tried += 1
        cands = np.flatnonzero(prof_h == prof_g[p])
        separated = True
        for q in cands:
            v = distinguish(G, H, k, max_rounds, (p,), (int(q),))
            if not v.distinguished:
                separated = False
                break
        if separated:
            return WLVerdict(True, None, max_rounds, [(p, -1)], tried)
    return WLVerdict(False, None, max_rounds, [], tried)
