"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

from __future__ import annotations

import contextlib
import itertools
import json
import random

import pytest

from fitfree.blocks_trees import canonical_trees, enumerate_structure_trees, structure_tree_bound
from fitfree.catalog import CATALOG_NAMES, alternating4_times_c5, catalog_group, cyclic, small_groups
from fitfree.cli import dispatch
from fitfree.code_reduction import BinaryCode, block_bijection, build_group_from_code, reduction_soundness_check
from fitfree.ff_iso import IsoStats, iso_fitting_free
from fitfree.group_core import is_isomorphism, random_relabel
from fitfree.oracle import (
    brute_force_coset_intersection,
    brute_force_group_iso,
    brute_force_piso,
    brute_force_structure_trees,
    brute_force_twisted_eq,
)
from fitfree.piso import piso_transitive
from fitfree.subcoset import SolveStats, coset_intersect
from fitfree.twisted_codeq import solve_twisted_codeq
from fitfree.wl_countfree import distinguish, individualize_and_refine, pebble_game_solve

from helpers import (
    ACCEPTANCE_LINES,
    STRUCTURE_SAMPLE,
    TRANSITIVE_SAMPLE,
    all_codes,
    random_perm,
    random_subgroup,
    random_twisted_instance,
    sample_group,
)


@contextlib.contextmanager
def criterion(n: int, title: str):
    try:
        yield
    except BaseException as e:
        ACCEPTANCE_LINES.append(f"[FAIL] criterion {n}: {title} ({type(e).__name__}: {e})")
        raise
    ACCEPTANCE_LINES.append(f"[PASS] criterion {n}: {title}")


# stats of every ff_iso run in this module, checked by criterion 8
ISO_STATS: list[IsoStats] = []


def _iso(G, H):
    st = IsoStats()
    r = iso_fitting_free(G, H, stats=st)
    ISO_STATS.append(st)
    return r


def test_criterion_01_catalog_oracle_equivalence():
    with criterion(1, "catalog pairs agree with the brute-force oracle"):
        groups = {n: catalog_group(n) for n in CATALOG_NAMES}
        for a, b in itertools.combinations_with_replacement(CATALOG_NAMES, 2):
            G, H = groups[a], groups[b]
            r = _iso(G, H)
            oracle = brute_force_group_iso(G, H) is not None
            assert r.isomorphic == oracle, (a, b)
            if r.isomorphic:
                assert is_isomorphism(G, H, r.witness), (a, b)
        for a, b in itertools.combinations(("S6", "PGL(2,9)", "M10"), 2):
            assert not _iso(groups[a], groups[b]).isomorphic


def test_criterion_02_relabeling_soundness(nprng):
    with criterion(2, "5 random relabelings of each catalog group are isomorphic"):
        runs = 0
        for name in CATALOG_NAMES:
            G = catalog_group(name)
            for _ in range(5):
                H, _ = random_relabel(G, nprng)
                r = _iso(G, H)
                assert r.isomorphic and is_isomorphism(G, H, r.witness), name
                runs += 1
        assert runs >= 25


def test_criterion_03_coset_intersection(rng):
    with criterion(3, "100 random coset intersections in S6 match brute force"):
        recursed = 0
        for _ in range(100):
            G, H = random_subgroup(rng, 6, min_gens=1), random_subgroup(rng, 6, min_gens=1)
            x, y = random_perm(rng, 6), random_perm(rng, 6)
            st = SolveStats()
            C = coset_intersect(G, x, H, y, st)
            assert set(C.elements()) == brute_force_coset_intersection(G, x, H, y)
            if st.calls:
                recursed += 1
                assert st.violations == 0 and st.max_depth <= st.depth_bound
        assert recursed >= 50


def test_criterion_04_twisted_code_equivalence(rng):
    with criterion(4, "50 random twisted code instances match brute force"):
        nonempty = 0
        for _ in range(50):
            inst = random_twisted_instance(rng)
            got = set(solve_twisted_codeq(inst).elements())
            want = brute_force_twisted_eq(inst)
            assert got == want
            nonempty += bool(want)
        assert 0 < nonempty < 50


def test_criterion_05_piso_exactness():
    with criterion(5, "PISO of transitive groups of degree <= 6 equals the exhaustive filter"):
        groups = {n: sample_group(n) for n in TRANSITIVE_SAMPLE}
        rng = random.Random(5)
        for a, b in itertools.product(groups, repeat=2):
            G, H = groups[a], groups[b]
            if G.degree != H.degree:
                continue
            if a == b:
                H = H.conjugate(random_perm(rng, H.degree))
            got = piso_transitive(G, H).elements()
            assert sorted(got) == brute_force_piso(G, H), (a, b)
        assert len(brute_force_piso(groups["C4"], groups["C4"])) == 8
        assert len(piso_transitive(groups["C4"], groups["C4"])) == 8
        assert len(brute_force_piso(groups["A5"], groups["A5"])) == 120
        assert len(piso_transitive(groups["A5"], groups["A5"])) == 120


def test_criterion_06_structure_trees():
    with criterion(6, "structure trees of transitive groups of degree <= 8 match exhaustive enumeration"):
        for name in STRUCTURE_SAMPLE:
            G = sample_group(name)
            got = canonical_trees(t.layers for t in enumerate_structure_trees(G))
            want = canonical_trees(brute_force_structure_trees(G))
            assert got == want, name
            assert len(got) <= structure_tree_bound(G.degree)


def test_criterion_07_reduction_invariants():
    with criterion(7, "code reduction: orders, generator counts, basis independence, soundness"):
        for N in (1, 2, 3):
            for C in all_codes(N):
                R = build_group_from_code(C)
                assert R.group.order == 60**N * 2**C.k
                assert len(R.group.generators) == 2 * N + C.k
                if C.k >= 2:
                    other = C.basis.copy()
                    other[0] ^= other[1]
                    R2 = build_group_from_code(BinaryCode(N, other))
                    assert R2.group.same_group(R.group)
        for N in (1, 2):
            codes = [C for C in all_codes(N) if 60**N * 2**C.k <= 7200]
            for C, C2 in itertools.product(codes, repeat=2):
                rep = reduction_soundness_check(C, C2)
                assert rep.abstract_isomorphic is not None
                assert rep.consistent, (C.basis.tolist(), C2.basis.tolist())
                if rep.alpha is not None:
                    G, H = build_group_from_code(C).group, build_group_from_code(C2).group
                    assert G.conjugate(block_bijection(rep.alpha)).same_group(H)


def test_criterion_08_diagonal_bound():
    with criterion(8, "enumerated diagonal counts never exceed |H|^2"):
        if not ISO_STATS:
            for name in CATALOG_NAMES:
                G = catalog_group(name)
                _iso(G, G)
        assert ISO_STATS
        for st in ISO_STATS:
            assert st.bound_respected
            assert all(c <= st.diag_bound for c in st.diag_counts)
        assert any(st.diag_counts for st in ISO_STATS)


def test_criterion_09_wl():
    with criterion(9, "WL soundness on the catalog, game agreement, C4 vs C2xC2, A5 separation"):
        groups = {n: catalog_group(n) for n in CATALOG_NAMES}
        for a, b in itertools.combinations_with_replacement(CATALOG_NAMES, 2):
            G, H = groups[a], groups[b]
            rounds = 2 if max(G.n, H.n) > 200 else 3
            if distinguish(G, H, 2, rounds).distinguished:
                assert brute_force_group_iso(G, H) is None, (a, b)
        small = small_groups(12)
        for G, H in itertools.combinations_with_replacement(small, 2):
            for r in (1, 2, 3):
                wl = distinguish(G, H, 2, r).distinguished
                game = pebble_game_solve(G, H, 3, r).winner == "Spoiler"
                assert wl == game, (G.name, H.name, r)
        C4 = cyclic(4)
        V4 = next(G for G in small if G.name == "C2xC2")
        assert distinguish(C4, V4, 3, 5).distinguished
        assert pebble_game_solve(C4, V4, 4, 5).winner == "Spoiler"
        A5 = catalog_group("A5")
        for other in (cyclic(60), alternating4_times_c5()):
            v = individualize_and_refine(A5, other, 2, budget=100)
            assert v.distinguished and v.pins_tried <= 100


DETERMINISM_CASES = [
    ["iso", "{A5}", "{A5}"],
    ["iso", "{S6}", "{M10}"],
    ["iso", "{A5}", "{A5}", "--oracle"],
    ["socle", "{A5xA5}"],
    ["is-fitting-free", "{S5}"],
    ["piso", "{c4}", "{c4}", "--list"],
    ["structure-trees", "{d4}"],
    ["coset-intersect", "{s4}", "2,1,3,4", "{c4}", "1,2,3,4"],
    ["twisted-codeq", "{tcode}"],
    ["reduce-code", "{code}"],
    ["wl", "{A5}", "{C60}", "--rounds", "4"],
    ["oracle", "piso", "{c4}", "{d4}"],
    ["oracle", "code-equiv", "{code}", "{code}"],
    ["catalog"],
]


@pytest.fixture(scope="module")
def cli_files(tmp_path_factory):
    from fitfree.cli import serialize
    from fitfree.group_core import format_cayley

    d = tmp_path_factory.mktemp("cli")
    files = {}
    for name in ("A5", "S5", "S6", "M10", "A5xA5"):
        p = d / f"{name}.cay"
        p.write_text(format_cayley(catalog_group(name)))
        files[name] = str(p)
    p = d / "C60.cay"
    p.write_text(format_cayley(cyclic(60)))
    files["C60"] = str(p)
    for name, key in (("C4", "c4"), ("D4", "d4"), ("S4", "s4")):
        p = d / f"{key}.pg"
        p.write_text(serialize(sample_group(name)))
        files[key] = str(p)
    p = d / "c.code"
    p.write_text("code2 1 2\n11\n")
    files["code"] = str(p)
    p = d / "i.tcode"
    p.write_text(serialize(random_twisted_instance(random.Random(7))))
    files["tcode"] = str(p)
    return files


def test_criterion_10_determinism(cli_files):
    with criterion(10, "--json output is byte-identical at --threads 1 and --threads 4"):
        for case in DETERMINISM_CASES:
            argv = [a.format(**cli_files) for a in case]
            outs = []
            for t in ("1", "4"):
                code, rep, lines = dispatch(argv + ["--json", "--threads", t])
                assert code in (0, 1), (argv, lines)
                outs.append((code, "\n".join(lines)))
            assert outs[0] == outs[1], argv
            json.loads(outs[0][1])
