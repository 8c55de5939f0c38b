"""Command-line front end.

Exit codes: 0 affirmative verdict or success, 1 negative verdict, 2 usage or
validation error.  `--json` prints one JSON document; timing is left out of
it unless `--timing` is given, so reports are byte-identical across thread
counts.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .errors import FitFreeError, UnknownHeader, ValidationFailed
from .parallel import default_threads

EXIT_YES, EXIT_NO, EXIT_USAGE = 0, 1, 2
HEADERS = ("cayley", "permgroup", "code2", "tcode")


class Usage(Exception):
    pass


@dataclass
class RunReport:
    subcommand: str
    inputs: dict[str, str] = field(default_factory=dict)  # file -> sha256 of its bytes
    verdict: str = ""
    witness: Any = None
    details: dict[str, Any] = field(default_factory=dict)
    bounds: dict[str, Any] = field(default_factory=dict)
    timing: float | None = None

    def to_json(self) -> str:
        d = asdict(self)
        if d["timing"] is None:
            del d["timing"]
        return json.dumps(d, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))


# --------------------------------------------------------------------------
# input


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]


def parse_text(text: str, source: str = "<input>"):
    """Parse by header keyword into the owning module's object."""
    lines = _content_lines(text)
    if not lines:
        raise UnknownHeader(f"{source}: empty input")
    head = lines[0].split()[0]
    try:
        if head == "cayley":
            from .group_core import parse_cayley_lines

            return parse_cayley_lines(lines, name=Path(source).stem)
        if head == "permgroup":
            from .perm_core import parse_permgroup_lines

            return parse_permgroup_lines(lines)
        if head == "code2":
            from .code_reduction import parse_code_lines

            return parse_code_lines(lines)
        if head == "tcode":
            from .twisted_codeq import parse_tcode_lines

            return parse_tcode_lines(lines)
    except ValidationFailed as e:
        raise ValidationFailed(f"{source}: {e}") from e
    except (FitFreeError, ValueError, StopIteration, IndexError) as e:
        raise ValidationFailed(f"{source}: {type(e).__name__}: {e}") from e
    raise UnknownHeader(f"{source}: line 1: unknown header {head!r}; expected one of {', '.join(HEADERS)}")


def parse_input(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ValidationFailed(f"{path}: {e.strerror or e}") from e
    return parse_text(text, path)


def serialize(obj) -> str:
    from .code_reduction import BinaryCode, format_code
    from .group_core import CayleyGroup, format_cayley
    from .perm_core import PermGroup, format_permgroup
    from .twisted_codeq import TwistedCodeInstance, format_tcode

    if isinstance(obj, CayleyGroup):
        return format_cayley(obj)
    if isinstance(obj, PermGroup):
        return format_permgroup(obj)
    if isinstance(obj, BinaryCode):
        return format_code(obj)
    if isinstance(obj, TwistedCodeInstance):
        return format_tcode(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _expect(obj, kind, path: str, what: str):
    if not isinstance(obj, kind):
        raise ValidationFailed(f"{path}: expected a {what} file")
    return obj


def _cayley(path: str):
    from .group_core import CayleyGroup

    return _expect(parse_input(path), CayleyGroup, path, "cayley")


def _permgroup(path: str):
    from .perm_core import PermGroup

    return _expect(parse_input(path), PermGroup, path, "permgroup")


def _perm_arg(text: str, m: int):
    """A permutation in 1-based image form ('2,3,1' or '2 3 1'), cycle form or 'id'."""
    from .perm_core import parse_perm

    try:
        return parse_perm(text, m)
    except ValueError as e:
        raise ValidationFailed(f"bad permutation {text!r}: {e}") from e


def _fmt_perm(p) -> list[int]:
    return [int(x) + 1 for x in p]


def _fmt_perm_text(p) -> str:
    return " ".join(str(x) for x in _fmt_perm(p))


# --------------------------------------------------------------------------
# subcommands; each returns (exit code, report, human lines)


def cmd_iso(a) -> tuple[int, RunReport, list[str]]:
    G, H = _cayley(a.A), _cayley(a.B)
    rep = RunReport("iso", {a.A: _digest(a.A), a.B: _digest(a.B)})
    if a.oracle:
        from .oracle import brute_force_group_iso

        f = brute_force_group_iso(G, H)
        iso = f is not None
        rep.details = {"engine": "oracle"}
        witness = f
    else:
        from .ff_iso import iso_fitting_free

        r = iso_fitting_free(G, H, threads=a.threads, solver=a.solver)
        iso = r.isomorphic
        witness = r.witness
        rep.details = {"engine": "fitting-free", "reason": r.reason, "trail": r.trail}
        rep.bounds = {"diagonal_counts": list(r.stats.diag_counts), "diagonal_bound": r.stats.diag_bound}
    rep.verdict = "isomorphic" if iso else "not isomorphic"
    lines = [rep.verdict]
    if iso and witness is not None:
        rep.witness = [int(v) + 1 for v in witness]
        if a.witness:
            lines.append(" ".join(map(str, rep.witness)))
    elif rep.details.get("reason"):
        lines.append(f"reason: {rep.details['reason']}")
    return (EXIT_YES if iso else EXIT_NO), rep, lines


def cmd_socle(a):
    from .socle import decompose_socle

    G = _cayley(a.file)
    dec = decompose_socle(G, threads=a.threads)
    gens = sorted(set(tuple(int(v) for v in dec.factor_action[g]) for g in G.generators))
    rep = RunReport("socle", {a.file: _digest(a.file)}, verdict="Fitting-free")
    rep.details = {
        "socle_order": dec.socle.count,
        "factor_sizes": [V.count for V in dec.factors],
        "minimal_normals": [[j + 1 for j in js] for js in dec.minimal_normals],
        "pker_order": dec.pker.count,
        "factor_action_generators": [_fmt_perm(g) for g in gens if g != tuple(range(dec.k))],
    }
    d = rep.details
    lines = [
        f"socle order {d['socle_order']}",
        "factor sizes " + " ".join(map(str, d["factor_sizes"])),
        "minimal normal subgroups " + " ".join("{" + ",".join(map(str, js)) + "}" for js in d["minimal_normals"]),
        f"|PKer| {d['pker_order']}",
        "factor action generators " + ("; ".join(" ".join(map(str, g)) for g in d["factor_action_generators"]) or "none"),
    ]
    return EXIT_YES, rep, lines


def cmd_is_fitting_free(a):
    from .socle import is_fitting_free

    G = _cayley(a.file)
    ok = is_fitting_free(G, threads=a.threads)
    rep = RunReport("is-fitting-free", {a.file: _digest(a.file)}, verdict="Fitting-free" if ok else "not Fitting-free")
    return (EXIT_YES if ok else EXIT_NO), rep, [rep.verdict]


def cmd_piso(a):
    from .oracle import brute_force_piso
    from .piso import piso_transitive

    G, H = _permgroup(a.G), _permgroup(a.H)
    rep = RunReport("piso", {a.G: _digest(a.G), a.H: _digest(a.H)})
    if a.oracle:
        els = brute_force_piso(G, H)
        count, first = len(els), (els[0] if els else None)
        listing = els
    else:
        S = piso_transitive(G, H)
        count, first = len(S), S.representative()
        listing = S.listing
    rep.verdict = "nonempty" if count else "empty"
    rep.details = {"count": count}
    lines = [f"count {count}"]
    if first is not None:
        rep.witness = _fmt_perm(first)
        lines.append("representative " + _fmt_perm_text(first))
    if a.list and listing is not None:
        rep.details["elements"] = [_fmt_perm(p) for p in listing]
        lines.extend(_fmt_perm_text(p) for p in listing)
    return (EXIT_YES if count else EXIT_NO), rep, lines


def _trees_as_lists(trees) -> list[list[list[list[int]]]]:
    return [[[[x + 1 for x in b] for b in layer] for layer in t] for t in trees]


def cmd_structure_trees(a):
    from .blocks_trees import canonical_trees, enumerate_structure_trees, structure_tree_bound

    G = _permgroup(a.file)
    if a.oracle:
        from .oracle import brute_force_structure_trees

        raw = brute_force_structure_trees(G)
    else:
        raw = [t.layers for t in enumerate_structure_trees(G, threads=a.threads)]
    trees = canonical_trees(raw)
    out = _trees_as_lists(trees)
    rep = RunReport("structure-trees", {a.file: _digest(a.file)}, verdict=f"{len(out)} trees")
    rep.details = {"trees": out}
    rep.bounds = {"count": len(out), "bound": structure_tree_bound(G.degree)}
    lines = [json.dumps(t, separators=(",", ":")) for t in out]
    return EXIT_YES, rep, lines


def cmd_coset_intersect(a):
    G, H = _permgroup(a.G), _permgroup(a.H)
    m = G.degree
    x, y = _perm_arg(a.x, m), _perm_arg(a.y, m)
    rep = RunReport("coset-intersect", {a.G: _digest(a.G), a.H: _digest(a.H)})
    rep.details = {"x": _fmt_perm(x), "y": _fmt_perm(y)}
    if a.oracle:
        from .oracle import brute_force_coset_intersection

        els = sorted(brute_force_coset_intersection(G, x, H, y))
        rep.verdict = "nonempty" if els else "Empty"
        rep.details["size"] = len(els)
        if els:
            rep.witness = _fmt_perm(els[0])
        lines = [rep.verdict] + ([f"size {len(els)}", "representative " + _fmt_perm_text(els[0])] if els else [])
        return (EXIT_YES if els else EXIT_NO), rep, lines
    from .subcoset import SolveStats, coset_intersect

    stats = SolveStats()
    C = coset_intersect(G, x, H, y, stats)
    if C.is_empty:
        rep.verdict = "Empty"
        return EXIT_NO, rep, ["Empty"]
    rep.verdict = "nonempty"
    rep.witness = _fmt_perm(C.rep)
    gens = [_fmt_perm(g) for g in C.group.generators]
    rep.details.update({"size": len(C), "generators": gens})
    lines = [f"size {len(C)}", "representative " + _fmt_perm_text(C.rep)]
    lines += ["generator " + " ".join(map(str, g)) for g in gens]
    return EXIT_YES, rep, lines


def cmd_twisted_codeq(a):
    from .twisted_codeq import TwistedCodeInstance

    inst = _expect(parse_input(a.file), TwistedCodeInstance, a.file, "tcode")
    rep = RunReport("twisted-codeq", {a.file: _digest(a.file)})
    if a.oracle:
        from .oracle import brute_force_twisted_eq

        els = sorted(brute_force_twisted_eq(inst))
        size, first = len(els), (els[0] if els else None)
    else:
        from .twisted_codeq import DPStats, solve_twisted_codeq

        stats = DPStats()
        C = solve_twisted_codeq(inst, stats, threads=a.threads)
        size = len(C)
        first = min(C.elements()) if size and size <= 10**5 else C.rep
        rep.bounds = {"dp_entries": stats.entries, "intersections": stats.intersections}
    rep.verdict = "equivalent" if size else "not equivalent"
    rep.details = {"size": size}
    lines = [rep.verdict, f"size {size}"]
    if first is not None:
        rep.witness = _fmt_perm(first)
        lines.append("representative " + _fmt_perm_text(first))
    return (EXIT_YES if size else EXIT_NO), rep, lines


def cmd_reduce_code(a):
    from .code_reduction import BinaryCode, build_group_from_code
    from .perm_core import format_permgroup

    C = _expect(parse_input(a.file), BinaryCode, a.file, "code2")
    R = build_group_from_code(C)
    text = format_permgroup(R.group)
    if a.output:
        Path(a.output).write_text(text)
    rep = RunReport("reduce-code", {a.file: _digest(a.file)}, verdict="built")
    rep.details = {"degree": R.group.degree, "order": R.group.order, "generators": len(R.group.generators), "tags": R.tags}
    rep.bounds = {"expected_order": R.expected_order}
    lines = [f"degree {R.group.degree}", f"order {R.group.order}", f"generators {len(R.group.generators)}"]
    if not a.output:
        lines.append(text.rstrip("\n"))
    return EXIT_YES, rep, lines


def cmd_wl(a):
    from .wl_countfree import distinguish, individualize_and_refine
    from .socle import is_fitting_free

    G, H = _cayley(a.A), _cayley(a.B)
    rep = RunReport("wl", {a.A: _digest(a.A), a.B: _digest(a.B)})
    use_pins = a.individualize == "auto" and G.n > 1 and is_fitting_free(G)
    if use_pins:
        v = individualize_and_refine(G, H, a.k, budget=a.budget, max_rounds=a.rounds)
    else:
        v = distinguish(G, H, a.k, a.rounds)
    rep.verdict = v.label
    rep.details = {"k": a.k, "rounds_used": v.rounds_used, "round": v.round, "pins_tried": v.pins_tried}
    lines = [v.label, f"rounds used {v.rounds_used}", f"pins tried {v.pins_tried}"]
    return (EXIT_YES if v.distinguished else EXIT_NO), rep, lines


def cmd_oracle(a):
    a.oracle = True
    if a.what == "code-equiv":
        from .code_reduction import BinaryCode
        from .oracle import brute_force_code_equivalence

        C = _expect(parse_input(a.args[0]), BinaryCode, a.args[0], "code2")
        C2 = _expect(parse_input(a.args[1]), BinaryCode, a.args[1], "code2")
        alpha = brute_force_code_equivalence(C, C2)
        rep = RunReport("oracle code-equiv", {p: _digest(p) for p in a.args[:2]})
        rep.verdict = "equivalent" if alpha is not None else "not equivalent"
        lines = [rep.verdict]
        if alpha is not None:
            rep.witness = _fmt_perm(alpha)
            lines.append("alpha " + _fmt_perm_text(alpha))
        return (EXIT_YES if alpha is not None else EXIT_NO), rep, lines
    names = {
        "iso": ("A", "B"),
        "piso": ("G", "H"),
        "structure-trees": ("file",),
        "coset-intersect": ("G", "x", "H", "y"),
        "twisted-codeq": ("file",),
    }
    if a.what not in names or len(a.args) != len(names[a.what]):
        raise Usage(f"oracle {a.what}: expected arguments {' '.join(names.get(a.what, ()))}")
    for k, v in zip(names[a.what], a.args):
        setattr(a, k, v)
    a.witness = getattr(a, "witness", False)
    a.list = getattr(a, "list", False)
    code, rep, lines = COMMANDS[a.what](a)
    rep.subcommand = f"oracle {a.what}"
    return code, rep, lines


def cmd_catalog(a):
    from .catalog import CATALOG_NAMES, canonical_name, catalog_group
    from .group_core import format_cayley

    names = [canonical_name(n) for n in a.names] if a.names else list(CATALOG_NAMES)
    rep = RunReport("catalog", verdict="written" if a.output else "listed")
    lines = []
    written = {}
    for name in names:
        G = catalog_group(name)
        if a.output:
            os.makedirs(a.output, exist_ok=True)
            fname = name.replace("(", "").replace(")", "").replace(",", "_") + ".cay"
            path = os.path.join(a.output, fname)
            Path(path).write_text(format_cayley(G))
            written[name] = fname
            lines.append(f"{name} {G.n} {path}")
        else:
            lines.append(f"{name} {G.n}")
    rep.details = {"groups": {n: catalog_group(n).n for n in names}, "files": written}
    return EXIT_YES, rep, lines


COMMANDS = {
    "iso": cmd_iso,
    "socle": cmd_socle,
    "is-fitting-free": cmd_is_fitting_free,
    "piso": cmd_piso,
    "structure-trees": cmd_structure_trees,
    "coset-intersect": cmd_coset_intersect,
    "twisted-codeq": cmd_twisted_codeq,
    "reduce-code": cmd_reduce_code,
    "wl": cmd_wl,
    "oracle": cmd_oracle,
    "catalog": cmd_catalog,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise Usage(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print one JSON report")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: FITFREE_THREADS or all cores)")
    common.add_argument("--timing", action="store_true", help="include wall time in the report")
    p = _Parser(prog="fitfree", description="Isomorphism tools for Fitting-free groups")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    s = sub.add_parser("iso", parents=[common], help="isomorphism of two Fitting-free Cayley tables")
    s.add_argument("A")
    s.add_argument("B")
    s.add_argument("--witness", action="store_true", help="print the bijection as n integers")
    s.add_argument("--solver", choices=("group", "dp"), default="group", help="twisted code solver")
    s.add_argument("--oracle", action="store_true", help="use the brute-force oracle")
    for name, text in (("socle", "socle factors and minimal normal subgroups"), ("is-fitting-free", "no nontrivial abelian normal subgroup")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("file")
    s = sub.add_parser("piso", parents=[common], help="permutational isomorphisms of transitive groups")
    s.add_argument("G")
    s.add_argument("H")
    s.add_argument("--list", action="store_true", help="print every bijection")
    s.add_argument("--oracle", action="store_true")
    s = sub.add_parser("structure-trees", parents=[common], help="all structure trees of a transitive group")
    s.add_argument("file")
    s.add_argument("--oracle", action="store_true")
    s = sub.add_parser("coset-intersect", parents=[common], help="G x n H y")
    for n in ("G", "x", "H", "y"):
        s.add_argument(n)
    s.add_argument("--oracle", action="store_true")
    s = sub.add_parser("twisted-codeq", parents=[common], help="twisted equivalences between two codes")
    s.add_argument("file")
    s.add_argument("--oracle", action="store_true")
    s = sub.add_parser("reduce-code", parents=[common], help="permutation group built from a binary code")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s = sub.add_parser("wl", parents=[common], help="count-free WL distinguishability")
    s.add_argument("A")
    s.add_argument("B")
    s.add_argument("--k", type=int, default=2, help="tuple length (2 or 3)")
    s.add_argument("--rounds", type=int, default=20)
    s.add_argument("--individualize", choices=("auto", "none"), default="auto", help="pin elements when plain refinement fails")
    s.add_argument("--budget", type=int, default=100, help="pin budget")
    s = sub.add_parser("oracle", parents=[common], help="brute-force references")
    s.add_argument("what", choices=("iso", "piso", "structure-trees", "coset-intersect", "twisted-codeq", "code-equiv"))
    s.add_argument("args", nargs="*")
    s = sub.add_parser("catalog", parents=[common], help="built-in groups as Cayley files")
    s.add_argument("names", nargs="*")
    s.add_argument("-o", "--output", help="directory to write .cay files into")
    return p


def dispatch(argv: Sequence[str]) -> tuple[int, RunReport | None, list[str]]:
    parser = build_parser()
    try:
        a = parser.parse_args(list(argv))
        if a.cmd is None:
            raise Usage("missing subcommand")
    except Usage as e:
        return EXIT_USAGE, None, [f"usage error: {e}"]
    if a.threads is None:
        a.threads = default_threads()
    a.threads = max(1, a.threads)
    if not hasattr(a, "oracle"):
        a.oracle = False
    t0 = time.perf_counter()
    try:
        code, rep, lines = COMMANDS[a.cmd](a)
    except Usage as e:
        return EXIT_USAGE, None, [f"usage error: {e}"]
    except (FitFreeError, KeyError, OSError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        return EXIT_USAGE, None, [f"error: {type(e).__name__}: {msg}"]
    if a.timing:
        rep.timing = round(time.perf_counter() - t0, 6)
    if a.json:
        return code, rep, [rep.to_json()]
    return code, rep, lines


def main(argv: Sequence[str] | None = None) -> int:
    code, rep, lines = dispatch(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if rep is None else sys.stdout
    for ln in lines:
        print(ln, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
