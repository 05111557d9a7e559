"""Command-line front end.

Exit codes: 0 for yes/success, 1 for no, 2 for any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from itertools import combinations, product
from pathlib import Path

from . import formats
from .errors import UlamError
from .kcenter import ColoringFamilyConfig, solve_kcenter
from .kmedian import PairSchemeString, hamming, kernelize, pair_scheme_encode, solve_kmedian
from .oracles import brute_kcenter, brute_kmedian, verify_center_solution, verify_median_solution
from .permcore import Instance, SymbolTable, ulam_distance
from .reductions import (center_solution_from_cover, closest_string_radius,
                         gen_center_from_closest_string, gen_center_from_vertex_cover,
                         gen_median_from_multicolored_clique, gen_planted,
                         mcc_solution, min_vertex_cover, subdivide_2)

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _read(path: str) -> str:
    return Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ---------------------------------------------------------------------------
# dist

def _perm_lines(arg: str) -> list[list[str]]:
    if os.path.isfile(arg):
        return [line.split() for line in _read(arg).splitlines()
                if line.strip() and not line.strip().startswith("#")]
    return [arg.split()]


def cmd_dist(args) -> int:
    if len(args.perms) == 1:
        rows = _perm_lines(args.perms[0])
    elif len(args.perms) == 2:
        rows = _perm_lines(args.perms[0])[:1] + _perm_lines(args.perms[1])[:1]
    else:
        raise UlamError("dist takes one file with two permutations or two permutations")
    if len(rows) != 2:
        raise UlamError(f"expected two permutations, found {len(rows)}")
    table = SymbolTable(tuple(rows[0]))
    print(ulam_distance(table.parse(rows[0]), table.parse(rows[1])))
    return EXIT_YES


# ---------------------------------------------------------------------------
# solve

def _family_config(args) -> ColoringFamilyConfig:
    return ColoringFamilyConfig(
        mode="randomized" if args.family == "random" else "exhaustive",
        seed=args.seed, failure_exponent=args.failure_exponent,
        exhaustive_limit=args.exhaustive_limit)


def _solve_center(inst: Instance, args) -> dict:
    cfg = _family_config(args)
    family = {"mode": cfg.mode, "seed": cfg.seed, "failure_exponent": cfg.failure_exponent}
    if args.oracle:
        v = brute_kcenter(inst)
        w = v.witness
        return formats.result_document(
            "center", inst, "yes" if v.feasible else "no", solver="oracle",
            perms=w.perms if w else (), assignment=w.assignment if w else (),
            value=w.value if w else None)
    res = solve_kcenter(inst, cfg, threads=args.threads)
    return formats.result_document(
        "center", inst, res.verdict, solver="fpt", perms=res.centers,
        assignment=res.assignment, value=res.radius, stats=res.stats, **family)


def _solve_median(inst: Instance, args) -> dict:
    if args.oracle:
        v = brute_kmedian(inst)
        w = v.witness
        return formats.result_document(
            "median", inst, "yes" if v.feasible else "no", solver="oracle",
            perms=w.perms if w else (), assignment=w.assignment if w else (),
            value=w.value if w else None)
    res = solve_kmedian(inst)
    stats = {k: res.stats[k] for k in ("nodes_expanded", "elapsed_ms")}
    return formats.result_document(
        "median", inst, res.verdict, solver="kernel+xp", perms=res.medians,
        assignment=res.assignment, value=res.cost, stats=stats)


def _print_result(doc: dict) -> None:
    print(doc["verdict"] if "note" not in doc else doc["note"])
    w = doc.get("witness")
    if w:
        label = "center" if "centers" in w else "median"
        print(f"radius {w['radius']}" if "radius" in w else f"cost {w['cost']}")
        for p in w.get("centers", w.get("medians", [])):
            print(f"{label} {p}")
        print("assignment " + " ".join(map(str, w["assignment"])))
    st = doc["stats"]
    print(f"stats nodes_expanded={st['nodes_expanded']} family_size={st['family_size']} "
          f"elapsed_ms={st['elapsed_ms']}")


def cmd_solve(args) -> int:
    inst = formats.parse_instance(_read(args.instance))
    solve = _solve_center if args.problem == "center" else _solve_median
    doc = solve(inst, args)
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        _print_result(doc)
    return EXIT_YES if doc["verdict"] == "yes" else EXIT_NO


# ---------------------------------------------------------------------------
# gen

def _emit_with_sidecar(args, inst: Instance, solution) -> None:
    _write(args.out, formats.emit_instance(inst))
    if args.out is not None and solution is not None:
        _write(args.out + ".sol", formats.emit_solution(solution, inst.table))


def _find_cover(g, size: int):
    for cover in combinations(range(g.vertex_count), size):
        if g.is_vertex_cover(cover):
            return cover
    return None


def _gen_vc(args) -> int:
    g = formats.parse_graph(_read(args.graph))
    if args.subdivide:
        g, _ = subdivide_2(g)
    best = min_vertex_cover(g)
    k = best if args.k is None else args.k
    inst = gen_center_from_vertex_cover(g, k, args.d)
    cover = _find_cover(g, best) if best <= k else None
    if cover is None:
        print(f"note: minimum vertex cover is {best} > k={k}; no certificate written",
              file=sys.stderr)
    sol = center_solution_from_cover(g, cover, args.d) if cover is not None else None
    _emit_with_sidecar(args, inst, sol)
    return EXIT_YES


def _gen_cs(args) -> int:
    strings = [PairSchemeString.parse(s) for s in args.strings]
    inst = gen_center_from_closest_string(strings, args.d)
    sol = None
    if closest_string_radius(strings) <= args.d:
        for bits in product((0, 1), repeat=len(strings[0])):
            c = PairSchemeString(bits)
            if max(hamming(c, s) for s in strings) <= args.d:
                sol = [pair_scheme_encode(c)]
                break
    _emit_with_sidecar(args, inst, sol)
    return EXIT_YES


def _find_multicolored_clique(g, k_prime: int):
    classes = [[v for v in range(g.vertex_count) if g.coloring[v] == c] for c in range(k_prime)]
    for pick in product(*classes):
        if all((min(u, v), max(u, v)) in g.edges for u, v in combinations(pick, 2)):
            return pick
    return None


def _gen_mcc(args) -> int:
    g = formats.parse_graph(_read(args.graph))
    if g.coloring is None:
        raise UlamError("mcc needs a vertex coloring ('c v color' lines)")
    k_prime = args.colors if args.colors is not None else max(g.coloring) + 1
    inst, params = gen_median_from_multicolored_clique(g, k_prime)
    clique = _find_multicolored_clique(g, k_prime)
    if clique is None:
        print("note: no multicolored clique; no certificate written", file=sys.stderr)
    sol = mcc_solution(params, clique) if clique is not None else None
    _emit_with_sidecar(args, inst, sol)
    return EXIT_YES


def _gen_planted(args) -> int:
    inst, centers = gen_planted(args.n, args.m, args.k, args.d, args.seed, args.mode)
    _emit_with_sidecar(args, inst, centers)
    return EXIT_YES


def cmd_gen(args) -> int:
    return {"vc": _gen_vc, "cs": _gen_cs, "mcc": _gen_mcc, "planted": _gen_planted}[args.kind](args)


# ---------------------------------------------------------------------------
# kernelize / verify

def cmd_kernelize(args) -> int:
    inst = formats.parse_instance(_read(args.instance))
    reduced, report = kernelize(inst)
    if args.out is not None:
        _write(args.out, formats.emit_instance(reduced))
    if args.json:
        doc = report.to_json(inst.table)
        doc["instance"] = formats.emit_instance(reduced)
        print(json.dumps(doc, indent=2))
    elif args.out is None:
        sys.stdout.write(formats.emit_instance(reduced))
    flag = " trivial_no" if report.trivial_no else ""
    print(f"kernel n {report.original_n} -> {report.reduced_n}, "
          f"m {report.original_m} -> {report.reduced_m}, "
          f"contracted {report.contraction_count}{flag}", file=sys.stderr)
    return EXIT_NO if report.trivial_no else EXIT_YES


def cmd_verify(args) -> int:
    inst = formats.parse_instance(_read(args.instance))
    sol = formats.parse_solution(_read(args.solution), inst.table)
    if args.problem == "center":
        ok, value, _ = verify_center_solution(inst, sol)
        print(f"radius {value}")
    else:
        ok, value, _ = verify_median_solution(inst, sol)
        print(f"cost {value}")
    return EXIT_YES if ok else EXIT_NO


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ulamclust",
                                 description="k-center and k-median clustering of permutations "
                                             "under the Ulam metric")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="Ulam distance of two permutations")
    p.add_argument("perms", nargs="+",
                   help="two permutations (quoted strings or one-line files), "
                        "or one file holding two permutation lines")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("solve", help="decide an instance")
    p.add_argument("problem", choices=["center", "median"])
    p.add_argument("instance")
    p.add_argument("--family", choices=["exhaustive", "random"], default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="failure_exponent", type=int, default=20)
    p.add_argument("--exhaustive-limit", type=int, default=22)
    p.add_argument("--json", action="store_true")
    p.add_argument("--oracle", action="store_true", help="use the brute-force oracle")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate instances")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("vc", help="from Vertex Cover on a triangle-free graph")
    g.add_argument("graph")
    g.add_argument("--k", type=int, default=None, help="default: minimum vertex cover size")
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--subdivide", action="store_true", help="2-subdivide the graph first")
    g.add_argument("--out")
    g = gsub.add_parser("cs", help="from binary Closest String")
    g.add_argument("strings", nargs="+")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--out")
    g = gsub.add_parser("mcc", help="from Multicolored Clique")
    g.add_argument("graph")
    g.add_argument("--colors", type=int, default=None)
    g.add_argument("--out")
    g = gsub.add_parser("planted", help="random planted yes-instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mode", choices=["center", "median"], default="center")
    g.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("kernelize", help="k-median kernel of an instance")
    p.add_argument("instance")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("verify", help="check a solution file")
    p.add_argument("problem", choices=["center", "median"])
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (UlamError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
