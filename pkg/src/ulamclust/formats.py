"""Text formats: instances, graphs, solution files, and JSON result documents.

Instance file::

    u <n> <m> <k> <d>
    <n symbol tokens>
    <m lines, each a permutation of the symbol tokens>

Graph file: ``p <n> <m>`` then ``e u v`` per edge and optional ``c v color``
lines (1-based vertices and colors).  Solution file: one permutation per
line.  Lines starting with ``#`` and blank lines are ignored everywhere.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Iterable, Sequence

from .errors import InputError
from .permcore import Instance, Permutation, SymbolTable
from .reductions import SimpleGraph


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append((lineno, line.split()))
    return out


def _int(tok: str, what: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"line {lineno}: {what} must be an integer, got {tok!r}") from None


def parse_instance(text: str) -> Instance:
    lines = _content_lines(text)
    if not lines:
        raise InputError("empty instance file")
    lineno, head = lines[0]
    if len(head) != 5 or head[0] != "u":
        raise InputError(f"line {lineno}: expected header 'u <n> <m> <k> <d>'")
    n, m, k, d = (_int(t, name, lineno) for t, name in zip(head[1:], "nmkd"))
    if n < 1 or m < 0:
        raise InputError(f"line {lineno}: need n >= 1 and m >= 0")
    if len(lines) < 2:
        raise InputError("missing symbol line")
    lineno, names = lines[1]
    if len(names) != n:
        raise InputError(f"line {lineno}: header says n={n} but {len(names)} symbols given")
    table = SymbolTable(tuple(names))
    body = lines[2:]
    if len(body) != m:
        raise InputError(f"header says m={m} but {len(body)} permutation lines follow")
    pi = []
    for lineno, toks in body:
        try:
            pi.append(table.parse(toks))
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
    return Instance(table, pi, k, d)


def emit_instance(inst: Instance) -> str:
    rows = [f"u {inst.n} {inst.m} {inst.k} {inst.d}", " ".join(inst.table.names)]
    rows += [inst.table.format(p) for p in inst.pi]
    return "\n".join(rows) + "\n"


def parse_solution(text: str, table: SymbolTable) -> list[Permutation]:
    out = []
    for lineno, toks in _content_lines(text):
        try:
            out.append(table.parse(toks))
        except InputError as exc:
            raise InputError(f"solution line {lineno}: {exc}") from None
    return out


def emit_solution(perms: Iterable[Permutation], table: SymbolTable) -> str:
    return "".join(table.format(p) + "\n" for p in perms)


def parse_graph(text: str) -> SimpleGraph:
    lines = _content_lines(text)
    if not lines:
        raise InputError("empty graph file")
    lineno, head = lines[0]
    if len(head) != 3 or head[0] != "p":
        raise InputError(f"line {lineno}: expected header 'p <n> <m>'")
    n, m = _int(head[1], "n", lineno), _int(head[2], "m", lineno)
    edges, colors = [], {}
    for lineno, toks in lines[1:]:
        if toks[0] == "e" and len(toks) == 3:
            u, v = _int(toks[1], "vertex", lineno), _int(toks[2], "vertex", lineno)
            edges.append((u - 1, v - 1))
        elif toks[0] == "c" and len(toks) == 3:
            v, c = _int(toks[1], "vertex", lineno), _int(toks[2], "color", lineno)
            if not 1 <= v <= n:
                raise InputError(f"line {lineno}: vertex {v} outside 1..{n}")
            if c < 1:
                raise InputError(f"line {lineno}: colors are 1-based")
            colors[v - 1] = c - 1
        else:
            raise InputError(f"line {lineno}: expected 'e u v' or 'c v color'")
    if len(edges) != m:
        raise InputError(f"header says m={m} but {len(edges)} edges given")
    coloring = None
    if colors:
        if len(colors) != n:
            raise InputError("a coloring must color every vertex")
        coloring = tuple(colors[v] for v in range(n))
    return SimpleGraph.from_edges(n, edges, coloring)


def emit_graph(g: SimpleGraph) -> str:
    rows = [f"p {g.vertex_count} {len(g.edges)}"]
    rows += [f"e {u + 1} {v + 1}" for u, v in g.sorted_edges()]
    if g.coloring is not None:
        rows += [f"c {v + 1} {c + 1}" for v, c in enumerate(g.coloring)]
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# result documents

def result_schema() -> dict:
    text = resources.files("ulamclust").joinpath("schemas/result.schema.json").read_text()
    return json.loads(text)


def result_document(problem: str, inst: Instance, verdict: str, *,
                    perms: Sequence[Permutation] = (), assignment: Sequence[int] = (),
                    value: int | None = None, stats: dict | None = None,
                    solver: str, mode: str | None = None, seed: int | None = None,
                    failure_exponent: int | None = None) -> dict:
    doc = {
        "problem": problem,
        "verdict": verdict,
        "solver": solver,
        "parameters": {"n": inst.n, "m": inst.m, "k": inst.k, "d": inst.d},
        "stats": {"nodes_expanded": 0, "family_size": 0, "elapsed_ms": 0.0, **(stats or {})},
    }
    if mode is not None:
        doc["family"] = {"mode": mode, "seed": seed, "failure_exponent": failure_exponent}
    if verdict == "yes":
        key, measure = ("centers", "radius") if problem == "center" else ("medians", "cost")
        doc["witness"] = {
            key: [inst.table.format(p) for p in perms],
            "assignment": list(assignment),
            measure: value,
        }
    elif verdict == "no_probabilistic":
        doc["note"] = (f"no (probabilistic, failure <= 2^-{failure_exponent} "
                       "per guide-set call)")
    return doc
