"""Instance generators built from classic hard problems, plus planted instances.

* Vertex Cover on triangle-free graphs -> k-center (two tokens per vertex
  and copy; an edge permutation flips the pairs of both endpoints).
* Binary Closest String -> 1-center via the pair-scheme encoding.
* Multicolored Clique -> k-median (edge permutations over x/y/v/z runs and
  one symbol per color).
* Random planted yes-instances for either problem.

Vertices are 0-based in memory and 1-based in files and tokens.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Iterable, Sequence

from .errors import InputError
from .kmedian import PairSchemeString, hamming, pair_scheme_encode
from .permcore import Instance, Permutation, SymbolTable, apply_move


@dataclass(frozen=True)
class SimpleGraph:
    vertex_count: int
    edges: frozenset[tuple[int, int]]
    coloring: tuple[int, ...] | None = None

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u + 1}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise InputError(f"edge {u + 1}-{v + 1} outside 1..{self.vertex_count}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.coloring is not None:
            col = tuple(self.coloring)
            if len(col) != self.vertex_count:
                raise InputError("coloring must assign every vertex a color")
            for u, v in norm:
                if col[u] == col[v]:
                    raise InputError(f"coloring is not proper on edge {u + 1}-{v + 1}")
            object.__setattr__(self, "coloring", col)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], coloring=None) -> "SimpleGraph":
        edges = list(edges)
        seen = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InputError(f"duplicate edge {u + 1}-{v + 1}")
            seen.add(key)
        return cls(n, frozenset(edges), coloring)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def find_triangle(self) -> tuple[int, int, int] | None:
        adj = self.adjacency()
        for u, v in self.sorted_edges():
            common = adj[u] & adj[v]
            if common:
                return (u, v, min(common))
        return None

    def is_vertex_cover(self, cover: Iterable[int]) -> bool:
        cover = set(cover)
        return all(u in cover or v in cover for u, v in self.edges)


def min_vertex_cover(g: SimpleGraph) -> int:
    """Size of a minimum vertex cover by trying subsets in increasing size (small graphs only)."""
    for size in range(g.vertex_count + 1):
        if any(g.is_vertex_cover(c) for c in combinations(range(g.vertex_count), size)):
            return size
    return g.vertex_count


def closest_string_radius(strings: Sequence[PairSchemeString]) -> int:
    """Smallest Hamming radius of a ball containing every string (all centers tried)."""
    if not strings:
        return 0
    length = len(strings[0])
    best = length
    for bits in product((0, 1), repeat=length):
        c = PairSchemeString(bits)
        best = min(best, max(hamming(c, s) for s in strings))
    return best


# ---------------------------------------------------------------------------
# vertex cover -> k-center

def subdivide_2(g: SimpleGraph) -> tuple[SimpleGraph, int]:
    """Replace every edge by a three-edge path; minimum covers grow by exactly ``|E|``."""
    n = g.vertex_count
    edges = []
    for i, (u, v) in enumerate(g.sorted_edges()):
        a, b = n + 2 * i, n + 2 * i + 1
        edges += [(u, a), (a, b), (b, v)]
    return SimpleGraph(n + 2 * len(g.edges), frozenset(edges)), len(g.edges)


def _vc_table(vertex_count: int, d: int) -> SymbolTable:
    names = []
    for i in range(1, vertex_count + 1):
        for j in range(1, d + 1):
            names += [f"v{i}_{j}", f"v{i}_{j}bar"]
    return SymbolTable(tuple(names))


def _flip_vertices(vertex_count: int, d: int, flipped: Iterable[int]) -> Permutation:
    flipped = set(flipped)
    seq = []
    for v in range(vertex_count):
        for j in range(d):
            a = 2 * (v * d + j)
            seq += [a + 1, a] if v in flipped else [a, a + 1]
    return Permutation._trusted(tuple(seq))


def gen_center_from_vertex_cover(g: SimpleGraph, k: int, d: int) -> Instance:
    """k-center instance that is yes iff ``g`` has a vertex cover of size ``k``."""
    if d < 1:
        raise InputError("d must be at least 1")
    tri = g.find_triangle()
    if tri is not None:
        a, b, c = (x + 1 for x in tri)
        raise InputError(f"graph has the triangle {a}-{b}-{c}; apply subdivide_2 first")
    table = _vc_table(g.vertex_count, d)
    pi = [_flip_vertices(g.vertex_count, d, e) for e in g.sorted_edges()]
    return Instance(table, pi, k, d)


def center_solution_from_cover(g: SimpleGraph, cover: Iterable[int], d: int) -> list[Permutation]:
    """One center per cover vertex: the base order with that vertex's pairs flipped."""
    cover = sorted(set(cover))
    if not g.is_vertex_cover(cover):
        raise InputError(f"{[v + 1 for v in cover]} is not a vertex cover")
    return [_flip_vertices(g.vertex_count, d, [v]) for v in cover]


# ---------------------------------------------------------------------------
# closest string -> 1-center

def gen_center_from_closest_string(strings: Sequence[PairSchemeString | str], d: int) -> Instance:
    strings = [PairSchemeString.parse(s) if isinstance(s, str) else s for s in strings]
    if not strings:
        raise InputError("need at least one string")
    length = len(strings[0])
    if any(len(s) != length for s in strings):
        raise InputError("strings must have equal length")
    if length < 1:
        raise InputError("strings must be non-empty")
    return Instance(SymbolTable.numeric(2 * length), [pair_scheme_encode(s) for s in strings], 1, d)


# ---------------------------------------------------------------------------
# multicolored clique -> k-median

@dataclass(frozen=True)
class MccParams:
    q: int
    base: Permutation
    d: int
    k: int
    k_prime: int
    graph: SimpleGraph
    table: SymbolTable
    edges: tuple[tuple[int, int], ...] = field(repr=False)


def _mcc_table(g: SimpleGraph, k_prime: int, q: int, edges) -> SymbolTable:
    names = []
    for j in range(1, len(edges) + 1):
        for i in range(1, q + 1):
            names += [f"x{j}_{i}", f"y{j}_{i}"]
    for j in range(1, g.vertex_count + 1):
        names += [f"v{j}_{i}" for i in range(1, q + 1)]
    for j in range(1, len(edges) + 1):
        names += [f"z{j}_{i}" for i in range(1, q + 1)]
    names += [f"c{a}" for a in range(1, k_prime + 1)]
    return SymbolTable(tuple(names))


class _MccLayout:
    """Symbol ids of the base order: x/y pairs, v runs, z runs, colors."""

    def __init__(self, n_vertices: int, m_edges: int, k_prime: int, q: int):
        self.q = q
        self.v0 = 2 * m_edges * q
        self.z0 = self.v0 + n_vertices * q
        self.c0 = self.z0 + m_edges * q
        self.n_vertices, self.m_edges, self.k_prime = n_vertices, m_edges, k_prime

    def xy(self, j: int, swapped: bool) -> list[int]:
        out = []
        for i in range(self.q):
            x = 2 * (j * self.q + i)
            out += [x + 1, x] if swapped else [x, x + 1]
        return out

    def v_run(self, v: int) -> list[int]:
        return list(range(self.v0 + v * self.q, self.v0 + (v + 1) * self.q))

    def z_run(self, j: int) -> list[int]:
        return list(range(self.z0 + j * self.q, self.z0 + (j + 1) * self.q))

    def color(self, a: int) -> int:
        return self.c0 + a

    def build(self, swapped_edge: int | None, after_vertex: dict[int, int],
              after_z: tuple[int, list[int]] | None, trailing: list[int]) -> Permutation:
        seq = []
        for j in range(self.m_edges):
            seq += self.xy(j, j == swapped_edge)
        for v in range(self.n_vertices):
            seq += self.v_run(v)
            if v in after_vertex:
                seq.append(self.color(after_vertex[v]))
        for j in range(self.m_edges):
            seq += self.z_run(j)
            if after_z is not None and after_z[0] == j:
                seq += [self.color(a) for a in after_z[1]]
        seq += [self.color(a) for a in trailing]
        return Permutation(seq)


def gen_median_from_multicolored_clique(g: SimpleGraph, k_prime: int) -> tuple[Instance, MccParams]:
    """k-median instance that is yes iff ``g`` has a clique with one vertex per color."""
    if k_prime < 4:
        raise InputError("the construction needs at least 4 colors")
    if g.coloring is None:
        raise InputError("graph needs a proper vertex coloring")
    if any(not 0 <= c < k_prime for c in g.coloring):
        raise InputError(f"colors must lie in 1..{k_prime}")
    edges = tuple(g.sorted_edges())
    pairs = comb(k_prime, 2)
    q = pairs * (k_prime - 2) + 1
    d = pairs * (q + k_prime - 2)
    k = len(edges) - pairs + 1
    if k < 1:
        raise InputError(f"need at least {pairs} edges for {k_prime} colors")
    layout = _MccLayout(g.vertex_count, len(edges), k_prime, q)
    base = layout.build(None, {}, None, list(range(k_prime)))
    col = g.coloring
    pi = []
    for j, (a, b) in enumerate(edges):
        rest = [c for c in range(k_prime) if c not in (col[a], col[b])]
        pi.append(layout.build(j, {a: col[a], b: col[b]}, (j, rest), []))
    table = _mcc_table(g, k_prime, q, edges)
    params = MccParams(q, base, d, k, k_prime, g, table, edges)
    return Instance(table, pi, k, d), params


def mcc_sigma_from_clique(params: MccParams, clique: Iterable[int]) -> Permutation:
    """The median that serves every clique edge: each color right after its clique vertex."""
    clique = sorted(set(clique))
    g = params.graph
    colors = [g.coloring[v] for v in clique]
    if len(clique) != params.k_prime or sorted(colors) != list(range(params.k_prime)):
        raise InputError("need exactly one vertex of every color")
    for u, v in combinations(clique, 2):
        if (u, v) not in g.edges:
            raise InputError(f"vertices {u + 1} and {v + 1} are not adjacent")
    layout = _MccLayout(g.vertex_count, len(params.edges), params.k_prime, params.q)
    return layout.build(None, {v: g.coloring[v] for v in clique}, None, [])


def mcc_solution(params: MccParams, clique: Iterable[int]) -> list[Permutation]:
    """Full median set: the clique median plus every non-clique edge permutation itself."""
    clique = set(clique)
    sigma = mcc_sigma_from_clique(params, clique)
    layout = _MccLayout(params.graph.vertex_count, len(params.edges), params.k_prime, params.q)
    col = params.graph.coloring
    out = [sigma]
    for j, (a, b) in enumerate(params.edges):
        if a in clique and b in clique:
            continue
        rest = [c for c in range(params.k_prime) if c not in (col[a], col[b])]
        out.append(layout.build(j, {a: col[a], b: col[b]}, (j, rest), []))
    return out


# ---------------------------------------------------------------------------
# planted instances

def gen_planted(n: int, m: int, k: int, d: int, seed: int = 0,
                mode: str = "center") -> tuple[Instance, list[Permutation]]:
    """Random yes-instance with its planted centers (or medians).

    ``center``: every input is at most ``d`` random moves from its center.
    ``median``: the move counts over all inputs sum to at most ``d``.
    """
    if n < 1 or m < 0 or k < 1 or d < 0:
        raise InputError("need n >= 1, m >= 0, k >= 1, d >= 0")
    if k > max(m, 1):
        raise InputError("need k <= m")
    if mode not in ("center", "median"):
        raise InputError(f"unknown planting mode {mode!r}")
    rng = random.Random(seed)
    centers = []
    for _ in range(k):
        s = list(range(n))
        rng.shuffle(s)
        centers.append(Permutation(s))
    budget = d
    pi = []
    for i in range(m):
        c = centers[i] if i < k else rng.choice(centers)
        if mode == "center":
            moves = rng.randint(0, d)
        else:
            moves = rng.randint(0, budget)
            budget -= moves
        p = c
        for _ in range(moves):
            p = apply_move(p, rng.randrange(n), rng.randrange(n))
        pi.append(p)
    return Instance(SymbolTable.default(n), pi, k, d), centers
