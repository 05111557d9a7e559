"""Permutations over a dense alphabet, the Ulam metric, and permutation graphs.

Symbols are integer ids ``0..n-1``; human-readable tokens live in a
:class:`SymbolTable`.  A :class:`Permutation` maps positions to symbol ids
and keeps the inverse map for O(1) position lookups.

The Ulam distance is ``n - LCS(a, b)``.  For permutations the LCS reduces to
a longest increasing subsequence: relabel so that ``a`` becomes the identity
and run patience sorting on the relabeled ``b``.
"""

from __future__ import annotations

import string
from bisect import bisect_left
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import InputError


@dataclass(frozen=True)
class SymbolTable:
    names: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        index = {}
        for i, tok in enumerate(names):
            if not isinstance(tok, str) or not tok or any(c.isspace() for c in tok):
                raise InputError(f"invalid symbol token {tok!r}")
            if tok in index:
                raise InputError(f"duplicate symbol token {tok!r}")
            index[tok] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def default(cls, n: int) -> "SymbolTable":
        """Letters ``A..Z`` for small alphabets, ``s1..sn`` otherwise."""
        if n <= 26:
            return cls(tuple(string.ascii_uppercase[:n]))
        return cls(tuple(f"s{i + 1}" for i in range(n)))

    @classmethod
    def numeric(cls, n: int) -> "SymbolTable":
        """Tokens ``1..n`` (1-based labels)."""
        return cls(tuple(str(i + 1) for i in range(n)))

    def __len__(self) -> int:
        return len(self.names)

    def id_of(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise InputError(f"unknown symbol {token!r}") from None

    def parse(self, tokens: Iterable[str] | str) -> "Permutation":
        """Build a permutation from a token sequence (or whitespace-separated string)."""
        if isinstance(tokens, str):
            tokens = tokens.split()
        ids = [self.id_of(t) for t in tokens]
        if len(ids) != len(self.names):
            raise InputError(f"expected {len(self.names)} symbols, got {len(ids)}")
        return Permutation(ids)

    def format(self, p: "Permutation") -> str:
        if len(p) != len(self.names):
            raise InputError("permutation length does not match symbol table")
        return " ".join(self.names[s] for s in p.seq)


class Permutation:
    """Immutable permutation: ``seq[pos] = symbol`` and ``inv[symbol] = pos``."""

    __slots__ = ("seq", "inv", "_hash")

    def __init__(self, seq: Iterable[int]):
        seq = tuple(int(s) for s in seq)
        n = len(seq)
        inv = [-1] * n
        for pos, sym in enumerate(seq):
            if not 0 <= sym < n or inv[sym] != -1:
                raise InputError(f"not a permutation of 0..{n - 1}: {seq}")
            inv[sym] = pos
        self.seq = seq
        self.inv = tuple(inv)
        self._hash = hash(seq)

    @classmethod
    def _trusted(cls, seq: tuple[int, ...]) -> "Permutation":
        # hot-path constructor: caller guarantees `seq` is a valid permutation tuple
        p = object.__new__(cls)
        inv = [0] * len(seq)
        for pos, sym in enumerate(seq):
            inv[sym] = pos
        p.seq = seq
        p.inv = tuple(inv)
        p._hash = hash(seq)
        return p

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._trusted(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.seq)

    def __iter__(self) -> Iterator[int]:
        return iter(self.seq)

    def __getitem__(self, pos: int) -> int:
        return self.seq[pos]

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.seq == other.seq

    def __lt__(self, other: "Permutation") -> bool:
        return self.seq < other.seq

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Permutation({list(self.seq)})"

    def __reduce__(self):
        return (Permutation, (self.seq,))


@dataclass(frozen=True)
class Instance:
    """One structure for both problems: alphabet, input multiset, ``k`` and ``d``."""

    table: SymbolTable
    pi: tuple[Permutation, ...]
    k: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(self.pi))
        n = len(self.table)
        for p in self.pi:
            if len(p) != n:
                raise InputError(f"permutation of length {len(p)} over alphabet of size {n}")
        if self.k < 1:
            raise InputError("k must be a positive integer")
        if self.d < 0:
            raise InputError("d must be non-negative")

    @property
    def n(self) -> int:
        return len(self.table)

    @property
    def m(self) -> int:
        return len(self.pi)

    def distinct(self) -> list[Permutation]:
        """Distinct permutations in order of first occurrence."""
        return list(dict.fromkeys(self.pi))


@dataclass(frozen=True)
class PermutationGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def _check_pair(a: Permutation, b: Permutation) -> None:
    if len(a) != len(b):
        raise InputError(f"permutation lengths differ ({len(a)} vs {len(b)})")


def _lis_length(values: Sequence[int]) -> int:
    tails: list[int] = []
    for v in values:
        i = bisect_left(tails, v)
        if i == len(tails):
            tails.append(v)
        else:
            tails[i] = v
    return len(tails)


def lcs_length(a: Permutation, b: Permutation) -> int:
    _check_pair(a, b)
    ainv = a.inv
    return _lis_length([ainv[s] for s in b.seq])


def ulam_distance(a: Permutation, b: Permutation) -> int:
    """Minimum number of single-symbol moves turning ``a`` into ``b``."""
    return len(a) - lcs_length(a, b)


def distance_at_most(a: Permutation, b: Permutation, t: int) -> bool:
    """``ulam_distance(a, b) <= t`` with early exit once the bound is unreachable."""
    _check_pair(a, b)
    if t < 0:
        raise InputError("threshold must be non-negative")
    n = len(a)
    need = n - t
    if need <= 1:
        return True
    ainv = a.inv
    tails: list[int] = []
    remaining = n
    for s in b.seq:
        remaining -= 1
        v = ainv[s]
        i = bisect_left(tails, v)
        if i == len(tails):
            tails.append(v)
            if len(tails) >= need:
                return True
        else:
            tails[i] = v
        if len(tails) + remaining < need:
            return False
    return len(tails) >= need


def apply_move(p: Permutation, from_pos: int, to_pos: int) -> Permutation:
    """Relocate the symbol at ``from_pos`` so that it ends up at index ``to_pos``.

    ``to_pos`` indexes the *result*: the symbol is removed first and then
    inserted so that it sits at ``to_pos`` in the returned permutation.

    >>> tab = SymbolTable(("A", "B", "C", "D"))
    >>> tab.format(apply_move(tab.parse("A B C D"), 0, 2))
    'B C A D'
    >>> tab.format(apply_move(tab.parse("A B C D"), 3, 0))
    'D A B C'
    """
    n = len(p)
    if not (0 <= from_pos < n and 0 <= to_pos < n):
        raise InputError(f"move {from_pos}->{to_pos} out of range for length {n}")
    seq = list(p.seq)
    sym = seq.pop(from_pos)
    seq.insert(to_pos, sym)
    return Permutation._trusted(tuple(seq))


def move_neighbors(p: Permutation) -> list[Permutation]:
    """All distinct permutations at Ulam distance exactly 1 from ``p``."""
    seq = p.seq
    n = len(seq)
    out = {}
    for i in range(n):
        rest = seq[:i] + seq[i + 1:]
        sym = seq[i]
        for j in range(n):
            if j == i:
                continue
            q = rest[:j] + (sym,) + rest[j:]
            out.setdefault(q, None)
    return [Permutation._trusted(q) for q in out]


def permutation_graph(a: Permutation, b: Permutation) -> PermutationGraph:
    """Graph on symbols with an edge for every pair ordered differently in ``a`` and ``b``."""
    _check_pair(a, b)
    ainv = a.inv
    bseq = b.seq
    edges = set()
    for i, j in combinations(range(len(bseq)), 2):
        x, y = bseq[i], bseq[j]
        if ainv[x] > ainv[y]:
            edges.add((x, y) if x < y else (y, x))
    return PermutationGraph(len(a), frozenset(edges))
