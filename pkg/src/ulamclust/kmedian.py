"""Exact k-median for permutations: move-sequence search plus a kernel.

``xp_solve`` searches move sequences on the input multiset by iterative
deepening, so the first success is an optimal clustering.  ``kernelize``
shrinks an instance with three rules (too many distinct inputs means no;
cap multiplicities; contract long substrings shared inside a cluster of
nearby inputs) and records enough to lift solutions back.
"""

from __future__ import annotations

import math
import time
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InputError, WorkWarning
from .oracles import verify_median_solution, work_limit
from .permcore import Instance, Permutation, SymbolTable, distance_at_most, ulam_distance


# ---------------------------------------------------------------------------
# pair scheme codec

@dataclass(frozen=True)
class PairSchemeString:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise InputError(f"bitstring must be 0/1: {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "PairSchemeString":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise InputError(f"not a bitstring: {text!r}")
        return cls(tuple(int(c) for c in text))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def hamming(s: PairSchemeString, t: PairSchemeString) -> int:
    if len(s) != len(t):
        raise InputError("bitstrings of different length")
    return sum(a != b for a, b in zip(s.bits, t.bits))


def pair_scheme_encode(s: PairSchemeString | str) -> Permutation:
    """Bit ``i`` becomes the symbol pair ``(2i, 2i+1)`` for 0 and ``(2i+1, 2i)`` for 1.

    Ids are 0-based; the 1-based labels of the textbook layout are
    ``SymbolTable.numeric(2 * len(s))``.

    >>> SymbolTable.numeric(10).format(pair_scheme_encode("00101"))
    '1 2 3 4 6 5 7 8 10 9'
    """
    if isinstance(s, str):
        s = PairSchemeString.parse(s)
    if len(s) < 1:
        raise InputError("bitstring must be non-empty")
    seq = []
    for i, b in enumerate(s.bits):
        seq.extend((2 * i + 1, 2 * i) if b else (2 * i, 2 * i + 1))
    return Permutation._trusted(tuple(seq))


def pair_scheme_decode(p: Permutation) -> PairSchemeString | None:
    """Inverse of :func:`pair_scheme_encode`; ``None`` if ``p`` breaks the pair layout."""
    if len(p) % 2:
        raise InputError("pair-scheme permutations have even length")
    bits = []
    for i in range(len(p) // 2):
        a, b = p.seq[2 * i], p.seq[2 * i + 1]
        if (a, b) == (2 * i, 2 * i + 1):
            bits.append(0)
        elif (a, b) == (2 * i + 1, 2 * i):
            bits.append(1)
        else:
            return None
    return PairSchemeString(tuple(bits))


# ---------------------------------------------------------------------------
# move-sequence search

@dataclass
class KMedianResult:
    verdict: str  # "yes" or "no"
    medians: tuple[Permutation, ...] = ()
    assignment: tuple[int, ...] = ()
    cost: int | None = None
    stats: dict = field(default_factory=dict)
    kernel: "KernelReport | None" = None

    @property
    def feasible(self) -> bool:
        return self.verdict == "yes"


def _neighbors(seq: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    n = len(seq)
    seen = set()
    for i in range(n):
        rest = seq[:i] + seq[i + 1:]
        sym = seq[i]
        for j in range(n):
            if j == i:
                continue
            q = rest[:j] + (sym,) + rest[j:]
            if q not in seen:
                seen.add(q)
                yield q


class _MoveSearch:
    """Depth-limited search over multisets of permutations, one move per level."""

    def __init__(self, k: int):
        self.k = k
        self.nodes = 0
        self.failed: set = set()

    def run(self, state: dict, budget: int) -> dict | None:
        self.nodes += 1
        distinct = len(state)
        if distinct <= self.k:
            return state
        excess = distinct - self.k
        if excess > budget:
            return None
        key = (frozenset(state.items()), budget)
        if key in self.failed:
            return None
        perms = sorted(state)
        if excess == budget:
            # every remaining move has to merge a lone permutation into another one
            for a in perms:
                if state[a] != 1:
                    continue
                pa = Permutation._trusted(a)
                for b in perms:
                    if b != a and distance_at_most(pa, Permutation._trusted(b), 1):
                        found = self.run(_moved(state, a, b), budget - 1)
                        if found is not None:
                            return found
        else:
            for a in perms:
                for q in _neighbors(a):
                    found = self.run(_moved(state, a, q), budget - 1)
                    if found is not None:
                        return found
        self.failed.add(key)
        return None


def _moved(state: dict, a, q) -> dict:
    out = dict(state)
    if out[a] == 1:
        del out[a]
    else:
        out[a] -= 1
    out[q] = out.get(q, 0) + 1
    return out


def xp_solve(inst: Instance, *, limit: int | None = None) -> KMedianResult:
    """Optimal k-median clustering within total cost ``d`` by move-sequence search.

    Tries budgets ``0, 1, ..., d`` in turn, so a yes-verdict carries the
    optimal cost.  Warns when ``(m * n^2)^d`` exceeds the work limit.
    """
    started = time.perf_counter()
    limit = work_limit() if limit is None else limit
    stats = {"nodes_expanded": 0}
    if inst.m == 0:
        stats["elapsed_ms"] = 0.0
        return KMedianResult("yes", (), (), 0, stats)
    base = inst.m * inst.n ** 2
    if base ** inst.d > limit:
        log10 = inst.d * math.log10(base) if base > 1 else 0.0
        warnings.warn(f"move search may expand up to (m*n^2)^d ~ 10^{log10:.1f} "
                      f"states (limit {limit})", WorkWarning, stacklevel=2)
    state: dict = {}
    for p in inst.pi:
        state[p.seq] = state.get(p.seq, 0) + 1
    search = _MoveSearch(inst.k)
    found = None
    for budget in range(inst.d + 1):
        found = search.run(state, budget)
        if found is not None:
            break
    stats["nodes_expanded"] = search.nodes
    stats["elapsed_ms"] = round((time.perf_counter() - started) * 1000, 3)
    if found is None:
        return KMedianResult("no", stats=stats)
    medians = tuple(Permutation._trusted(s) for s in sorted(found))
    ok, cost, assignment = verify_median_solution(inst, medians)
    if not ok or cost != budget:
        raise AssertionError("move search produced medians that do not verify")
    return KMedianResult("yes", medians, assignment, cost, stats)


# ---------------------------------------------------------------------------
# kernel building blocks

@dataclass(frozen=True)
class ConnectivityPartition:
    """Components of the ``<= d`` distance graph over the distinct permutations."""

    distinct: tuple[Permutation, ...]
    components: tuple[tuple[int, ...], ...]  # indices into ``distinct``

    @property
    def r(self) -> int:
        return len(self.components)

    def component_of(self) -> dict[Permutation, int]:
        return {self.distinct[j]: i for i, comp in enumerate(self.components) for j in comp}


def connectivity_components(perms: Sequence[Permutation], d: int) -> ConnectivityPartition:
    """Breadth-first components, ordered by their first member's input position."""
    distinct = tuple(dict.fromkeys(perms))
    seen = [False] * len(distinct)
    comps = []
    for start in range(len(distinct)):
        if seen[start]:
            continue
        seen[start] = True
        comp, queue = [start], deque([start])
        while queue:
            u = queue.popleft()
            for v in range(len(distinct)):
                if not seen[v] and distance_at_most(distinct[u], distinct[v], d):
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(tuple(sorted(comp)))
    return ConnectivityPartition(distinct, tuple(comps))


def maximal_common_substrings(perms: Sequence[Permutation]) -> list[tuple[int, ...]]:
    """Split the alphabet into maximal runs that are contiguous in every permutation.

    ``y`` follows ``x`` in the same run iff ``y`` comes right after ``x``
    in every input.  Runs are listed in the order of the first permutation.
    """
    if not perms:
        raise InputError("need at least one permutation")
    first = perms[0]
    n = len(first)
    succ = [first.seq[i + 1] if i + 1 < n else None for i in range(n)]
    succ_of = [None] * n
    for pos, sym in enumerate(first.seq):
        succ_of[sym] = succ[pos]
    for p in perms[1:]:
        if len(p) != n:
            raise InputError("permutation lengths differ")
        for sym in range(n):
            nxt = succ_of[sym]
            if nxt is not None and p.inv[nxt] != p.inv[sym] + 1:
                succ_of[sym] = None
    has_pred = [False] * n
    for sym in range(n):
        if succ_of[sym] is not None:
            has_pred[succ_of[sym]] = True
    chains = []
    for sym in first.seq:
        if has_pred[sym]:
            continue
        chain = [sym]
        while succ_of[chain[-1]] is not None:
            chain.append(succ_of[chain[-1]])
        chains.append(tuple(chain))
    return chains


# ---------------------------------------------------------------------------
# kernelization

@dataclass
class KernelReport:
    original_n: int
    original_m: int
    reduced_n: int
    reduced_m: int
    d: int
    trivial_no: bool = False
    removed_duplicates: dict = field(default_factory=dict)  # first input index -> copies dropped
    kept_indices: tuple[int, ...] = ()  # input indices surviving the multiplicity cap
    components: tuple[tuple[int, ...], ...] = ()  # positions in the reduced list, per component
    contracted: tuple[tuple[tuple[tuple[int, ...], tuple[int, ...]], ...], ...] = ()
    relabel_base: int = 0
    prefixes: tuple[str, ...] = ()
    suffix_ids: tuple[tuple[int, ...], ...] = ()  # per reduced permutation, 1-based kernel ids
    perm_component: tuple[int, ...] = ()  # per reduced permutation
    expansion: tuple[dict, ...] = ()  # per component: 1-based kernel id -> original symbol ids
    substrings_contracted: bool = False

    @property
    def contraction_count(self) -> int:
        return sum(len(c) for c in self.contracted)

    def body(self, p: Permutation, component: int) -> list[int]:
        """Kernel ids (1-based) of ``p`` with the component prefix and suffix removed."""
        table = self.expansion[component]
        return [s + 1 for s in p.seq if (s + 1) in table]

    def lift(self, p: Permutation, component: int) -> Permutation:
        """Map a kernel permutation of ``component`` back to the original alphabet."""
        if not self.substrings_contracted:
            return p
        table = self.expansion[component]
        seq = []
        for label in self.body(p, component):
            seq.extend(table[label])
        return Permutation(seq)

    def to_json(self, table: SymbolTable | None = None) -> dict:
        name = (lambda s: table.names[s]) if table is not None else (lambda s: s)
        return {
            "original": {"n": self.original_n, "m": self.original_m},
            "reduced": {"n": self.reduced_n, "m": self.reduced_m},
            "trivial_no": self.trivial_no,
            "removed_duplicates": {str(k): v for k, v in sorted(self.removed_duplicates.items())},
            "kept_indices": list(self.kept_indices),
            "components": [list(c) for c in self.components],
            "substrings_contracted": self.substrings_contracted,
            "contracted": [[{"original": [name(s) for s in orig], "replacement": list(rep)}
                            for orig, rep in comp] for comp in self.contracted],
            "relabel_base": self.relabel_base,
            "prefixes": list(self.prefixes),
            "suffix_ids": [list(s) for s in self.suffix_ids],
            "perm_component": list(self.perm_component),
        }


def trivial_no_instance() -> Instance:
    """Two different permutations, one median, no budget."""
    tab = SymbolTable.numeric(2)
    return Instance(tab, (tab.parse("1 2"), tab.parse("2 1")), 1, 0)


def kernelize(inst: Instance) -> tuple[Instance, KernelReport]:
    """Shrink ``inst`` to an equivalent k-median instance of size bounded in ``k`` and ``d``."""
    d, k = inst.d, inst.k
    report = KernelReport(inst.n, inst.m, inst.n, inst.m, d)
    distinct = inst.distinct()
    if len(distinct) > k + d:
        out = trivial_no_instance()
        report.trivial_no = True
        report.reduced_n, report.reduced_m = out.n, out.m
        return out, report

    # multiplicity cap: a permutation seen more than d times must be a median
    counts: dict[Permutation, int] = {}
    first_index: dict[Permutation, int] = {}
    kept = []
    for i, p in enumerate(inst.pi):
        first_index.setdefault(p, i)
        counts[p] = counts.get(p, 0) + 1
        if counts[p] <= d + 1:
            kept.append(i)
        else:
            report.removed_duplicates[first_index[p]] = report.removed_duplicates.get(first_index[p], 0) + 1
    report.kept_indices = tuple(kept)
    perms = [inst.pi[i] for i in kept]
    report.reduced_m = len(perms)

    part = connectivity_components(perms, d)
    comp_of = part.component_of()
    report.perm_component = tuple(comp_of[p] for p in perms)
    report.components = tuple(tuple(j for j, c in enumerate(report.perm_component) if c == i)
                              for i in range(part.r))
    chains_per_comp = [maximal_common_substrings([part.distinct[j] for j in comp])
                       for comp in part.components]
    if not any(len(ch) > d + 1 for chains in chains_per_comp for ch in chains):
        reduced = Instance(inst.table, perms, k, d)
        report.reduced_n = reduced.n
        return reduced, report

    report.substrings_contracted = True
    r = part.r
    base = 2 * (d + 1) * r
    report.relabel_base = base + 1
    bodies, expansions, contracted = [], [], []
    for i, chains in enumerate(chains_per_comp):
        # contract every long shared run to d + 1 placeholder tokens
        token_of: dict[int, tuple] = {}
        pieces: dict[tuple, tuple[int, ...]] = {}
        for ch in chains:
            if len(ch) > d + 1:
                for j in range(d + 1):
                    token = ("run", ch, j)
                    pieces[token] = ch[j:j + 1] if j < d else ch[d:]
                token_of[ch[0]] = ch
            else:
                for sym in ch:
                    pieces[("sym", sym)] = (sym,)
        first = part.distinct[part.components[i][0]]
        order = _contracted_sequence(first, token_of, d)
        label = {tok: base + 1 + j for j, tok in enumerate(order)}
        expansions.append({label[tok]: pieces[tok] for tok in order})
        contracted.append(tuple((ch, tuple(label[("run", ch, j)] for j in range(d + 1)))
                                for ch in chains if len(ch) > d + 1))
        bodies.append((label, token_of))
    width = base + max(len(e) for e in expansions)
    report.expansion = tuple(expansions)
    report.contracted = tuple(contracted)

    prefixes = []
    for i in range(r):
        bits = "0" * ((d + 1) * i) + "1" * (d + 1) + "0" * ((d + 1) * (r - i - 1))
        prefixes.append(bits)
    report.prefixes = tuple(prefixes)

    out_perms, suffixes = [], []
    for p, ci in zip(perms, report.perm_component):
        label, token_of = bodies[ci]
        prefix = [s + 1 for s in pair_scheme_encode(prefixes[ci]).seq]
        body = [label[t] for t in _contracted_sequence(p, token_of, d)]
        used = set(body)
        suffix = [s for s in range(base + 1, width + 1) if s not in used]
        suffixes.append(tuple(suffix))
        out_perms.append(Permutation([s - 1 for s in prefix + body + suffix]))
    report.suffix_ids = tuple(suffixes)
    reduced = Instance(SymbolTable.numeric(width), out_perms, k, d)
    report.reduced_n = width
    return reduced, report


def _contracted_sequence(p: Permutation, token_of: dict, d: int) -> list[tuple]:
    out = []
    seq = p.seq
    i = 0
    while i < len(seq):
        ch = token_of.get(seq[i])
        if ch is not None:
            out.extend(("run", ch, j) for j in range(d + 1))
            i += len(ch)
        else:
            out.append(("sym", seq[i]))
            i += 1
    return out


# ---------------------------------------------------------------------------
# kernel + search pipeline

def solve_kmedian(inst: Instance) -> KMedianResult:
    """Kernelize, search the kernel, and lift the medians back to ``inst``."""
    started = time.perf_counter()
    reduced, report = kernelize(inst)
    stats = {"nodes_expanded": 0, "kernel_n": report.reduced_n, "kernel_m": report.reduced_m}

    def done(result: KMedianResult) -> KMedianResult:
        result.stats = {**stats, **result.stats,
                        "elapsed_ms": round((time.perf_counter() - started) * 1000, 3)}
        result.kernel = report
        return result

    if report.trivial_no:
        return done(KMedianResult("no"))
    res = xp_solve(reduced)
    stats["nodes_expanded"] = res.stats["nodes_expanded"]
    if not res.feasible:
        return done(KMedianResult("no"))
    if inst.m == 0:
        return done(KMedianResult("yes", (), (), 0))

    medians = []
    for mi, med in enumerate(res.medians):
        members = [j for j, a in enumerate(res.assignment) if a == mi]
        if not members:
            continue
        comp = report.perm_component[members[0]]
        if any(report.perm_component[j] != comp for j in members):
            raise AssertionError("a median serves two components")
        lifted = report.lift(med, comp)
        kernel_cost = sum(ulam_distance(reduced.pi[j], med) for j in members)
        originals = [inst.pi[report.kept_indices[j]] for j in members]
        if sum(ulam_distance(p, lifted) for p in originals) > kernel_cost:
            lifted = _cluster_median(originals, kernel_cost, inst)
        medians.append(lifted)
    medians = tuple(dict.fromkeys(medians))
    ok, cost, assignment = verify_median_solution(inst, medians)
    if not ok or cost != res.cost:
        raise AssertionError("lifted medians do not reach the kernel cost")
    return done(KMedianResult("yes", medians, assignment, cost))


def _cluster_median(perms: list[Permutation], budget: int, inst: Instance) -> Permutation:
    # a lifted median split a contracted run; re-solve this cluster directly
    sub = Instance(inst.table, perms, 1, budget)
    res = xp_solve(sub)
    if not res.feasible:
        raise AssertionError("cluster has no median within its kernel cost")
    return res.medians[0]
