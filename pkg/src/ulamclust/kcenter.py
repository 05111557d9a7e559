"""Fixed-parameter k-center solver for permutations under the Ulam metric.

The search keeps up to ``k`` candidate centers, each with a budget of
remaining improvement steps.  An input that no candidate covers either
joins an existing cluster (the candidate takes one step towards a center
that would cover both, chosen from a *guide set*) or opens a new cluster.

Guide sets come from red/blue coloring pairs: for the right pair, a
minimal vertex cover of the inversion graph names a symbol that the
candidate must move and the guide leaves in place, and blue anchors in
the guide bracket where it has to go.
"""

from __future__ import annotations

import enum
import math
import multiprocessing as mp
import random
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import ConfigError, InputError, WorkWarning
from .permcore import (Instance, Permutation, PermutationGraph, distance_at_most,
                       permutation_graph, ulam_distance)


class Color(enum.Enum):
    RED = "red"
    BLUE = "blue"


@dataclass(frozen=True)
class Coloring:
    """Red/blue coloring of symbol ids ``0..n-1``, stored as a bitmask of red ids."""

    n: int
    red: int = 0

    def __post_init__(self):
        if self.n < 0 or self.red < 0 or self.red >> self.n:
            raise InputError(f"red mask {self.red:#x} does not fit {self.n} symbols")

    @classmethod
    def from_colors(cls, colors: Iterable) -> "Coloring":
        mask, n = 0, 0
        for i, c in enumerate(colors):
            n = i + 1
            if c is Color.RED or c is True or c == "red" or c == 1:
                mask |= 1 << i
        return cls(n, mask)

    @classmethod
    def all_blue(cls, n: int) -> "Coloring":
        return cls(n, 0)

    @property
    def colors(self) -> tuple[Color, ...]:
        return tuple(self[i] for i in range(self.n))

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, sym: int) -> Color:
        if not 0 <= sym < self.n:
            raise IndexError(sym)
        return Color.RED if self.red >> sym & 1 else Color.BLUE

    def is_red(self, sym: int) -> bool:
        return bool(self.red >> sym & 1)


class ColoringPair(NamedTuple):
    cand: Coloring
    guide: Coloring


@dataclass(frozen=True)
class Block:
    start_pos: int
    end_pos: int
    red_count: int


@dataclass(frozen=True)
class SearchState:
    centers: tuple[Permutation, ...]
    budgets: tuple[int, ...]
    k: int
    d: int

    def __post_init__(self):
        if len(self.centers) != len(self.budgets):
            raise ValueError("one budget per center")
        if len(self.centers) > self.k or any(not 0 <= b <= self.d for b in self.budgets):
            raise ValueError("state outside the search bounds")

    @property
    def measure(self) -> int:
        return (self.k - len(self.centers)) * (self.d + 1) + sum(self.budgets)

    def step(self, i: int, new_center: Permutation) -> "SearchState":
        budgets = list(self.budgets)
        budgets[i] -= 1
        centers = self.centers[:i] + (new_center,) + self.centers[i + 1:]
        return SearchState(centers, tuple(budgets), self.k, self.d)

    def open_cluster(self, center: Permutation) -> "SearchState":
        return SearchState(self.centers + (center,), self.budgets + (self.d,), self.k, self.d)


# ---------------------------------------------------------------------------
# coloring families

@dataclass(frozen=True)
class ColoringFamilyConfig:
    mode: str = "exhaustive"
    seed: int = 0
    failure_exponent: int = 20
    exhaustive_limit: int = 22
    sample_limit: int = 1 << 20

    def __post_init__(self):
        if self.mode not in ("exhaustive", "randomized"):
            raise ConfigError(f"unknown coloring family mode {self.mode!r}")
        if self.failure_exponent < 1:
            raise ConfigError("failure exponent must be positive")
        if self.sample_limit < 1:
            raise ConfigError("sample limit must be positive")


def pattern_width(d: int) -> int:
    """Number of coordinates a fitting coloring pair has to get right."""
    return 12 * d * d + 4 * d


def sample_count(a: int, b: int, failure_exponent: int) -> int:
    """Union-bound sample size for a randomized ``(a, b)``-universal family."""
    ln2 = math.log(2)
    return math.ceil(2 ** b * (b * ln2 + failure_exponent * ln2 + b * math.log(a)))


class UniversalFamily(Sequence):
    """Bitstrings of length ``a``; ``exact`` means the family is the whole cube."""

    def __init__(self, a: int, words: Sequence[int] | None):
        self.a = a
        self._words = words  # None stands for the full cube, enumerated lazily

    @property
    def exact(self) -> bool:
        return self._words is None

    def __len__(self) -> int:
        return (1 << self.a) if self._words is None else len(self._words)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if self._words is None:
            if i < 0:
                i += 1 << self.a
            if not 0 <= i < 1 << self.a:
                raise IndexError(i)
            return i
        return self._words[i]

    def __iter__(self) -> Iterator[int]:
        return iter(range(1 << self.a)) if self._words is None else iter(self._words)


def universal_family(a: int, b: int, cfg: ColoringFamilyConfig) -> UniversalFamily:
    """An ``(a, b)``-universal family of ``a``-bit words (exactly, or with high probability)."""
    if a < 1:
        raise InputError("word length must be positive")
    if cfg.mode == "exhaustive":
        if a > cfg.exhaustive_limit:
            raise ConfigError(
                f"exhaustive coloring family needs 2^{a} words; limit is 2^{cfg.exhaustive_limit}")
        return UniversalFamily(a, None)
    if b >= a:
        # every pattern on every coordinate set means the whole cube
        if a > cfg.exhaustive_limit:
            raise ConfigError(f"coverage width {b} >= {a} forces the full cube, beyond the limit")
        return UniversalFamily(a, None)
    wanted = sample_count(a, b, cfg.failure_exponent)
    if wanted >= 1 << a and a <= cfg.exhaustive_limit:
        return UniversalFamily(a, None)
    if wanted > cfg.sample_limit:
        warnings.warn(f"randomized coloring family capped at {cfg.sample_limit} of {wanted} samples",
                      WorkWarning, stacklevel=2)
        wanted = cfg.sample_limit
    rng = random.Random(cfg.seed)
    return UniversalFamily(a, [rng.getrandbits(a) for _ in range(wanted)])


class ColoringFamily(Sequence):
    """Coloring pairs over ``n`` symbols: low ``n`` bits color the candidate, high bits the guide."""

    def __init__(self, n: int, d: int, words: UniversalFamily):
        self.n, self.d, self.words = n, d, words

    @property
    def exact(self) -> bool:
        return self.words.exact

    def __len__(self) -> int:
        return len(self.words)

    def split(self, word: int) -> tuple[int, int]:
        return word & ((1 << self.n) - 1), word >> self.n

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        c, g = self.split(self.words[i])
        return ColoringPair(Coloring(self.n, c), Coloring(self.n, g))

    def __iter__(self) -> Iterator[ColoringPair]:
        for w in self.words:
            c, g = self.split(w)
            yield ColoringPair(Coloring(self.n, c), Coloring(self.n, g))

    def mask_pairs(self) -> Iterator[tuple[int, int]]:
        return (self.split(w) for w in self.words)


def coloring_family(n: int, d: int, cfg: ColoringFamilyConfig | None = None) -> ColoringFamily:
    """Coloring pairs that, for every target, include one fitting both permutations."""
    cfg = cfg or ColoringFamilyConfig()
    if n < 1 or d < 1:
        raise InputError("coloring family needs n >= 1 and d >= 1")
    return ColoringFamily(n, d, universal_family(2 * n, pattern_width(d), cfg))


# ---------------------------------------------------------------------------
# blocks

def _check_coloring(p: Permutation, c: Coloring) -> None:
    if len(c) != len(p):
        raise InputError(f"coloring over {len(c)} symbols for a permutation of length {len(p)}")


def _blocks_from_mask(seq: Sequence[int], red: int, d: int) -> list[tuple[int, int, int]]:
    gap = 3 * d
    blocks = []
    start = last = None
    count = 0
    for pos, sym in enumerate(seq):
        if not red >> sym & 1:
            continue
        if last is not None and pos - last - 1 < gap:
            last = pos
            count += 1
            continue
        if last is not None:
            blocks.append((start, last, count))
        start = last = pos
        count = 1
    if last is not None:
        blocks.append((start, last, count))
    return blocks


def compute_blocks(p: Permutation, c: Coloring, d: int) -> list[Block]:
    """Maximal red-delimited stretches of ``p`` without ``3d`` consecutive blues."""
    _check_coloring(p, c)
    return [Block(s, e, r) for s, e, r in _blocks_from_mask(p.seq, c.red, d)]


def _normalize_mask(seq: Sequence[int], red: int, d: int) -> int:
    for start, end, count in _blocks_from_mask(seq, red, d):
        if count > d:
            for pos in range(start, end + 1):
                red &= ~(1 << seq[pos])
    return red


def normalize_blocks(p: Permutation, c: Coloring, d: int) -> Coloring:
    """Recolor every block holding more than ``d`` reds entirely blue."""
    _check_coloring(p, c)
    return Coloring(c.n, _normalize_mask(p.seq, c.red, d))


# ---------------------------------------------------------------------------
# covers and witnesses

def minimal_vertex_covers(g: PermutationGraph, bound: int) -> list[frozenset[int]]:
    """Every inclusion-minimal vertex cover with at most ``bound`` vertices.

    Branches on the lowest uncovered edge (lowest endpoint first) to depth
    ``bound``, then drops non-minimal and duplicate covers.
    """
    edges = sorted(g.edges)
    adj = g.adjacency()
    found: dict[frozenset[int], None] = {}

    def branch(cover: frozenset[int], depth: int) -> None:
        for u, v in edges:
            if u not in cover and v not in cover:
                break
        else:
            found.setdefault(cover, None)
            return
        if depth == bound:
            return
        branch(cover | {u}, depth + 1)
        branch(cover | {v}, depth + 1)

    branch(frozenset(), 0)
    return [c for c in found if all(any(w not in c for w in adj[v]) for v in c)]


def pick_witness_symbol(cover: Iterable[int], pair: ColoringPair) -> int | None:
    """Smallest symbol of ``cover`` that is red for the candidate and blue for the guide."""
    best = None
    for x in cover:
        if pair.cand.is_red(x) and not pair.guide.is_red(x) and (best is None or x < best):
            best = x
    return best


def _min_witness(cover_mask: int, cand: int, guide: int) -> int | None:
    hits = cover_mask & cand & ~guide
    if not hits:
        return None
    return (hits & -hits).bit_length() - 1


# ---------------------------------------------------------------------------
# progress candidates

def _anchors(pg: Permutation, x: int, blue_both: int) -> tuple[int | None, int | None]:
    pos = pg.inv[x]
    seq = pg.seq
    left = right = None
    for i in range(pos - 1, -1, -1):
        if blue_both >> seq[i] & 1:
            left = seq[i]
            break
    for i in range(pos + 1, len(seq)):
        if blue_both >> seq[i] & 1:
            right = seq[i]
            break
    return left, right


def _reinsertions(pc: Permutation, x: int, left: int | None, right: int | None,
                  cap: int) -> list[Permutation]:
    seq = pc.seq
    home = pc.inv[x]
    rest = seq[:home] + seq[home + 1:]
    # slot j inserts x before rest[j]; anchors are located in rest
    lo = 0 if left is None else _pos_in_rest(pc, left, home) + 1
    hi = len(rest) if right is None else _pos_in_rest(pc, right, home)
    if lo > hi:
        return []
    slots = range(lo, hi + 1)
    if len(slots) > cap:
        keep = sorted(slots, key=lambda j: (abs(j - home), j))[:cap]
        slots = sorted(keep)
    return [Permutation._trusted(rest[:j] + (x,) + rest[j:]) for j in slots]


def _pos_in_rest(pc: Permutation, sym: int, home: int) -> int:
    p = pc.inv[sym]
    return p - 1 if p > home else p


def progress_candidates(pc: Permutation, pg: Permutation, x: int, pair: ColoringPair,
                        d: int) -> list[Permutation]:
    """Permutations obtained by moving ``x`` in ``pc`` between its blue anchors from ``pg``.

    The anchors are the nearest symbols left and right of ``x`` in ``pg``
    that are blue in both colorings (phantom ends when there are none).
    At most ``6d + 2`` slots are kept, those nearest ``x``'s current position.
    """
    if len(pc) != len(pg):
        raise InputError("permutation lengths differ")
    if not 0 <= x < len(pc):
        raise InputError(f"symbol {x} not in the alphabet")
    _check_coloring(pc, pair.cand)
    _check_coloring(pg, pair.guide)
    full = (1 << len(pc)) - 1
    blue_both = full & ~(pair.cand.red | pair.guide.red)
    left, right = _anchors(pg, x, blue_both)
    return _reinsertions(pc, x, left, right, 6 * d + 2)


# ---------------------------------------------------------------------------
# guide sets

class _NormalizedMasks:
    """Distinct block-normalized colorings of one permutation, cached across calls."""

    def __init__(self, limit: int = 4096):
        self._cache: dict[tuple, object] = {}
        self._limit = limit

    def all_masks(self, p: Permutation, d: int) -> list[int]:
        key = ("all", p.seq, d)
        hit = self._cache.get(key)
        if hit is None:
            seen = dict.fromkeys(_normalize_mask(p.seq, m, d) for m in range(1 << len(p)))
            hit = list(seen)
            self._store(key, hit)
        return hit

    def one(self, p: Permutation, mask: int, d: int) -> int:
        key = (p.seq, mask, d)
        hit = self._cache.get(key)
        if hit is None:
            hit = _normalize_mask(p.seq, mask, d)
            self._store(key, hit)
        return hit

    def _store(self, key, value) -> None:
        if len(self._cache) >= self._limit:
            self._cache.clear()
        self._cache[key] = value


_DEFAULT_MASKS = _NormalizedMasks()


def _family_mask_pairs(family) -> Iterator[tuple[int, int]]:
    if isinstance(family, ColoringFamily):
        return family.mask_pairs()
    return ((pair.cand.red, pair.guide.red) for pair in family)


def guide_set(pc: Permutation, pg: Permutation, d: int, family,
              *, masks: _NormalizedMasks | None = None) -> list[Permutation]:
    """Permutations one step from ``pc``, among which one approaches any common center.

    For each coloring pair of ``family``: normalize both colorings, pick a
    witness symbol from every minimal vertex cover of the inversion graph
    of size at most ``2d``, and collect its progress candidates.  Output is
    deduplicated in first-seen order.
    """
    if len(pc) != len(pg):
        raise InputError("permutation lengths differ")
    if d < 1:
        raise InputError("guide sets need d >= 1")
    dist = ulam_distance(pc, pg)
    if not d < dist <= 2 * d:
        raise InputError(f"guide set needs d < dist(pc, pg) <= 2d; got dist {dist} with d={d}")
    masks = masks or _DEFAULT_MASKS
    n = len(pc)
    full = (1 << n) - 1
    cover_masks = [sum(1 << v for v in c)
                   for c in minimal_vertex_covers(permutation_graph(pc, pg), 2 * d)]
    cap = 6 * d + 2
    out: dict[Permutation, None] = {}
    done: set[tuple] = set()

    def collect(cn: int, gn: int) -> None:
        blue_both = full & ~(cn | gn)
        for cm in cover_masks:
            x = _min_witness(cm, cn, gn)
            if x is None:
                continue
            left, right = _anchors(pg, x, blue_both)
            key = (x, left, right)
            if key in done:
                continue
            done.add(key)
            for q in _reinsertions(pc, x, left, right, cap):
                out.setdefault(q, None)

    if isinstance(family, ColoringFamily) and family.exact:
        for cn, gn in product(masks.all_masks(pc, d), masks.all_masks(pg, d)):
            collect(cn, gn)
    else:
        seen_pairs: set[tuple[int, int]] = set()
        for cm, gm in _family_mask_pairs(family):
            pair = (masks.one(pc, cm, d), masks.one(pg, gm, d))
            if pair not in seen_pairs:
                seen_pairs.add(pair)
                collect(*pair)
    return list(out)


# ---------------------------------------------------------------------------
# the branching solver

@dataclass
class KCenterResult:
    verdict: str  # "yes", "no" or "no_probabilistic"
    centers: tuple[Permutation, ...] = ()
    assignment: tuple[int, ...] = ()
    radius: int | None = None
    stats: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.verdict == "yes"


class _Cancelled(Exception):
    pass


class _Search:
    def __init__(self, inst: Instance, family: ColoringFamily | None, cancel=None, index=0):
        self.inst = inst
        self.family = family
        self.k, self.d = inst.k, inst.d
        self.nodes = 0
        self.guide_calls = 0
        self._guides: dict[tuple, list[Permutation]] = {}
        self._covered: dict[tuple, bool] = {}
        self._masks = _NormalizedMasks()
        self._cancel = cancel
        self._index = index

    def covers(self, j: int, center: Permutation) -> bool:
        key = (j, center)
        hit = self._covered.get(key)
        if hit is None:
            if len(self._covered) > 1_000_000:
                self._covered.clear()
            hit = distance_at_most(self.inst.pi[j], center, self.d)
            self._covered[key] = hit
        return hit

    def first_uncovered(self, centers) -> int | None:
        for j in range(self.inst.m):
            if not any(self.covers(j, c) for c in centers):
                return j
        return None

    def guides(self, pc: Permutation, pg: Permutation) -> list[Permutation]:
        key = (pc, pg)
        hit = self._guides.get(key)
        if hit is None:
            self.guide_calls += 1
            if len(self._guides) > 200_000:
                self._guides.clear()
            hit = guide_set(pc, pg, self.d, self.family, masks=self._masks)
            self._guides[key] = hit
        return hit

    def children(self, state: SearchState, j: int) -> Iterator[SearchState]:
        pi = self.inst.pi[j]
        for i, (c, b) in enumerate(zip(state.centers, state.budgets)):
            if b > 0 and distance_at_most(pi, c, 2 * self.d):
                for c2 in self.guides(c, pi):
                    yield state.step(i, c2)
        if len(state.centers) < self.k:
            yield state.open_cluster(pi)

    def run(self, state: SearchState) -> SearchState | None:
        self.nodes += 1
        if self._cancel is not None and self.nodes & 255 == 0 and self._cancel.value < self._index:
            raise _Cancelled
        j = self.first_uncovered(state.centers)
        if j is None:
            return state
        mu = state.measure
        for child in self.children(state, j):
            assert child.measure == mu - 1, "search measure must drop by one per branch"
            found = self.run(child)
            if found is not None:
                return found
        return None

    def frontier(self, state: SearchState, depth: int) -> list[tuple[str, SearchState]]:
        """DFS-ordered split of the tree: accepted states and subtree roots at ``depth``."""
        self.nodes += 1
        j = self.first_uncovered(state.centers)
        if j is None:
            return [("accept", state)]
        if depth == 0:
            self.nodes -= 1  # the worker will count this node
            return [("open", state)]
        out = []
        for child in self.children(state, j):
            out.extend(self.frontier(child, depth - 1))
        return out


_WORKER: dict = {}


def _worker_init(inst, cfg, cancel):
    _WORKER["inst"] = inst
    _WORKER["family"] = coloring_family(inst.n, inst.d, cfg)
    _WORKER["cancel"] = cancel


def _worker_run(index: int, state: SearchState):
    search = _Search(_WORKER["inst"], _WORKER["family"], _WORKER["cancel"], index)
    try:
        found = search.run(state)
    except _Cancelled:
        return index, "cancelled", None, search.nodes, search.guide_calls
    if found is not None:
        with _WORKER["cancel"].get_lock():
            if _WORKER["cancel"].value > index:
                _WORKER["cancel"].value = index
    return index, "done", found, search.nodes, search.guide_calls


def _run_parallel(search: _Search, root: SearchState, cfg: ColoringFamilyConfig, threads: int):
    depth = 1
    tasks = search.frontier(root, depth)
    while len(tasks) < 4 * threads and depth < search.k * (search.d + 1):
        depth += 1
        search.nodes = 0
        tasks = search.frontier(root, depth)
    # tasks are in DFS order, so the lowest-index success is the one a serial run finds
    cancel = mp.Value("q", len(tasks) + 1)
    results: dict[int, tuple] = {}
    with ProcessPoolExecutor(max_workers=threads, initializer=_worker_init,
                             initargs=(search.inst, cfg, cancel)) as pool:
        futures = {}
        for i, (kind, state) in enumerate(tasks):
            if kind == "accept":
                results[i] = ("done", state)
                with cancel.get_lock():
                    if cancel.value > i:
                        cancel.value = i
                break
            futures[i] = pool.submit(_worker_run, i, state)
        for i, fut in futures.items():
            if fut.cancelled():
                continue
            if i > cancel.value:
                fut.cancel()
                if fut.cancelled():
                    continue
            idx, status, found, nodes, calls = fut.result()
            search.nodes += nodes
            search.guide_calls += calls
            results[idx] = (status, found)
    for i in sorted(results):
        status, found = results[i]
        if status == "done" and found is not None:
            return found
    return None


def solve_kcenter(inst: Instance, cfg: ColoringFamilyConfig | None = None,
                  *, threads: int = 1) -> KCenterResult:
    """Decide whether ``k`` centers cover every input within distance ``d``."""
    from .oracles import verify_center_solution

    cfg = cfg or ColoringFamilyConfig()
    started = time.perf_counter()
    stats = {"nodes_expanded": 0, "family_size": 0, "guide_set_calls": 0}

    def finish(verdict, centers=()):
        stats["elapsed_ms"] = round((time.perf_counter() - started) * 1000, 3)
        if verdict != "yes":
            return KCenterResult(verdict, stats=stats)
        ok, radius, assignment = verify_center_solution(inst, centers)
        if not ok:
            raise AssertionError("solver produced centers that do not verify")
        return KCenterResult("yes", tuple(centers), assignment, radius, stats)

    distinct = inst.distinct()
    if inst.m == 0:
        return finish("yes", (Permutation.identity(inst.n),))
    if inst.d == 0:
        return finish("yes", distinct) if len(distinct) <= inst.k else finish("no")
    if len(distinct) <= inst.k:
        return finish("yes", distinct)

    family = coloring_family(inst.n, inst.d, cfg)
    stats["family_size"] = len(family)
    search = _Search(inst, family)
    root = SearchState((inst.pi[0],), (inst.d,), inst.k, inst.d)
    if threads > 1:
        found = _run_parallel(search, root, cfg, threads)
    else:
        found = search.run(root)
    stats["nodes_expanded"] = search.nodes
    stats["guide_set_calls"] = search.guide_calls
    if found is not None:
        return finish("yes", found.centers)
    return finish("no" if family.exact else "no_probabilistic")
