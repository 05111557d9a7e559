"""Brute-force reference solvers and solution verifiers.

Everything here is deliberately naive: enumerate, measure, compare.  Size
guards refuse inputs that would make enumeration hopeless instead of
silently running for hours.  ``ULAM_WORK_LIMIT`` raises the work guard.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations
from typing import Sequence

import numpy as np

from .errors import GuardError, InputError
from .permcore import Instance, Permutation, ulam_distance

DEFAULT_WORK_LIMIT = 20_000_000


def work_limit(default: int = DEFAULT_WORK_LIMIT) -> int:
    raw = os.environ.get("ULAM_WORK_LIMIT")
    if raw:
        try:
            return int(float(raw))
        except ValueError:
            raise InputError(f"ULAM_WORK_LIMIT is not a number: {raw!r}") from None
    return default


@dataclass(frozen=True)
class Witness:
    perms: tuple[Permutation, ...]
    assignment: tuple[int, ...]
    value: int  # radius for k-center, total cost for k-median


@dataclass(frozen=True)
class Verdict:
    feasible: bool
    witness: Witness | None = None
    optimum: int | None = None  # best radius/cost found, when the oracle computes it

    def __post_init__(self):
        if self.feasible != (self.witness is not None):
            raise ValueError("witness must be present iff feasible")


# ---------------------------------------------------------------------------
# definitional distance oracle

_BFS_TABLES: dict[int, tuple[dict, list, int]] = {}


def _bfs_table(n: int, depth: int) -> dict:
    """Move-BFS from the identity of length ``n``, explored to ``depth`` layers."""
    dist, frontier, reached = _BFS_TABLES.get(n, (None, None, -1))
    if dist is None:
        start = tuple(range(n))
        dist, frontier, reached = {start: 0}, [start], 0
    while reached < depth and frontier:
        nxt = []
        for s in frontier:
            for i in range(n):
                rest = s[:i] + s[i + 1:]
                for j in range(n):
                    if j == i:
                        continue
                    t = rest[:j] + (s[i],) + rest[j:]
                    if t not in dist:
                        dist[t] = reached + 1
                        nxt.append(t)
        frontier = nxt
        reached += 1
    _BFS_TABLES[n] = (dist, frontier, reached)
    return dist


def bfs_ulam_distance(a: Permutation, b: Permutation, cap: int | None = None,
                      *, max_n: int = 8) -> int | None:
    """Fewest single moves turning ``a`` into ``b`` by breadth-first search.

    Returns ``None`` when more than ``cap`` moves are needed.  Both inputs
    are renamed so that ``a`` becomes the identity; renaming symbols commutes
    with moves, so one cached BFS tree per length serves every query.
    """
    n = len(a)
    if len(b) != n:
        raise InputError("permutation lengths differ")
    if n > max_n:
        raise GuardError(f"bfs_ulam_distance refuses n={n} > {max_n}")
    if cap is None:
        cap = max(n - 1, 0)
    if cap < 0:
        raise InputError("cap must be non-negative")
    target = tuple(a.inv[s] for s in b.seq)
    table = _bfs_table(n, cap)
    depth = table.get(target)
    if depth is None or depth > cap:
        return None
    return depth


# ---------------------------------------------------------------------------
# verifiers

def _check_alphabet(inst: Instance, perms: Sequence[Permutation]) -> None:
    for p in perms:
        if len(p) != inst.n:
            raise InputError(f"solution permutation of length {len(p)} for alphabet of size {inst.n}")


def _nearest(inst: Instance, perms: Sequence[Permutation]):
    dists, assignment = [], []
    for p in inst.pi:
        best, arg = None, -1
        for i, c in enumerate(perms):
            dv = ulam_distance(p, c)
            if best is None or dv < best:
                best, arg = dv, i
        dists.append(best)
        assignment.append(arg)
    return dists, tuple(assignment)


def verify_center_solution(inst: Instance, centers: Sequence[Permutation]):
    """Return ``(ok, radius, assignment)``; ties go to the lowest center index.

    ``ok`` also requires at most ``k`` distinct centers.
    """
    _check_alphabet(inst, centers)
    if inst.m == 0:
        return len(set(centers)) <= inst.k, 0, ()
    if not centers:
        return False, None, ()
    dists, assignment = _nearest(inst, centers)
    radius = max(dists)
    return radius <= inst.d and len(set(centers)) <= inst.k, radius, assignment


def verify_median_solution(inst: Instance, medians: Sequence[Permutation]):
    """Return ``(ok, cost, assignment)``; an empty median set never verifies when m > 0."""
    _check_alphabet(inst, medians)
    if inst.m == 0:
        return len(set(medians)) <= inst.k, 0, ()
    if not medians:
        return False, None, ()
    dists, assignment = _nearest(inst, medians)
    cost = sum(dists)
    return cost <= inst.d and len(set(medians)) <= inst.k, cost, assignment


# ---------------------------------------------------------------------------
# vectorized helpers for the enumerating oracles

def _lis_rows(rows: np.ndarray) -> np.ndarray:
    """Longest increasing subsequence length of every row (patience sorting)."""
    count, n = rows.shape
    big = n + 1
    tails = np.full((count, n + 1), big, dtype=np.int16)
    idx = np.arange(count)
    for j in range(n):
        v = rows[:, j].astype(np.int16)
        pos = (tails < v[:, None]).sum(axis=1)
        tails[idx, pos] = v
    return (tails < big).sum(axis=1)


def _distances_to(cands: np.ndarray, target: Permutation) -> np.ndarray:
    inv = np.asarray(target.inv, dtype=np.int16)
    return cands.shape[1] - _lis_rows(inv[cands])


def _unique_rows(arr: np.ndarray) -> np.ndarray:
    if len(arr) == 0:
        return arr
    arr = np.ascontiguousarray(arr)
    view = arr.view(np.dtype((np.void, arr.dtype.itemsize * arr.shape[1]))).ravel()
    _, idx = np.unique(view, return_index=True)
    return arr[np.sort(idx)]


def _move_index_table(n: int) -> np.ndarray:
    moves = []
    base = list(range(n))
    for i in range(n):
        rest = base[:i] + base[i + 1:]
        for j in range(n):
            if j != i:
                moves.append(rest[:j] + [i] + rest[j:])
    return np.asarray(moves, dtype=np.intp).reshape(-1, n)


def _ball(p: Permutation, radius: int) -> np.ndarray:
    """Every permutation within ``radius`` moves of ``p`` (rows of symbol ids)."""
    n = len(p)
    start = np.asarray([p.seq], dtype=np.int8 if n < 128 else np.int16)
    if radius == 0 or n < 2:
        return start
    table = _move_index_table(n)
    layers = [start]
    frontier = start
    for _ in range(radius):
        grown = frontier[:, table].reshape(-1, n)
        frontier = _unique_rows(grown)
        layers.append(frontier)
    return _unique_rows(np.concatenate(layers))


def _all_perms(n: int) -> np.ndarray:
    return np.asarray(list(permutations(range(n))), dtype=np.int8).reshape(-1, n)


def _record_masks(first: dict, cands: np.ndarray, masks: np.ndarray) -> None:
    for ci, mask in enumerate(masks.tolist()):
        if mask and mask not in first:
            first[mask] = tuple(int(x) for x in cands[ci])


def _maximal_masks(masks: dict[int, tuple]) -> list[tuple[int, tuple]]:
    # a center whose coverage is a strict subset of another's is never needed
    items = list(masks.items())
    keep = []
    for mask, ci in items:
        if any(mask != other and mask & other == mask for other, _ in items):
            continue
        keep.append((mask, ci))
    return keep


# ---------------------------------------------------------------------------
# enumerating oracles

# coverage depends only on the inputs and d, so sweeps over k reuse it
_COVERAGE_CACHE: dict = {}


def _coverage_options(inst: Instance, use_all: bool, max_n: int, limit: int):
    """Maximal coverage masks over the inputs, each with one center achieving it."""
    n, d = inst.n, inst.d
    first: dict[int, tuple[int, ...]] = {}
    if use_all:
        if n > max_n:
            raise GuardError(f"brute_kcenter refuses n={n} > {max_n}")
        if math.factorial(n) * inst.m > limit:
            raise GuardError("brute_kcenter work limit exceeded")
        cands = _all_perms(n)
        masks = np.zeros(len(cands), dtype=np.int64)
        for j, p in enumerate(inst.pi):
            masks |= (_distances_to(cands, p) <= d).astype(np.int64) << j
        _record_masks(first, cands, masks)
    else:
        estimate = len(inst.distinct()) * max(n - 1, 1) ** (2 * d)
        if estimate > limit:
            raise GuardError(f"brute_kcenter ball enumeration too large ({estimate} > {limit})")
        # a center covering q lies within d of q, so scanning every input's
        # d-ball finds all useful centers; only inputs within 2d of the ball's
        # owner can share a center with it
        for p in inst.distinct():
            cands = _ball(p, d)
            masks = np.zeros(len(cands), dtype=np.int64)
            for j, q in enumerate(inst.pi):
                if ulam_distance(p, q) <= 2 * d:
                    masks |= (_distances_to(cands, q) <= d).astype(np.int64) << j
            _record_masks(first, cands, masks)

    return _maximal_masks(first)


def brute_kcenter(inst: Instance, *, max_n: int = 6, max_k: int = 2,
                  candidates: str = "auto", limit: int | None = None) -> Verdict:
    """Decide k-center by enumerating candidate centers.

    ``candidates="all"`` scans every permutation of the alphabet (``n <= max_n``).
    ``candidates="balls"`` scans the radius-``d`` balls around the inputs:
    a center that covers anything lies in one of them, so nothing is lost.
    ``"auto"`` picks ``all`` when the guard allows it.
    """
    if inst.m == 0:
        return Verdict(True, Witness((), (), 0))
    if inst.k > max_k:
        raise GuardError(f"brute_kcenter refuses k={inst.k} > {max_k}")
    if inst.m > 62:
        raise GuardError(f"brute_kcenter refuses m={inst.m} > 62")
    limit = work_limit() if limit is None else limit
    n, d = inst.n, inst.d
    if candidates not in ("auto", "all", "balls"):
        raise InputError(f"unknown candidate strategy {candidates!r}")
    use_all = candidates == "all" or (candidates == "auto" and n <= max_n)
    key = (tuple(p.seq for p in inst.pi), n, d, use_all)
    options = _COVERAGE_CACHE.get(key)
    if options is None:
        options = _coverage_options(inst, use_all, max_n, limit)
        if len(_COVERAGE_CACHE) >= 8:
            _COVERAGE_CACHE.clear()
        _COVERAGE_CACHE[key] = options
    full = (1 << inst.m) - 1
    for combo in combinations_with_replacement(range(len(options)), inst.k):
        acc = 0
        for i in combo:
            acc |= options[i][0]
        if acc == full:
            centers = tuple(dict.fromkeys(Permutation(options[i][1]) for i in combo))
            ok, radius, assignment = verify_center_solution(inst, centers)
            assert ok
            return Verdict(True, Witness(centers, assignment, radius))
    return Verdict(False)


def brute_kmedian(inst: Instance, *, max_n: int = 5, max_k: int = 2,
                  limit: int | None = None) -> Verdict:
    """Decide k-median by scanning every k-multiset of permutations of the alphabet."""
    if inst.m == 0:
        return Verdict(True, Witness((), (), 0), optimum=0)
    n = inst.n
    if n > max_n:
        raise GuardError(f"brute_kmedian refuses n={n} > {max_n}")
    if inst.k > max_k:
        raise GuardError(f"brute_kmedian refuses k={inst.k} > {max_k}")
    limit = work_limit() if limit is None else limit
    total = math.factorial(n)
    if math.comb(total + inst.k - 1, inst.k) * inst.m > limit:
        raise GuardError("brute_kmedian work limit exceeded")
    cands = _all_perms(n)
    dist = np.stack([_distances_to(cands, p) for p in inst.pi], axis=1).astype(np.int64)

    best_cost, best_combo = None, None
    if inst.k == 1:
        sums = dist.sum(axis=1)
        i = int(np.argmin(sums))
        best_cost, best_combo = int(sums[i]), (i,)
    elif inst.k == 2:
        for i in range(total):
            sums = np.minimum(dist[i], dist[i:]).sum(axis=1)
            j = int(np.argmin(sums))
            if best_cost is None or sums[j] < best_cost:
                best_cost, best_combo = int(sums[j]), (i, i + j)
    else:
        for combo in combinations_with_replacement(range(total), inst.k):
            cost = int(dist[list(combo)].min(axis=0).sum())
            if best_cost is None or cost < best_cost:
                best_cost, best_combo = cost, combo

    if best_cost > inst.d:
        return Verdict(False, optimum=best_cost)
    medians = tuple(dict.fromkeys(
        Permutation(tuple(int(x) for x in cands[i])) for i in best_combo))
    ok, cost, assignment = verify_median_solution(inst, medians)
    assert ok and cost == best_cost
    return Verdict(True, Witness(medians, assignment, cost), optimum=best_cost)


def bfs_queue_check(a: Permutation, b: Permutation, cap: int) -> int | None:
    """Plain BFS from ``a`` without the renaming trick; slow, used to audit the cache."""
    if a == b:
        return 0
    n = len(a)
    seen = {a.seq}
    queue = deque([(a.seq, 0)])
    while queue:
        s, depth = queue.popleft()
        if depth == cap:
            continue
        for i in range(n):
            rest = s[:i] + s[i + 1:]
            for j in range(n):
                if j == i:
                    continue
                t = rest[:j] + (s[i],) + rest[j:]
                if t == b.seq:
                    return depth + 1
                if t not in seen:
                    seen.add(t)
                    queue.append((t, depth + 1))
    return None
