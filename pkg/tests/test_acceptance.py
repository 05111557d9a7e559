"""Acceptance suite: one test per primary criterion, each printing a PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) or through pytest, which
repeats the lines in its terminal summary.
"""

import itertools
import random
import sys
import time
import warnings
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import ACCEPTANCE_LINES, DATA, make_instance, rand_perm, random_walk  # noqa: E402
from ulamclust import formats  # noqa: E402
from ulamclust.kcenter import (ColoringFamilyConfig, coloring_family, guide_set,  # noqa: E402
                               solve_kcenter)
from ulamclust.kmedian import (PairSchemeString, hamming, kernelize,  # noqa: E402
                               maximal_common_substrings, pair_scheme_encode, solve_kmedian,
                               xp_solve)
from ulamclust.oracles import (bfs_ulam_distance, brute_kcenter, brute_kmedian,  # noqa: E402
                               verify_center_solution, verify_median_solution)
from ulamclust.permcore import Instance, Permutation, ulam_distance  # noqa: E402
from ulamclust.reductions import (SimpleGraph, gen_center_from_vertex_cover,  # noqa: E402
                                  gen_median_from_multicolored_clique, mcc_sigma_from_clique,
                                  min_vertex_cover)


def report(number: int, title: str, ok: bool, detail: str, started: float, limit_s: float):
    elapsed = time.perf_counter() - started
    within = elapsed < limit_s
    status = "PASS" if ok and within else "FAIL"
    line = (f"[{status}] criterion {number:>2}: {title} -- {detail} "
            f"({elapsed:.1f}s, limit {limit_s:.0f}s)")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert within, line


# ---------------------------------------------------------------------------
# shared instance suites

def center_suite():
    """200 seeded k-center instances with n <= 6, m <= 5, k <= 2, d <= 2."""
    # mostly planted near-misses with d >= 1, so the branching search does real work
    rng = random.Random(2024)
    out = []
    for t in range(200):
        if t % 20 == 0:
            n, m, d = rng.randint(1, 6), rng.randint(1, 5), 0
        else:
            n, m, d = rng.randint(3, 6), rng.randint(2, 5), rng.randint(1, 2)
        k = rng.randint(1, 2)
        if t % 4 != 3:
            cs = [rand_perm(rng, n) for _ in range(k)]
            pi = [random_walk(rng, rng.choice(cs), rng.randint(1, 2 * d + 1)) for _ in range(m)]
        else:
            pi = [rand_perm(rng, n) for _ in range(m)]
        out.append(make_instance(pi, k, d))
    return out


def median_suite(seed, count, max_n, max_m):
    rng = random.Random(seed)
    out = []
    for t in range(count):
        n, m = rng.randint(1, max_n), rng.randint(1, max_m)
        k, d = rng.randint(1, 2), rng.randint(0, 2)
        if t % 4 == 3:
            pi = [rand_perm(rng, n) for _ in range(m)]
        else:
            cs = [rand_perm(rng, n) for _ in range(k)]
            pi = [random_walk(rng, rng.choice(cs), rng.randint(0, 2)) for _ in range(m)]
        out.append(make_instance(pi, k, d))
    return out


# ---------------------------------------------------------------------------

def test_criterion_01_distance_oracle():
    started = time.perf_counter()
    checked = bad = 0
    for n in range(1, 5):
        perms = [Permutation(s) for s in itertools.permutations(range(n))]
        for a, b in itertools.product(perms, repeat=2):
            checked += 1
            bad += ulam_distance(a, b) != bfs_ulam_distance(a, b)
    rng = random.Random(1)
    for n in (5, 6, 7):
        for _ in range(1000):
            a, b = rand_perm(rng, n), rand_perm(rng, n)
            checked += 1
            bad += ulam_distance(a, b) != bfs_ulam_distance(a, b)
    report(1, "distance vs move-BFS", bad == 0, f"{checked} pairs, {bad} mismatches", started, 60)


def test_criterion_02_figure1():
    started = time.perf_counter()
    g = formats.parse_graph((DATA / "figure1.graph").read_text())
    inst = gen_center_from_vertex_cover(g, 2, 1)
    golden = formats.emit_instance(inst) == (DATA / "figure1.inst").read_text()
    yes = solve_kcenter(inst)
    ok_yes = yes.verdict == "yes" and verify_center_solution(inst, yes.centers)[:2] == (True, 1)
    no = solve_kcenter(Instance(inst.table, inst.pi, 1, 1))
    ok = golden and ok_yes and no.verdict == "no"
    report(2, "figure-1 instance", ok,
           f"golden={golden}, k=2 -> {yes.verdict} radius {yes.radius}, k=1 -> {no.verdict}",
           started, 5)


def test_criterion_03_hamming_to_ulam():
    started = time.perf_counter()
    checked = bad = 0

    def check(s, t):
        nonlocal checked, bad
        checked += 1
        bad += hamming(s, t) != ulam_distance(pair_scheme_encode(s), pair_scheme_encode(t))

    for length in range(1, 5):
        words = [PairSchemeString(bits) for bits in itertools.product((0, 1), repeat=length)]
        for s, t in itertools.product(words, repeat=2):
            check(s, t)
    rng = random.Random(3)
    for _ in range(1000):
        length = rng.randint(1, 10)
        s = PairSchemeString(tuple(rng.randint(0, 1) for _ in range(length)))
        t = PairSchemeString(tuple(rng.randint(0, 1) for _ in range(length)))
        check(s, t)
    report(3, "pair-scheme distance preservation", bad == 0,
           f"{checked} pairs, {bad} mismatches", started, 10)


def test_criterion_04_kcenter_vs_oracle():
    started = time.perf_counter()
    disagree = unverified = yes = 0
    for inst in center_suite():
        res = solve_kcenter(inst)
        disagree += res.feasible != brute_kcenter(inst).feasible
        if res.feasible:
            yes += 1
            unverified += not verify_center_solution(inst, res.centers)[0]
    report(4, "k-center solver vs brute force", disagree == 0 and unverified == 0,
           f"200 instances ({yes} yes), {disagree} disagreements, {unverified} unverified",
           started, 600)


def test_criterion_05_guide_set_progress():
    started = time.perf_counter()
    rng = random.Random(5)
    done = fails = 0
    families = {}
    while done < 500:
        d = rng.choice((1, 2))
        n = rng.randint(2 * d + 1, 9)
        sigma = rand_perm(rng, n)
        pc = random_walk(rng, sigma, rng.randint(1, d))
        pg = random_walk(rng, sigma, rng.randint(0, d))
        dc = ulam_distance(pc, sigma)
        if not (1 <= dc <= d and ulam_distance(pg, sigma) <= d
                and d < ulam_distance(pc, pg) <= 2 * d):
            continue
        done += 1
        fam = families.setdefault((n, d), coloring_family(n, d))
        out = guide_set(pc, pg, d, fam)
        fails += not any(ulam_distance(q, sigma) < dc for q in out)
    report(5, "guide sets make progress", fails == 0, f"{done} planted triples, {fails} failures",
           started, 300)


def test_criterion_06_xp_vs_oracle():
    started = time.perf_counter()
    disagree = cost_bad = yes = 0
    for inst in median_suite(6, 200, 5, 4):
        res, oracle = xp_solve(inst), brute_kmedian(inst)
        disagree += res.feasible != oracle.feasible
        if res.feasible:
            yes += 1
            cost_bad += res.cost != oracle.optimum
    report(6, "k-median search vs brute force", disagree == 0 and cost_bad == 0,
           f"200 instances ({yes} yes), {disagree} verdict and {cost_bad} cost disagreements",
           started, 600)


def _body_permutation(rep, p, comp):
    body = rep.body(p, comp)
    rank = {s: i for i, s in enumerate(sorted(body))}
    return Permutation([rank[s] for s in body])


def test_criterion_07_kernel():
    started = time.perf_counter()
    verdict_bad = lift_bad = size_bad = run_bad = contracted = trivial = 0
    for inst in median_suite(7, 200, 8, 6):
        reduced, rep = kernelize(inst)
        original = xp_solve(inst)
        verdict_bad += xp_solve(reduced).feasible != original.feasible
        full = solve_kmedian(inst)
        if full.feasible != original.feasible:
            verdict_bad += 1
        elif full.feasible:
            ok, cost, _ = verify_median_solution(inst, full.medians)
            lift_bad += not ok or cost != original.cost
        if rep.trivial_no:
            trivial += 1
            continue
        size_bad += reduced.m > (inst.k + inst.d) * (inst.d + 1)
        if rep.substrings_contracted:
            contracted += 1
            for ci, members in enumerate(rep.components):
                bodies = [_body_permutation(rep, reduced.pi[j], ci) for j in members]
                run_bad += max(len(ch) for ch in maximal_common_substrings(bodies)) > inst.d + 1
    ok = verdict_bad == lift_bad == size_bad == run_bad == 0
    report(7, "kernel equivalence and bounds", ok,
           f"200 instances ({contracted} contracted, {trivial} trivial no): "
           f"{verdict_bad} verdict, {lift_bad} lift, {size_bad} size, {run_bad} shared-run failures",
           started, 600)


def test_criterion_08_mcc_certificate():
    started = time.perf_counter()
    g = formats.parse_graph((DATA / "k4.graph").read_text())
    inst, params = gen_median_from_multicolored_clique(g, 4)
    sigma = mcc_sigma_from_clique(params, range(4))
    per_edge = [ulam_distance(p, sigma) for p in inst.pi]
    ok_v, cost, _ = verify_median_solution(inst, [sigma])
    ok = ((params.q, inst.k, inst.d, inst.n) == (13, 1, 90, 290)
          and per_edge == [15] * 6 and cost == 90 and ok_v)
    report(8, "multicolored-clique certificate", ok,
           f"q={params.q} k={inst.k} d={inst.d} n={inst.n}, per-edge {sorted(set(per_edge))}, "
           f"total {cost}", started, 30)


def test_criterion_09_vertex_cover_sweep():
    nx = pytest.importorskip("networkx")
    started = time.perf_counter()
    checked = bad = graphs = 0
    for G in nx.graph_atlas_g():
        nv = G.number_of_nodes()
        if nv == 0 or nv > 6 or any(nx.triangles(G).values()):
            continue
        graphs += 1
        g = SimpleGraph.from_edges(nv, list(G.edges()))
        mvc = min_vertex_cover(g)
        for d in (1, 2):
            for k in (1, 2, 3):
                v = brute_kcenter(gen_center_from_vertex_cover(g, k, d), max_k=3)
                checked += 1
                bad += v.feasible != (mvc <= k)
    report(9, "vertex-cover reduction sweep", bad == 0,
           f"{graphs} triangle-free graphs, {checked} (graph, k', d) checks, {bad} mismatches",
           started, 900)


def test_criterion_10_universality():
    started = time.perf_counter()
    checked = bad = 0
    for n in range(1, 7):
        fam = coloring_family(n, 1)
        words = list(fam.words)
        a = 2 * n
        for b in range(1, min(3, a) + 1):
            for coords in itertools.combinations(range(a), b):
                seen = {tuple(w >> c & 1 for c in coords) for w in words}
                checked += 1
                bad += len(seen) != 2 ** b
    report(10, "exhaustive family universality", bad == 0,
           f"{checked} coordinate sets over 2n <= 12, b <= 3, {bad} missing patterns",
           started, 60)


def test_criterion_11_randomized_family():
    started = time.perf_counter()
    cfg = ColoringFamilyConfig(mode="randomized", seed=11, failure_exponent=20)
    unverified = wrong_way = allowed = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for inst in center_suite():
            res = solve_kcenter(inst, cfg)
            truth = brute_kcenter(inst).feasible
            if res.feasible:
                unverified += not verify_center_solution(inst, res.centers)[0]
                wrong_way += not truth
            elif truth:
                if res.verdict == "no_probabilistic":
                    allowed += 1
                else:
                    wrong_way += 1
    ok = unverified == 0 and wrong_way == 0 and allowed <= 1
    report(11, "randomized family soundness", ok,
           f"200 instances, {unverified} unverified yes, {allowed} probabilistic misses, "
           f"{wrong_way} wrong-direction disagreements", started, 600)


if __name__ == "__main__":
    tests = [obj for name, obj in sorted(globals().items()) if name.startswith("test_criterion")]
    failed = 0
    for test in tests:
        try:
            test()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
