import itertools
import pickle

import pytest
from hypothesis import given, strategies as st

from helpers import DATA, permutation_pairs, permutations
from ulamclust import formats
from ulamclust.errors import InputError
from ulamclust.kmedian import pair_scheme_encode
from ulamclust.oracles import bfs_ulam_distance
from ulamclust.permcore import (Instance, Permutation, SymbolTable, apply_move, distance_at_most,
                                lcs_length, move_neighbors, permutation_graph, ulam_distance)

T3 = SymbolTable(("A", "B", "C"))
T4 = SymbolTable(("A", "B", "C", "D"))


def P(text, table=None):
    table = table or (T3 if len(text.split()) == 3 else T4)
    return table.parse(text)


@pytest.fixture(scope="module")
def figure1():
    return formats.parse_instance((DATA / "figure1.inst").read_text())


def _brute_lcs(a, b):
    n = len(a)
    for size in range(n, -1, -1):
        for idx in itertools.combinations(range(n), size):
            sub = [a.seq[i] for i in idx]
            it = iter(b.seq)
            if all(s in it for s in sub):
                return size
    return 0


# ---------------------------------------------------------------------------
# symbol table and permutation invariants

def test_symbol_table_rejects_duplicates_and_blanks():
    with pytest.raises(InputError):
        SymbolTable(("A", "A"))
    with pytest.raises(InputError):
        SymbolTable(("A", "B C"))


def test_parse_rejects_unknown_and_short():
    with pytest.raises(InputError):
        T3.parse("A B D")
    with pytest.raises(InputError):
        T3.parse("A B")
    with pytest.raises(InputError):
        T3.parse("A A B")


def test_default_table_switches_to_indexed_names():
    assert SymbolTable.default(3).names == ("A", "B", "C")
    assert SymbolTable.default(27).names[-1] == "s27"
    assert SymbolTable.numeric(3).names == ("1", "2", "3")


def test_permutation_rejects_non_permutations():
    with pytest.raises(InputError):
        Permutation([0, 0, 1])
    with pytest.raises(InputError):
        Permutation([1, 2, 3])


@given(permutations(max_n=10))
def test_inverse_is_consistent(p):
    assert all(p.inv[p.seq[i]] == i for i in range(len(p)))


@given(permutations(max_n=8))
def test_permutation_pickles(p):
    q = pickle.loads(pickle.dumps(p))
    assert q == p and hash(q) == hash(p) and q.inv == p.inv


def test_instance_validation():
    with pytest.raises(InputError):
        Instance(T3, [P("A B C")], 0, 1)
    with pytest.raises(InputError):
        Instance(T3, [P("A B C")], 1, -1)
    with pytest.raises(InputError):
        Instance(T3, [P("A B C D")], 1, 1)
    inst = Instance(T3, [P("A B C"), P("B A C"), P("A B C")], 1, 1)
    assert inst.n == 3 and inst.m == 3
    assert inst.distinct() == [P("A B C"), P("B A C")]


# ---------------------------------------------------------------------------
# distance examples

def test_distance_identity():
    assert ulam_distance(P("A B C"), P("A B C")) == 0


def test_distance_figure1_pairs(figure1):
    pi_vw, pi_xz = figure1.pi[0], figure1.pi[3]
    sigma_w = formats.parse_solution((DATA / "sigma_w.perm").read_text(), figure1.table)[0]
    assert ulam_distance(pi_vw, sigma_w) == 1
    assert ulam_distance(pi_vw, pi_xz) == 4
    assert not distance_at_most(pi_vw, pi_xz, 3)
    assert distance_at_most(pi_vw, pi_xz, 4)


def test_distance_single_swap_matches_bfs():
    a, b = P("B A C D"), P("A B C D")
    assert ulam_distance(a, b) == 1 == bfs_ulam_distance(a, b)


def test_distance_length_mismatch():
    with pytest.raises(InputError):
        ulam_distance(P("A B C"), P("A B C D"))


def test_lcs_examples():
    assert lcs_length(P("A B C"), P("A B C")) == 3
    assert lcs_length(P("A B C"), P("C B A")) == 1
    f1, f0 = pair_scheme_encode("00101"), pair_scheme_encode("00000")
    assert lcs_length(f1, f0) == 8 == _brute_lcs(f1, f0)


def test_distance_at_most_examples():
    assert distance_at_most(P("A B C"), P("A B C"), 0)
    assert distance_at_most(P("A B C"), P("C B A"), 2)
    assert not distance_at_most(P("A B C"), P("C B A"), 1)
    with pytest.raises(InputError):
        distance_at_most(P("A B C"), P("A B C"), -1)


@given(permutation_pairs(max_n=7))
def test_lcs_matches_subsequence_search(pair):
    a, b = pair
    assert lcs_length(a, b) == _brute_lcs(a, b)


@given(permutation_pairs(max_n=12))
def test_lcs_identity_and_symmetry(pair):
    a, b = pair
    assert ulam_distance(a, b) + lcs_length(a, b) == len(a)
    assert ulam_distance(a, b) == ulam_distance(b, a)


@given(permutation_pairs(max_n=12), st.integers(0, 12))
def test_threshold_agrees_with_distance(pair, t):
    a, b = pair
    assert distance_at_most(a, b, t) == (ulam_distance(a, b) <= t)


@given(st.integers(1, 9).flatmap(lambda n: st.tuples(*[permutations(n=n)] * 3)))
def test_triangle_inequality(triple):
    a, b, c = triple
    assert ulam_distance(a, c) <= ulam_distance(a, b) + ulam_distance(b, c)


# ---------------------------------------------------------------------------
# moves

def test_apply_move_examples():
    assert apply_move(P("A B C"), 0, 0) == P("A B C")
    assert apply_move(P("A B C"), 0, 2) == P("B C A")
    assert apply_move(P("A B C D"), 3, 0) == P("D A B C")
    with pytest.raises(InputError):
        apply_move(P("A B C"), 0, 3)


@given(permutations(min_n=2, max_n=10), st.data())
def test_move_changes_distance_by_at_most_one(p, data):
    i = data.draw(st.integers(0, len(p) - 1))
    j = data.draw(st.integers(0, len(p) - 1))
    q = apply_move(p, i, j)
    assert q[j] == p[i]
    assert ulam_distance(p, q) == (0 if q == p else 1)


@given(permutations(max_n=6))
def test_move_neighbors_are_the_unit_sphere(p):
    got = set(move_neighbors(p))
    want = {Permutation(s) for s in itertools.permutations(range(len(p)))
            if ulam_distance(p, Permutation(s)) == 1}
    assert got == want


# ---------------------------------------------------------------------------
# permutation graph

def _edge_names(g, table=T3):
    return {"".join(sorted(table.names[s] for s in e)) for e in g.edges}


def test_permutation_graph_examples():
    assert _edge_names(permutation_graph(P("A B C"), P("A B C"))) == set()
    assert _edge_names(permutation_graph(P("A B C"), P("C B A"))) == {"AB", "AC", "BC"}
    assert _edge_names(permutation_graph(P("A B C"), P("A C B"))) == {"BC"}


@given(permutation_pairs(max_n=8))
def test_permutation_graph_empty_iff_equal(pair):
    a, b = pair
    assert (not permutation_graph(a, b).edges) == (a == b)


@given(permutation_pairs(max_n=7))
def test_permutation_graph_independent_sets_are_common_subsequences(pair):
    # the largest independent set equals the LCS
    a, b = pair
    g = permutation_graph(a, b)
    n = len(a)
    best = 0
    for size in range(n, 0, -1):
        if any(all((min(u, v), max(u, v)) not in g.edges for u, v in itertools.combinations(c, 2))
               for c in itertools.combinations(range(n), size)):
            best = size
            break
    assert best == lcs_length(a, b)
