"""Shared generators and strategies for the test suite."""

import random
from pathlib import Path

from hypothesis import strategies as st

from ulamclust.permcore import Instance, Permutation, SymbolTable, apply_move

DATA = Path(__file__).parent / "data"

# lines collected by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def rand_perm(rng: random.Random, n: int) -> Permutation:
    seq = list(range(n))
    rng.shuffle(seq)
    return Permutation(seq)


def random_walk(rng: random.Random, p: Permutation, steps: int) -> Permutation:
    n = len(p)
    for _ in range(steps):
        p = apply_move(p, rng.randrange(n), rng.randrange(n))
    return p


def make_instance(perms, k, d, n=None) -> Instance:
    n = len(perms[0]) if n is None else n
    return Instance(SymbolTable.default(n), list(perms), k, d)


@st.composite
def permutations(draw, min_n=1, max_n=8, n=None):
    size = draw(st.integers(min_n, max_n)) if n is None else n
    return Permutation(draw(st.permutations(range(size))))


@st.composite
def permutation_pairs(draw, min_n=1, max_n=8):
    size = draw(st.integers(min_n, max_n))
    return (Permutation(draw(st.permutations(range(size)))),
            Permutation(draw(st.permutations(range(size)))))
