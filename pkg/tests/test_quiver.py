import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from clusterqp.quiver import (
    FrozenVertexError,
    IceQuiver,
    QuiverError,
    exchange_matrix,
    from_matrix,
    matrix_rank,
    mutate,
    mutate_matrix,
)


def Q(n, arrows, m=None):
    return IceQuiver.from_json({"n": n, "m": n if m is None else m, "arrows": arrows})


def sgn(x):
    return (x > 0) - (x < 0)


def matrix_mutation_oracle(b, i):
    k = i - 1
    n = len(b)
    return [[-b[r][c] if k in (r, c) else b[r][c] + sgn(b[r][k]) * max(b[r][k] * b[k][c], 0)
             for c in range(n)] for r in range(n)]


@st.composite
def quivers(draw, max_n=4, max_mult=2):
    n = draw(st.integers(2, max_n))
    m = draw(st.integers(1, n))
    b = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(r + 1, n):
            v = draw(st.integers(-max_mult, max_mult))
            b[r][c], b[c][r] = v, -v
    return from_matrix(b, m)


def test_a2_mutation_reverses():
    q = Q(2, [["a", 1, 2]])
    assert exchange_matrix(mutate(q, 1)) == [[0, -1], [1, 0]]


def test_composition_arrow_added():
    # h=1 -> i=2 -> j=3
    q = Q(3, [["x", 1, 2], ["y", 2, 3]])
    r = mutate(q, 2)
    assert sorted((a.source, a.target) for a in r.arrows) == [(1, 3), (2, 1), (3, 2)]


def test_labardini_mutation_matches_matrix_rule(labardini):
    q = labardini.quiver
    for i in (1, 2, 3):
        assert exchange_matrix(mutate(q, i)) == matrix_mutation_oracle(exchange_matrix(q), i)


def test_exchange_matrix_examples(labardini):
    assert exchange_matrix(Q(2, [["a", 1, 2]])) == [[0, 1], [-1, 0]]
    assert exchange_matrix(labardini.quiver) == [[0, 2, -2], [-2, 0, 2], [2, -2, 0]]
    assert exchange_matrix(Q(3, [])) == [[0] * 3 for _ in range(3)]


def test_matrix_rank_examples():
    assert matrix_rank([[0, 1], [-1, 0]]) == 2
    assert matrix_rank([[0, 2, -2], [-2, 0, 2], [2, -2, 0]]) == 2
    assert matrix_rank([[0] * 3 for _ in range(3)]) == 0


def test_frozen_mutation_rejected():
    q = Q(2, [["a", 1, 2]], m=1)
    with pytest.raises(FrozenVertexError):
        mutate(q, 2)
    with pytest.raises(FrozenVertexError):
        mutate(q, 3)


def test_invalid_quivers_rejected():
    with pytest.raises(QuiverError):
        Q(2, [["a", 1, 1]])
    with pytest.raises(QuiverError):
        Q(2, [["a", 1, 2], ["b", 2, 1]])


def test_json_round_trip(labardini):
    q = labardini.quiver
    assert IceQuiver.from_json(q.to_json()).to_json() == q.to_json()


@given(quivers(), st.data())
def test_mutation_is_involution(q, data):
    i = data.draw(st.integers(1, q.m))
    assert mutate(mutate(q, i), i).multiset() == q.multiset()


@given(quivers(), st.data())
def test_arrow_and_matrix_mutation_commute(q, data):
    i = data.draw(st.integers(1, q.m))
    b = exchange_matrix(q)
    assert exchange_matrix(mutate(q, i)) == matrix_mutation_oracle(b, i)
    assert mutate_matrix(b, i) == matrix_mutation_oracle(b, i)


@given(quivers(max_n=5, max_mult=3))
def test_rank_matches_sympy(q):
    b = exchange_matrix(q)
    assert matrix_rank(b) == sympy.Matrix(b).rank()


def test_random_mutation_walks_keep_invariants():
    rng = random.Random(3)
    for _ in range(30):
        q = from_matrix([[0, 1, -1, 0], [-1, 0, 1, 1], [1, -1, 0, 0], [0, -1, 0, 0]], 3)
        for _ in range(8):
            q = mutate(q, rng.randint(1, q.m))
            q.validate()
            b = exchange_matrix(q)
            assert all(b[r][c] == -b[c][r] for r in range(4) for c in range(4))
