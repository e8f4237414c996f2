from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import CONIC, CONIC_COUNTS, PATH3, PATH3_ONES
from toricmle import (
    CountVector,
    DesignMatrix,
    Linearization,
    independence_matrix,
    path_graph_3chain_matrix,
    sufficient_statistics,
    validate_rowspan_ones,
)
from toricmle.errors import DimensionError
from toricmle.model import data_linearization

# The 6 x 9 matrix as typeset in the literature: column-marginal rows first.
PRINTED_INDEPENDENCE_3 = [
    [1, 0, 0, 1, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 1, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 0, 1],
    [1, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 1, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 1, 1],
]


def test_design_matrix_validation():
    with pytest.raises(TypeError):
        DesignMatrix([[1.5, 2]])
    with pytest.raises(DimensionError):
        DesignMatrix([[1, 2], [3]])
    with pytest.raises(DimensionError):
        DesignMatrix([])
    A = DesignMatrix([[0, 1], [0, 2]])  # a zero column is allowed
    assert A.shape == (2, 2) and A.column(0) == (0, 0)


def test_count_vector_validation():
    with pytest.raises(ValueError):
        CountVector([1, -1])
    with pytest.raises(ValueError):
        CountVector([0, 0])
    u = CountVector([2, 0, 1])
    assert u.n == 3 and u.support == (0, 2)
    assert u.empirical() == (Fraction(2, 3), Fraction(0), Fraction(1, 3))


@pytest.mark.parametrize(
    "entries, witness",
    [
        ([[2, 1, 0], [0, 1, 2]], (Fraction(1, 2), Fraction(1, 2))),
        ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], (1, 1, 1)),
        ([[1, 0], [0, 2]], (1, Fraction(1, 2))),
    ],
)
def test_rowspan_witness(entries, witness):
    ok, r = validate_rowspan_ones(DesignMatrix(entries))
    assert ok and r == tuple(Fraction(x) for x in witness)


def test_rowspan_negative():
    assert validate_rowspan_ones(DesignMatrix([[1, 2]])) == (False, None)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=3),
    st.integers(-2, 2),
    st.integers(0, 2),
    st.integers(0, 2),
)
def test_rowspan_invariant_under_row_operations(rows, factor, i, j):
    A = DesignMatrix(rows)
    d = len(rows)
    i, j = i % d, j % d
    mixed = [list(r) for r in rows]
    if i != j:
        mixed[i] = [a + factor * b for a, b in zip(rows[i], rows[j])]
    mixed = mixed[::-1]
    assert validate_rowspan_ones(DesignMatrix(mixed))[0] == A.ones_in_rowspan


def test_sufficient_statistics_examples():
    assert sufficient_statistics(CONIC, CONIC_COUNTS) == (5, 3)
    assert sufficient_statistics(PATH3, PATH3_ONES) == (1,) * 8
    for j in range(3):
        e = [0, 0, 0]
        e[j] = 1
        assert sufficient_statistics(CONIC, e) == CONIC.column(j)
    with pytest.raises(DimensionError):
        sufficient_statistics(CONIC, [1, 2])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=3, max_size=3), st.lists(st.integers(0, 9), min_size=3, max_size=3))
def test_sufficient_statistics_linear(u, v):
    total = [a + b for a, b in zip(u, v)]
    lhs = sufficient_statistics(CONIC, total)
    rhs = [a + b for a, b in zip(sufficient_statistics(CONIC, u), sufficient_statistics(CONIC, v))]
    assert list(lhs) == rhs


def test_independence_small():
    A = independence_matrix(2)
    assert A.columns == ((1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1))
    with pytest.raises(ValueError):
        independence_matrix(1)


def test_independence_three_matches_printed_matrix_up_to_block_order():
    A = independence_matrix(3)
    swapped = [list(r) for r in A.entries[3:] + A.entries[:3]]
    assert swapped == PRINTED_INDEPENDENCE_3


@pytest.mark.parametrize("m", range(2, 7))
def test_independence_margins(m):
    A = independence_matrix(m)
    assert all(sum(c) == 2 for c in A.columns)
    rng = np.random.default_rng(m)
    table = rng.integers(0, 5, size=(m, m))
    b = sufficient_statistics(A, table.ravel().tolist())
    assert list(b) == table.sum(1).tolist() + table.sum(0).tolist()


def test_path_graph_matrix():
    A = path_graph_3chain_matrix()
    assert all(sum(c) == 2 for c in A.columns)
    assert A.column(0) == (1, 0, 0, 0, 1, 0, 0, 0)
    ok, r = validate_rowspan_ones(A)
    assert ok
    assert all(sum(ri * A.entries[i][j] for i, ri in enumerate(r)) == 1 for j in range(8))


def test_linearization():
    lin = data_linearization(CONIC, CONIC_COUNTS)
    assert lin.b == (5, 3) and lin.scale == 4
    assert lin.target == (Fraction(5, 4), Fraction(3, 4))
    with pytest.raises(ValueError):
        Linearization([1], scale=0)
    with pytest.raises(DimensionError):
        Linearization([1]).check(CONIC)
