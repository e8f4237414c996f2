from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import CONIC, PATH3, PATH3_NO_MLE, PATH3_ONES, SQUARE, random_design
from oracles import face_by_lp, in_triangle_hull_2d, lp_contains, subset_scan
from toricmle import DesignMatrix, SubPolytope, sufficient_statistics
from toricmle.errors import EnumerationLimitError, PreconditionError
from toricmle.polytope import (
    CONVEX_COMBINATION,
    SEPARATING_FUNCTIONAL,
    contains,
    in_relative_interior,
    maximal_excluding_subsets,
    minimal_containing_subsets,
    minimal_face,
    relative_interior_witness,
)


def data_target(A, u):
    return [Fraction(x, u.n) for x in sufficient_statistics(A, u)]


def one_based(sets):
    return [tuple(j + 1 for j in s) for s in sets]


def test_contains_conic_data():
    ok, cert = contains(SubPolytope(CONIC), [Fraction(5, 4), Fraction(3, 4)])
    assert ok and cert.kind == CONVEX_COMBINATION and cert.verify(CONIC, [Fraction(5, 4), Fraction(3, 4)])


def test_contains_single_point():
    for j in range(3):
        ok, cert = contains(SubPolytope(CONIC, [j]), CONIC.column(j))
        assert ok and cert.coefficients == (1,)


def test_separation_against_triangle_oracle():
    rng = np.random.default_rng(2)
    outside = 0
    for _ in range(80):
        A = DesignMatrix(rng.integers(0, 5, size=(2, 6)).tolist())
        t = [Fraction(int(x), 2) for x in rng.integers(-1, 10, size=2)]
        ok, cert = contains(SubPolytope(A), t)
        assert ok == in_triangle_hull_2d(A.columns, t)
        assert cert.verify(A, t)
        if not ok:
            outside += 1
            assert cert.kind == SEPARATING_FUNCTIONAL
    assert outside > 10


def test_contains_against_lp_oracle():
    rng = np.random.default_rng(3)
    for _ in range(150):
        A = random_design(rng, m_max=8)
        J = sorted(set(rng.integers(0, A.m, size=int(rng.integers(1, A.m + 1))).tolist()))
        t = [Fraction(int(x), 3) for x in rng.integers(0, 13, size=A.d)]
        ok, cert = contains(SubPolytope(A, J), t)
        assert ok == lp_contains([A.column(j) for j in J], t)
        assert cert.verify(A, t)


def test_relative_interior_examples():
    assert in_relative_interior(SubPolytope(CONIC), [Fraction(5, 4), Fraction(3, 4)])
    assert not in_relative_interior(SubPolytope(CONIC), CONIC.column(0))
    assert not in_relative_interior(SubPolytope(PATH3), data_target(PATH3, PATH3_NO_MLE))
    w = relative_interior_witness(SubPolytope(CONIC), [Fraction(5, 4), Fraction(3, 4)])
    assert w is not None and all(x > 0 for x in w.coefficients)
    assert w.verify(CONIC, [Fraction(5, 4), Fraction(3, 4)])


def test_minimal_face_examples():
    face = minimal_face(SubPolytope(PATH3), data_target(PATH3, PATH3_NO_MLE))
    assert [j + 1 for j in range(8) if j not in face] == [4, 7, 8]
    assert minimal_face(SubPolytope(CONIC), [2, 0]) == (0,)
    assert minimal_face(SubPolytope(CONIC), [Fraction(5, 4), Fraction(3, 4)]) == (0, 1, 2)
    with pytest.raises(PreconditionError):
        minimal_face(SubPolytope(CONIC), [3, 0])


def test_minimal_face_against_lp_oracle():
    rng = np.random.default_rng(4)
    for _ in range(40):
        A = random_design(rng, m_max=8)
        u = rng.integers(0, 3, size=A.m)
        u[0] += 1
        t = [Fraction(int(x), int(u.sum())) for x in np.array(A.entries) @ u]
        face = minimal_face(SubPolytope(A), t)
        assert face == face_by_lp(A.columns, t)
        assert (face == tuple(range(A.m))) == in_relative_interior(SubPolytope(A), t)


def test_three_chain_minimal_sets():
    t = data_target(PATH3, PATH3_ONES)
    sets = minimal_containing_subsets(PATH3, t)
    assert one_based(s.indices for s in sets) == [(1, 3, 6, 8), (1, 4, 6, 7), (2, 3, 5, 8), (2, 4, 5, 7)]
    for s in sets:
        assert all(w == Fraction(1, 4) for w in s.weights)


def test_unit_square_components():
    t = [Fraction(1, 2), Fraction(3, 4)]
    assert one_based(maximal_excluding_subsets(SQUARE, t)) == [(1, 2, 3), (1, 2, 4), (3, 4)]
    assert one_based(s.indices for s in minimal_containing_subsets(SQUARE, t)) == [(1, 3, 4), (2, 3, 4)]


def test_vertex_and_outside_cases():
    assert [s.indices for s in minimal_containing_subsets(CONIC, [2, 0])] == [(0,)]
    assert minimal_containing_subsets(CONIC, [3, 0]) == []
    assert maximal_excluding_subsets(CONIC, [3, 0]) == [(0, 1, 2)]


def test_enumeration_guard():
    A = DesignMatrix([[1] * 25])
    with pytest.raises(EnumerationLimitError):
        minimal_containing_subsets(A, [1])
    with pytest.raises(EnumerationLimitError):
        maximal_excluding_subsets(A, [1], limit=10)


def test_duplicate_columns_are_distinct_indices():
    A = DesignMatrix([[0, 0, 2], [1, 1, 1]])
    sets = minimal_containing_subsets(A, [1, 1])
    assert [s.indices for s in sets] == [(0, 2), (1, 2)]


def test_enumeration_against_subset_scan():
    rng = np.random.default_rng(5)
    for _ in range(25):
        A = DesignMatrix(rng.integers(0, 5, size=(2, 7)).tolist())
        t = [Fraction(int(x), 4) for x in rng.integers(0, 17, size=2)]
        mins, maxs = subset_scan(A.columns, t)
        assert [s.indices for s in minimal_containing_subsets(A, t)] == mins
        assert maximal_excluding_subsets(A, t) == maxs


def test_duality_exhaustive():
    """t in P_S  <=>  S inside no maximal excluding set  <=>  S contains a minimal set."""
    rng = np.random.default_rng(6)
    for _ in range(6):
        A = random_design(rng, d_max=4, m_max=10, m_min=10)
        u = rng.integers(0, 3, size=A.m)
        u[int(rng.integers(A.m))] += 1
        t = [Fraction(int(x), int(u.sum())) for x in np.array(A.entries) @ u]
        mins = [sum(1 << j for j in s.indices) for s in minimal_containing_subsets(A, t)]
        maxs = [sum(1 << j for j in s) for s in maximal_excluding_subsets(A, t)]
        for S in range(1, 1 << A.m):
            has_min = any(mk & S == mk for mk in mins)
            under_max = any(S & mx == S for mx in maxs)
            assert has_min == (not under_max)
        # spot-check membership itself with the exact LP
        for S in rng.integers(1, 1 << A.m, size=30):
            J = [j for j in range(A.m) if int(S) >> j & 1]
            assert contains(SubPolytope(A, J), t)[0] == any(mk & int(S) == mk for mk in mins)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_monotone_and_scale_invariant(seed, c):
    rng = np.random.default_rng(seed)
    A = random_design(rng, d_max=3, m_max=7)
    t = [Fraction(int(x), 3) for x in rng.integers(0, 13, size=A.d)]
    order = rng.permutation(A.m).tolist()
    previous = False
    for k in range(1, A.m + 1):
        now = contains(SubPolytope(A, order[:k]), t)[0]
        assert now or not previous
        previous = now
    cA, ct = A.scaled(c), [c * x for x in t]
    assert contains(SubPolytope(A), t)[0] == contains(SubPolytope(cA), ct)[0]
    assert in_relative_interior(SubPolytope(A), t) == in_relative_interior(SubPolytope(cA), ct)
    assert [s.indices for s in minimal_containing_subsets(A, t)] == \
        [s.indices for s in minimal_containing_subsets(cA, ct)]
    assert maximal_excluding_subsets(A, t) == maximal_excluding_subsets(cA, ct)
    if contains(SubPolytope(A), t)[0]:
        assert minimal_face(SubPolytope(A), t) == minimal_face(SubPolytope(cA), ct)


def test_certificate_json_is_exact():
    ok, cert = contains(SubPolytope(CONIC, [1, 2]), [2, 0])
    assert not ok
    js = cert.to_json()
    assert js["kind"] == "separating_functional" and js["indices"] == [2, 3]
    assert all(isinstance(x, str) for x in js["sigma"])
