import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betheperm import lifting
from betheperm.lifting import (
    BUDGET_ENV,
    BudgetExceeded,
    LiftingAssignment,
    _lift_chunk,
    _lift_chunk_py,
    degree_M_bethe_perm,
    degree_M_bethe_perm_canonical,
    enumerate_liftings,
    lift,
    lift_sum,
    parse_budget,
    permutation_matrix,
    permutations_of,
    q,
    q2,
    q2_closed,
    resolve_budget,
    root_M,
    t3,
    t3_closed,
    t_block,
    that3,
    that3_closed,
    that_block,
)
from betheperm.permanent import permanent_naive, permanent_ryser
from tests.strategies import int_matrices

J2 = np.ones((2, 2), dtype=int)
J3 = np.ones((3, 3), dtype=int)


def brute_mean(theta, M):
    """Mean over every lifting, by the generic enumerator and the naive
    permanent; independent of the cell-kernel path."""
    theta = np.asarray(theta)
    m, n = theta.shape
    vals = [permanent_naive(lift(theta, P)) for P in enumerate_liftings(m, n, M)]
    return Fraction(sum(vals), len(vals))


@pytest.mark.parametrize("m,n,M,count", [(1, 1, 3, 6), (2, 2, 2, 16), (2, 3, 1, 1)])
def test_enumeration_counts(m, n, M, count):
    assert sum(1 for _ in enumerate_liftings(m, n, M)) == count == lifting.lifting_count(m, n, M)


def test_enumeration_order_is_lexicographic():
    seq = [P.perms for P in enumerate_liftings(1, 2, 2)]
    assert seq == [((1, 2), (1, 2)), ((1, 2), (2, 1)), ((2, 1), (1, 2)), ((2, 1), (2, 1))]
    assert permutations_of(3)[0] == (1, 2, 3) and permutations_of(3)[-1] == (3, 2, 1)


def test_assignment_validation():
    with pytest.raises(ValueError):
        LiftingAssignment(1, 1, 2, ((1, 1),))
    with pytest.raises(ValueError):
        LiftingAssignment(1, 2, 2, ((1, 2),))
    P = LiftingAssignment(1, 2, 2, ((1, 2), (2, 1)))
    assert P.cell(1, 2) == (2, 1)


def test_lift_examples():
    P = LiftingAssignment(1, 1, 3, ((2, 3, 1),))
    np.testing.assert_array_equal(lift([[1]], P), permutation_matrix((2, 3, 1)))
    theta = np.array([[1, 0], [1, 1]])
    np.testing.assert_array_equal(lift(theta, LiftingAssignment(2, 2, 1, ((1,),) * 4)), theta)
    ident = LiftingAssignment(2, 2, 2, ((1, 2),) * 4)
    # two disjoint copies of J2
    assert permanent_ryser(lift(J2, ident)) == permanent_naive(lift(J2, ident)) == 4
    with pytest.raises(ValueError):
        lift(J3, ident)


def test_budget_refusal_reports_count():
    with pytest.raises(BudgetExceeded) as e:
        next(enumerate_liftings(3, 3, 3, budget=1000))
    assert e.value.required == 6**9
    with pytest.raises(BudgetExceeded) as e:
        degree_M_bethe_perm(np.ones((4, 4), int), 4, canonical=False)
    assert e.value.required == 24**16


def test_budget_resolution(monkeypatch):
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    assert resolve_budget() == lifting.DEFAULT_BUDGET
    monkeypatch.setenv(BUDGET_ENV, "small")
    assert resolve_budget() == 10**6
    assert resolve_budget(77) == 77
    monkeypatch.setenv(BUDGET_ENV, "5")
    with pytest.raises(BudgetExceeded):
        q(2, 3)
    assert parse_budget("1e3") == 1000
    with pytest.raises(ValueError):
        parse_budget("0")


@settings(max_examples=60)
@given(int_matrices(max_n=6))
def test_degree_one_is_permanent(theta):
    r = degree_M_bethe_perm(theta, 1)
    assert r.mean == permanent_ryser(theta) and r.count == 1


def test_degree_M_examples():
    r = degree_M_bethe_perm(J2, 2, canonical=False)
    assert (r.mean, r.count) == (3, 16)
    assert r.root_M == math.sqrt(3)
    assert degree_M_bethe_perm([[1, 1], [1, 0]], 2).mean == 1
    assert degree_M_bethe_perm([[1, 1], [0, 0]], 3).mean == 0


def test_canonical_examples():
    assert degree_M_bethe_perm_canonical(J2, 3).mean == 4
    assert degree_M_bethe_perm_canonical(J3, 1).mean == 6
    r = degree_M_bethe_perm_canonical(J2, 2)
    assert (r.sum, r.count, r.mean) == (6, 2, 3)
    with pytest.raises(ValueError):
        degree_M_bethe_perm_canonical([[1, 1], [1, 0]][::-1], 2)


@pytest.mark.parametrize("theta", [J2, [[1, 1], [1, 0]], [[1, 0, 1], [1, 1, 0], [0, 1, 1]], [[1, 1, 0], [1, 0, 1], [1, 1, 1]]])
@pytest.mark.parametrize("M", [1, 2])
def test_cell_kernel_matches_generic_enumeration(theta, M):
    assert degree_M_bethe_perm(theta, M, canonical=False).mean == brute_mean(theta, M)


@pytest.mark.parametrize("m,M", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_canonical_equals_full(m, M):
    J = np.ones((m, m), dtype=int)
    assert degree_M_bethe_perm(J, M, canonical=True).mean == degree_M_bethe_perm(J, M, canonical=False).mean


@pytest.mark.slow
def test_canonical_equals_full_J3_M3():
    full = degree_M_bethe_perm(J3, 3, canonical=False)
    assert full.count == 6**9
    assert full.mean == degree_M_bethe_perm_canonical(J3, 3).mean == Fraction(1684, 27)


def test_auto_canonical_for_partial_ones():
    theta = np.array([[1, 1, 0], [1, 1, 1], [1, 0, 1]])
    assert degree_M_bethe_perm(theta, 2).mean == degree_M_bethe_perm(theta, 2, canonical=False).mean
    with pytest.raises(ValueError):
        degree_M_bethe_perm([[1, 0], [0, 1]], 2, canonical=True)


def test_q_values():
    for M in range(1, 6):
        assert q(2, M) == M + 1 == q2_closed(M) == q2(M)
        assert q(1, M) == 1
    assert q(3, 1) == 6
    assert q(3, 2) == 21 == brute_mean(J3, 2)
    assert q(3, 3) == Fraction(1684, 27)


def test_reduced_sums_match_closed_forms():
    for M in range(1, 4):
        assert t3(M) == t3_closed(M)
        assert that3(M) == that3_closed(M)
    assert [t3(M) for M in (1, 2, 3, 4)] == [4, 10, Fraction(64, 3), Fraction(169, 4)]
    assert [that3_closed(M) for M in range(1, 6)] == [3, 6, Fraction(31, 3), Fraction(33, 2), Fraction(126, 5)]
    assert t3_closed(5) == Fraction(2008, 25)


def test_reduced_sums_match_block_lifts():
    assert t_block(2, 2) == 1
    for M in (1, 2):
        assert t_block(3, M) == t3(M)
        assert that_block(3, M) == that3(M)
    # direct lifting of the protomatrices, generic enumerator
    assert brute_mean([[1, 1, 0], [1, 1, 1], [1, 1, 1]], 1) == t3(1) == 4
    assert brute_mean([[1, 1, 0], [1, 0, 1], [1, 1, 1]], 1) == that3(1) == 3


def test_t3_bound():
    for M in range(1, 5):
        assert t3(M) <= 2**M * (M + 1)


@given(st.fractions(min_value=Fraction(1, 10**6), max_value=10**12), st.integers(1, 7))
def test_root_within_one_ulp(mean, M):
    r = root_M(mean, M)
    lo, hi = np.nextafter(r, 0), np.nextafter(r, np.inf)
    assert Fraction(float(lo)) ** M <= mean <= Fraction(float(hi)) ** M


def test_root_of_zero():
    assert root_M(Fraction(0), 3) == 0.0


def test_chunk_paths_agree():
    perms = permutations_of(3)
    size, fixed, free = 2, [(0, 0), (0, 1), (1, 0)], [(1, 1)]
    assert _lift_chunk(size, 3, fixed, free, 0, 6) == _lift_chunk_py(size, 3, fixed, free, 0, 6)
    assert _lift_chunk(1, 3, [(0, 0)], [(0, 0)] * 3, 0, 216) == _lift_chunk_py(1, 3, [(0, 0)], [(0, 0)] * 3, 0, 216)
    assert len(perms) == 6


def test_lift_sum_worker_independent():
    args = (3, 2, [(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)], [(1, 1), (1, 2), (2, 1), (2, 2)])
    assert lift_sum(*args, workers=1) == lift_sum(*args, workers=2) == (21 * 16, 16)
