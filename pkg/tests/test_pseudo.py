import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betheperm.matrix import ExponentMatrix, expand_exponents
from betheperm.pseudo import (
    PseudoVector,
    awgnc_pseudo_weight,
    bethe_perm_vector,
    bethe_perm_vector_M,
    in_fundamental_cone,
    min_pseudo_weight_bound,
    perm_vector,
    proportional,
    root_M_scale,
)
from tests.conftest import TWO_ROW
from tests.strategies import parity_checks

QC = expand_exponents(ExponentMatrix(((0, 0, 0, 0), (-1, 0, 1, 2), (-1, 0, 2, 1)), 3))
PROTO = np.array([[1, 1, 1, 1], [0, 1, 1, 1], [0, 1, 1, 1]])


def test_cone_examples():
    assert in_fundamental_cone(TWO_ROW, (2, 1, 1, 0)).member
    rep = in_fundamental_cone(PROTO, (54, 2, 2, 2))
    assert not rep.member
    assert {v.row for v in rep.violations} == {1} and rep.violations[0].position == 1
    assert in_fundamental_cone(PROTO, (0, 0, 0, 0)).member
    with pytest.raises(ValueError):
        in_fundamental_cone(PROTO, (1, 1, 1))
    with pytest.raises(ValueError):
        PseudoVector((1, -1), True)


def test_cone_float_tolerance():
    H = [[1, 1]]
    assert in_fundamental_cone(H, (1.0 + 1e-12, 1.0)).member
    assert not in_fundamental_cone(H, (1.0 + 1e-6, 1.0)).member
    assert not in_fundamental_cone(H, (Fraction(10**12 + 1, 10**12), 1)).member


def test_weight_examples():
    assert awgnc_pseudo_weight((1, 1, 2)) == Fraction(8, 3)
    assert awgnc_pseudo_weight((3, 1, 1, 1)) == 3
    assert awgnc_pseudo_weight((1, 1, 1, 1)) == 4
    assert awgnc_pseudo_weight((2 * 3 ** (1 / 3), 1.0, 1.0, 1.0)) == pytest.approx(3.0589, abs=1e-4)
    with pytest.raises(ValueError):
        awgnc_pseudo_weight((0, 0))


@given(st.lists(st.integers(0, 20), min_size=1, max_size=8).filter(any),
       st.fractions(min_value=Fraction(1, 1000), max_value=1000).filter(lambda a: a > 0))
def test_weight_scale_invariant(w, alpha):
    assert awgnc_pseudo_weight([alpha * x for x in w]) == awgnc_pseudo_weight(w)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=12).filter(any))
def test_weight_of_binary_is_hamming(w):
    assert awgnc_pseudo_weight(w) == sum(w)


def test_perm_vector_examples():
    assert perm_vector(TWO_ROW, (1, 2, 3)).values == (2, 1, 1, 0)
    assert perm_vector(TWO_ROW, (2, 3, 4)).values == (0, 1, 1, 2)
    assert perm_vector(QC, range(1, 11)).values == (6, 4, 4, 2, 2, 2, 2, 2, 2, 2, 0, 0)
    with pytest.raises(ValueError):
        perm_vector(TWO_ROW, (1, 2))
    with pytest.raises(ValueError):
        perm_vector(TWO_ROW, (1, 1, 2))


@settings(max_examples=60)
@given(parity_checks(max_m=4, extra=3))
def test_perm_vectors_are_pseudocodewords(H):
    m, n = H.shape
    for beta in itertools.combinations(range(1, n + 1), m + 1):
        rep = in_fundamental_cone(H, perm_vector(H, beta), tol=0)
        assert rep.member, rep.violations


@settings(max_examples=40)
@given(parity_checks(max_m=3))
def test_degree_one_vector_is_perm_vector(H):
    m, n = H.shape
    for beta in itertools.combinations(range(1, n + 1), m + 1):
        assert bethe_perm_vector_M(H, beta, 1).values == perm_vector(H, beta).values


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_degree_M_two_row(M):
    w = bethe_perm_vector_M(TWO_ROW, (1, 2, 3), M)
    expected = ((M + 1) ** (1 / M), 1, 1, 0)
    assert all(abs(float(x) - y) <= 1e-12 for x, y in zip(w.values, expected))
    assert w.powers == (M + 1, 1, 1, 0)


def test_limit_vectors():
    w = bethe_perm_vector(TWO_ROW, (1, 2, 3))
    np.testing.assert_allclose(w.values, (1, 1, 1, 0), atol=1e-8)
    w = bethe_perm_vector([[1, 1, 1], [1, 0, 0]], (1, 2, 3))
    np.testing.assert_allclose(w.values, (0, 1, 1), atol=1e-8)


def degree_two_first_row(m):
    """Every m x (m+1) matrix whose first row is 1 1 0 ... 0."""
    first = [1, 1] + [0] * (m - 1)
    for bits in itertools.product((0, 1), repeat=(m - 1) * (m + 1)):
        yield np.array([first] + [list(bits[i * (m + 1):(i + 1) * (m + 1)]) for i in range(m - 1)])


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("M", [1, 2])
def test_degree_two_row_inequalities(m, M):
    for H in degree_two_first_row(m):
        w = bethe_perm_vector_M(H, range(1, m + 2), M)
        assert w.powers[0] == w.powers[1]
        row1 = np.zeros_like(H)
        row1[0] = H[0]
        assert in_fundamental_cone(row1, w).member


def star_family(m):
    for star in itertools.product((0, 1), repeat=m - 1):
        H = np.ones((m, m + 1), dtype=int)
        H[1:, 0] = star
        yield H


def zero_tail_family(m):
    for k in range(1, m):
        H = np.ones((m, m + 1), dtype=int)
        H[1:, 0] = 0
        H[0, m + 1 - k:] = 0
        yield H


@pytest.mark.parametrize("family", [star_family, zero_tail_family])
@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("M", [1, 2, 3])
def test_structured_families_in_cone(family, m, M):
    for H in family(m):
        w = bethe_perm_vector_M(H, range(1, m + 2), M)
        assert in_fundamental_cone(H, w).member, (H, w.values)


def test_proportional():
    root = root_M_scale((54, 2, 2, 2), 3)
    assert proportional(root, (3, 1, 1, 1))
    assert proportional((2, 4), (1, 2)) and not proportional((2, 4), (1, 3))
    assert proportional((0, 0), (0, 0)) and not proportional((0, 1), (0, 0))


def test_root_scale_examples():
    c = 2 ** (1 / 3)
    np.testing.assert_allclose(root_M_scale((54, 2, 2, 2), 3).values, [c * 3, c, c, c], rtol=1e-14)
    np.testing.assert_allclose(root_M_scale((48, 2, 2, 2), 3).values, [c * 2 * 3 ** (1 / 3), c, c, c], rtol=1e-14)
    assert root_M_scale((5, 1), 1).values == (5, 1)
    assert in_fundamental_cone(PROTO, root_M_scale((54, 2, 2, 2), 3)).member


def test_min_weight():
    assert min_pseudo_weight_bound(TWO_ROW) == (Fraction(8, 3), (1, 2, 3))
    best, beta = min_pseudo_weight_bound(TWO_ROW, "bethe_limit")
    assert best == pytest.approx(3, abs=1e-6)
    assert min_pseudo_weight_bound([[1, 1]]) == (2, (1, 2))
    assert min_pseudo_weight_bound([[1, 0, 0]]) == (1, (1, 2))
    assert min_pseudo_weight_bound([[0, 0]]) == (float("inf"), None)
    with pytest.raises(ValueError):
        min_pseudo_weight_bound(TWO_ROW, "other")
