import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betheperm.matrix import (
    ExponentMatrix,
    ParseError,
    as_binary,
    expand_exponents,
    gf2_syndrome,
    index_set,
    parse_dense,
    parse_exponents,
    parse_matrix,
    row_support,
    serialize_dense,
    serialize_exponents,
    shift_matrix,
    submatrix,
    without,
)
from tests.strategies import binary_rect

QC = ExponentMatrix(((0, 0, 0, 0), (-1, 0, 1, 2), (-1, 0, 2, 1)), 3)


def test_parse_two_row(two_row):
    np.testing.assert_array_equal(parse_dense("2 4\n1 1 1 0\n0 1 1 1"), two_row)


def test_parse_skips_comments():
    a = parse_dense("# header next\n1 2\n# row\n1 0\n")
    np.testing.assert_array_equal(a, [[1, 0]])


def test_parse_error_location():
    with pytest.raises(ParseError) as e:
        parse_dense("2 2\n1 1\n1 x\n")
    assert (e.value.line, e.value.row, e.value.column) == (3, 2, 2)


@pytest.mark.parametrize("text", ["", "2\n1 1", "2 2\n1 1", "2 2\n1 1\n1 2", "1 2\n1 1 1", "0 2\n"])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_dense(text)


@given(binary_rect())
def test_dense_round_trip(a):
    text = serialize_dense(a)
    np.testing.assert_array_equal(parse_dense(text), a)
    assert serialize_dense(parse_dense(text)) == text


def test_binary_rejects_other_values():
    with pytest.raises(ValueError):
        as_binary([[0, 2]])
    with pytest.raises(ValueError):
        as_binary(np.zeros((0, 3)))


def test_shift_convention():
    # column j of I moves to column j + s (cyclically)
    P = shift_matrix(1, 3)
    np.testing.assert_array_equal(P, [[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    np.testing.assert_array_equal(shift_matrix(-1, 3), np.zeros((3, 3)))
    np.testing.assert_array_equal(shift_matrix(2, 3), P @ P)


def test_expand_qc_shape_and_weights():
    H = expand_exponents(QC)
    assert H.shape == (9, 12)
    np.testing.assert_array_equal(H.sum(axis=1), [4] * 3 + [3] * 6)
    np.testing.assert_array_equal(submatrix(H, [4, 5, 6], [4, 5, 6]), np.eye(3))


@given(st.integers(1, 4), st.data())
def test_expand_row_weight(M, data):
    m = data.draw(st.integers(1, 3))
    n = data.draw(st.integers(1, 4))
    exps = [[data.draw(st.integers(-1, M - 1)) for _ in range(n)] for _ in range(m)]
    H = expand_exponents(ExponentMatrix(exps, M))
    for i, row in enumerate(exps):
        expected = sum(s >= 0 for s in row)
        assert (H[i * M:(i + 1) * M].sum(axis=1) == expected).all()


def test_exponent_validation():
    with pytest.raises(ValueError):
        ExponentMatrix(((0, 3),), 3)
    with pytest.raises(ValueError):
        ExponentMatrix(((0,), (0, 1)), 3)
    with pytest.raises(ParseError):
        parse_exponents("1 2 3\n0 5\n")


def test_exponent_round_trip():
    assert parse_exponents(serialize_exponents(QC)) == QC


def test_parse_matrix_detects_format(two_row):
    np.testing.assert_array_equal(parse_matrix(serialize_dense(two_row)), two_row)
    np.testing.assert_array_equal(parse_matrix(serialize_exponents(QC)), expand_exponents(QC))


def test_submatrix_example(two_row):
    np.testing.assert_array_equal(submatrix(two_row, [1, 2], [2, 3]), [[1, 1], [1, 1]])


def test_submatrix_rejects_zero_index(two_row):
    with pytest.raises(IndexError):
        submatrix(two_row, [0], None)
    with pytest.raises(IndexError):
        submatrix(two_row, None, [5])


@given(binary_rect(max_m=5, max_n=6), st.data())
def test_submatrix_composes(a, data):
    m, n = a.shape
    r1 = data.draw(st.lists(st.integers(1, m), min_size=1, max_size=m, unique=True))
    c1 = data.draw(st.lists(st.integers(1, n), min_size=1, max_size=n, unique=True))
    r2 = data.draw(st.lists(st.integers(1, len(r1)), min_size=1, max_size=len(r1), unique=True))
    c2 = data.draw(st.lists(st.integers(1, len(c1)), min_size=1, max_size=len(c1), unique=True))
    twice = submatrix(submatrix(a, r1, c1), r2, c2)
    once = submatrix(a, [r1[i - 1] for i in r2], [c1[j - 1] for j in c2])
    np.testing.assert_array_equal(twice, once)


def test_row_support(two_row):
    assert row_support(two_row, 1) == (1, 2, 3)
    assert row_support(two_row, 2) == (2, 3, 4)
    assert row_support([[0, 0]], 1) == ()


def test_index_helpers():
    assert index_set([3, 1, 3], 4) == (1, 3)
    with pytest.raises(IndexError):
        index_set([5], 4)
    assert without((1, 2, 3, 4), 2) == (1, 3, 4)


def test_syndrome():
    H = expand_exponents(QC)
    assert not gf2_syndrome(H, (0, 1, 1) * 4).any()
    assert gf2_syndrome(H, (1,) + (0,) * 11).any()
