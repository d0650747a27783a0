"""Tests for exact matrix helpers: determinants, inverses and characteristic polynomials."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from src.coxeter import build_group, catalog
from src.errors import DimensionMismatch, SingularCartan
from src.linalg import (
    char_poly_monic,
    char_poly_reversed,
    determinant,
    identity,
    inverse,
    is_identity,
    mat_mul,
    mat_pow,
    to_matrix,
    transpose,
)
from src.scalars import Field, Scalar, UniPoly, promote

small_ints = st.integers(min_value=-6, max_value=6)


def int_matrices(n):
    return st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)


class TestDeterminant:
    """Bareiss determinants over Q and Q(sqrt5)."""

    @pytest.mark.parametrize("label,expected", [
        ("A1", 2), ("A2", 3), ("A5", 6), ("B3", 2), ("D4", 4),
        ("E6", 3), ("E7", 2), ("E8", 1), ("F4", 1), ("G2", 1),
    ])
    def test_cartan_determinants(self, label, expected):
        assert determinant(catalog(label).matrix) == expected

    def test_h3_cartan_determinant(self):
        # 6 - 2 phi^2 = 3 - sqrt5
        assert determinant(catalog("H3").matrix) == Scalar(3, -1)

    def test_rational_entries(self):
        m = to_matrix([[Fraction(1, 2), 1], [1, Fraction(1, 3)]])
        assert determinant(m) == Fraction(1, 6) - 1

    def test_singular(self):
        assert determinant(to_matrix([[1, 2], [2, 4]])).is_zero()

    def test_non_square(self):
        with pytest.raises(DimensionMismatch):
            determinant(to_matrix([[1, 2, 3], [4, 5, 6]]))

    @given(int_matrices(4))
    @settings(max_examples=40, deadline=None)
    def test_integer_and_golden_paths_agree(self, rows):
        m = to_matrix(rows)
        golden = tuple(tuple(promote(x, Field.GOLDEN) for x in row) for row in m)
        assert determinant(m) == determinant(golden)

    @given(int_matrices(3), int_matrices(3))
    @settings(max_examples=40, deadline=None)
    def test_multiplicative(self, a, b):
        x, y = to_matrix(a), to_matrix(b)
        assert determinant(mat_mul(x, y)) == determinant(x) * determinant(y)


class TestInverse:
    """Gauss-Jordan inverses."""

    @pytest.mark.parametrize("label", ["A3", "F4", "H3", "H4", "E6"])
    def test_inverse_of_cartan(self, label):
        c = catalog(label).matrix
        assert is_identity(mat_mul(c, inverse(c)))

    def test_singular_raises(self):
        with pytest.raises(SingularCartan):
            inverse(to_matrix([[2, -2], [-2, 2]]))


class TestCharacteristicPolynomial:
    """Hessenberg characteristic polynomials."""

    def test_reflection_has_one_minus_eigenvalue(self):
        group = build_group(catalog("H3"))
        for g in group.generators:
            expected = UniPoly([1, -1]) ** 2 * UniPoly([1, 1])
            assert char_poly_reversed(g.matrix) == expected

    def test_monic_and_reversed_agree(self):
        m = to_matrix([[1, 2, 0], [0, 3, 1], [4, 0, 1]])
        monic = char_poly_monic(m)
        reversed_poly = char_poly_reversed(m)
        assert monic[3] == 1
        assert reversed_poly[0] == 1
        assert [reversed_poly[k] for k in range(4)] == [monic[3 - k] for k in range(4)]
        assert -monic[0] == determinant(m)

    def test_coxeter_element_order(self):
        # E8 Coxeter number is 30
        group = build_group(catalog("E8"))
        c = group.generators[0].matrix
        for g in group.generators[1:]:
            c = mat_mul(c, g.matrix)
        assert is_identity(mat_pow(c, 30))
        assert not is_identity(mat_pow(c, 15))
        assert not is_identity(mat_pow(c, 10))
        assert not is_identity(mat_pow(c, 6))

    def test_transpose_identity(self):
        assert transpose(identity(3)) == identity(3)
