"""Tests for the Cartan catalog, simple reflections, orbits and root systems."""

import pytest
from hypothesis import given, settings, strategies as st

from src.coxeter import (
    CartanDatum,
    GroupElement,
    ReflectionGroup,
    align_last_node,
    build_group,
    catalog,
    char_poly,
    coroot_forms,
    coxeter_relation_check,
    fundamental_covector,
    is_regular,
    orbit,
    product_group,
    root_system,
)
from src.errors import InvalidCartan, RelationViolation, UnknownLabel, UnsupportedRank
from src.linalg import is_identity, mat_mul, to_matrix, vec_mat
from src.scalars import Field, Scalar, UniPoly


class TestCatalog:
    """Label parsing and Cartan validation."""

    def test_fields(self):
        assert catalog("E8").field is Field.RATIONAL
        assert catalog("H4").field is Field.GOLDEN
        assert catalog("A1xH3").field is Field.GOLDEN

    def test_labels_are_normalised(self):
        assert catalog(" e6 ").label == "E6"
        assert catalog("A1×A2").label == "A1xA2"
        assert catalog("A1*A1").rank == 2

    def test_product_is_block_diagonal(self):
        c = catalog("A1xA2").matrix
        assert c[0][1] == 0 and c[1][0] == 0
        assert c[1][2] == -1

    @pytest.mark.parametrize("label", ["", "Z3", "E", "A1x", "hello"])
    def test_unknown_labels(self, label):
        with pytest.raises((UnknownLabel, UnsupportedRank)):
            catalog(label)

    @pytest.mark.parametrize("label", ["E5", "E9", "F3", "G3", "H5", "A9", "D3", "B1", "I2(7)"])
    def test_unsupported_rank(self, label):
        with pytest.raises(UnsupportedRank):
            catalog(label)

    def test_invalid_cartan(self):
        bad = CartanDatum("bad", to_matrix([[2, -1], [0, 2]]), Field.RATIONAL)
        with pytest.raises(InvalidCartan):
            bad.validate()
        bad_bond = CartanDatum("bad", to_matrix([[2, -5], [-1, 2]]), Field.RATIONAL)
        with pytest.raises(InvalidCartan):
            build_group(bad_bond)

    @pytest.mark.parametrize("label,bonds", [
        ("B2", {(0, 1): 4}), ("G2", {(0, 1): 6}), ("H3", {(0, 1): 5, (1, 2): 3}),
        ("I2(5)", {(0, 1): 5}), ("I2(2)", {(0, 1): 2}),
    ])
    def test_bond_orders(self, label, bonds):
        datum = catalog(label)
        for (i, j), m in bonds.items():
            assert datum.bond_order(i, j) == m

    def test_canonical_text_is_stable(self):
        assert catalog("A2").canonical_text() == "2,-1;-1,2"
        assert catalog("H3").canonical_text() == catalog("H3").canonical_text()


class TestReflections:
    """Simple reflections and Coxeter relations."""

    def test_a2_first_reflection(self):
        group = build_group(catalog("A2"))
        assert group.generators[0].matrix == to_matrix([[-1, 1], [0, 1]])

    @pytest.mark.parametrize("label", ["A3", "B3", "G2", "F4", "H3", "H4", "E6", "A1xA2"])
    def test_relations_hold(self, label):
        verdicts = coxeter_relation_check(build_group(catalog(label)))
        assert all(v.holds for v in verdicts)

    def test_relation_violation(self):
        group = build_group(catalog("A2"))
        # Swap in a generator that is not an involution.
        broken = ReflectionGroup(group.datum, (GroupElement(to_matrix([[0, 1], [-1, 0]])),
                                               group.generators[1]))
        with pytest.raises(RelationViolation):
            coxeter_relation_check(broken)
        assert not all(v.holds for v in coxeter_relation_check(broken, strict=False))

    def test_reflections_are_involutions_with_determinant_minus_one(self):
        group = build_group(catalog("H4"))
        for g in group.generators:
            assert (g * g).is_identity()
            assert g.determinant() == -1
            assert g.inverse().matrix == g.matrix

    def test_char_poly_of_identity(self):
        group = build_group(catalog("A3"))
        assert char_poly(group.identity()) == UniPoly([1, -1]) ** 3

    @pytest.mark.parametrize("label", ["A3", "B3", "H3"])
    @given(word=st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=12))
    @settings(max_examples=25, deadline=None)
    def test_char_poly_of_inverse_is_reversed(self, label, word):
        group = build_group(catalog(label))
        w = group.identity()
        for i in word:
            w = w * group.generators[i]
        n = group.rank
        forward = char_poly(w).coeffs
        backward = char_poly(w.inverse()).coeffs
        sign = w.determinant() * (-1) ** n
        assert len(forward) == n + 1
        assert list(backward) == [c * sign for c in reversed(forward)]
        assert char_poly(w.inverse()) == char_poly(w)


class TestOrbits:
    """Fundamental covectors and their orbits."""

    @pytest.mark.parametrize("label,size", [
        ("A1", 2), ("A2", 3), ("A3", 4), ("B3", 8),
        ("H3", 12), ("H4", 120), ("F4", 24), ("E6", 27), ("E7", 56), ("E8", 240),
    ])
    def test_orbit_sizes(self, label, size):
        group = build_group(catalog(label))
        assert len(orbit(group, fundamental_covector(group))) == size

    def test_a2_orbit_forms(self):
        group = build_group(catalog("A2"))
        forms = orbit(group, fundamental_covector(group)).linear_forms(group.cartan)
        assert sorted(tuple(x.to_int() for x in f) for f in forms) == [(-1, 0), (0, 1), (1, -1)]

    def test_fundamental_covector_pairs_to_last_coordinate(self):
        group = build_group(catalog("E6"))
        mu = fundamental_covector(group)
        assert [x.to_int() for x in mu.linear_form(group.cartan)] == [0, 0, 0, 0, 0, 1]

    def test_orbit_is_deterministic_and_closed(self):
        group = build_group(catalog("F4"))
        first = orbit(group, fundamental_covector(group))
        second = orbit(group, fundamental_covector(group))
        assert first.to_json() == second.to_json()
        for covector in first:
            for i in range(group.rank):
                assert covector.reflect(group.cartan, i) in first

    def test_orbit_json_uses_field_tag(self):
        group = build_group(catalog("H3"))
        payload = orbit(group, fundamental_covector(group)).to_json()
        assert all("|" in entry for row in payload for entry in row)

    def test_dual_action(self):
        """Pulling a covector back along R_i multiplies its linear form by R_i."""
        group = build_group(catalog("H3"))
        for covector in orbit(group, fundamental_covector(group)):
            form = covector.linear_form(group.cartan)
            for i, g in enumerate(group.generators):
                assert covector.reflect(group.cartan, i).linear_form(group.cartan) == vec_mat(form, g.matrix)

    def test_align_last_node(self):
        datum = catalog("E7")
        moved = datum.relabel_last(0)
        group = build_group(moved)
        assert len(orbit(group, fundamental_covector(group))) == 126
        aligned = align_last_node(moved, 56)
        group = build_group(aligned)
        assert len(orbit(group, fundamental_covector(group))) == 56

    def test_align_last_node_without_match(self):
        with pytest.raises(InvalidCartan):
            align_last_node(catalog("A2"), 5)


class TestRootSystem:
    """Roots, co-roots and regularity."""

    @pytest.mark.parametrize("label,count", [("A2", 6), ("G2", 12), ("H3", 30), ("F4", 48), ("E6", 72)])
    def test_root_counts(self, label, count):
        group = build_group(catalog(label))
        assert len(root_system(group)) == count
        assert len(coroot_forms(group)) == count

    def test_a2_regularity(self):
        group = build_group(catalog("A2"))
        assert is_regular(group, [1, 3])
        assert not is_regular(group, [1, 2])
        assert not is_regular(group, [0, 0])

    @given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=3, max_size=3))
    @settings(max_examples=30, deadline=None)
    def test_regularity_is_invariant(self, coords):
        group = build_group(catalog("A3"))
        point = [Scalar(x) for x in coords]
        for g in group.generators:
            assert is_regular(group, point) == is_regular(group, g.apply(point))

    def test_product_group(self):
        left, right = build_group(catalog("A1")), build_group(catalog("A2"))
        group = product_group(left, right)
        assert group.label == "A1xA2"
        assert group.rank == 3
        assert len(root_system(group)) == 2 + 6
        assert is_identity(mat_mul(group.generators[0].matrix, group.generators[0].matrix))
