"""Tests for membership classification and cone enumeration."""

import random
from collections import Counter
from fractions import Fraction

import pytest
from tropsev.core.classifier import (
    REASON_EXCEPTIONAL,
    REASON_LENGTH_THREE,
    REASON_NO_MARKED_CELL,
    REASON_TIE_ONCE,
    TypeI,
    TypeII,
    TypeIII,
    classify,
    cone_h_description,
    cones_table,
    describe_certificate,
    dimension_check,
    enumerate_cones,
    sample_interior_point,
)
from tropsev.core.newton import WeightVector, reflect
from tropsev.errors import BudgetExceeded


def _keys(result):
    return {c.key() for c in result.certificates}


class TestClassify:
    """Test classification of the worked examples."""

    def test_type_one(self):
        """Test that two marked segments give a type I certificate."""
        result = classify(WeightVector.of([2, 1, 0, 0, 0, 1]))
        assert result.member
        assert result.certificates == [TypeI((0, 1, 2), (2, 3, 4), True)]
        assert result.refusal_reason is None

    def test_type_two(self):
        """Test that {1,2,4,5} gives a non-exceptional type II certificate."""
        result = classify(WeightVector.of([2, 0, 0, 1, 0, 0]))
        assert result.certificates == [TypeII((1, 2, 4, 5), True, None)]
        assert result.certificates[0].marks == (2, 4)

    def test_type_three(self):
        """Test the hidden tie at {2,4} modulo 2."""
        result = classify(WeightVector.of([2, 0, 1, 0, 1, 0]))
        assert result.certificates == [TypeIII((1, 3, 5), 2, (2, 4), True)]
        assert result.of_kind("III")[0].g == 2

    def test_exceptional_cell_refused(self):
        """Test that a translation of {0,1,2,4} is not a member."""
        result = classify(WeightVector.of([0, 0, 0, 1, 0]))
        assert not result.member
        assert result.refusal_reason == REASON_EXCEPTIONAL

    def test_tie_attained_once(self):
        """Test that a minimum attained once is refused."""
        result = classify(WeightVector.of([2, 0, 1, 0, 2, 0]))
        assert not result.member
        assert result.refusal_reason == REASON_TIE_ONCE

    def test_no_marked_cell(self):
        """Test that a strictly convex weight is refused."""
        result = classify(WeightVector.of([0, 1, 3, 6, 10]))
        assert result.refusal_reason == REASON_NO_MARKED_CELL

    def test_single_cell_of_length_three(self):
        """Test that one marked cell of lattice length 3 is refused."""
        result = classify(WeightVector.of([0, 0, 0, 0, 5]))
        assert result.refusal_reason == REASON_LENGTH_THREE

    def test_boundary_point(self):
        """Test that a point on a cone boundary is a member without interior certificates."""
        result = classify(WeightVector.of([0, 0, 0, 0, 0, 0]))
        assert result.member
        assert not result.interior_certificates()
        assert {"I", "II", "III"} == {c.kind for c in result.certificates}


class TestInvariance:
    """Test symmetries of membership."""

    def setup_method(self):
        """Set up weights covering all three types."""
        self.weights = [
            WeightVector.of([2, 1, 0, 0, 0, 1]),
            WeightVector.of([2, 0, 0, 1, 0, 0]),
            WeightVector.of([2, 0, 1, 0, 1, 0]),
            WeightVector.of([2, 0, 1, 0, 2, 0]),
        ]

    def test_affine_invariance(self):
        """Test that adding a + b*i to w_i keeps the certificates."""
        for w in self.weights:
            shifted = WeightVector.of(
                wi + Fraction(7, 3) - Fraction(5, 2) * i for i, wi in enumerate(w)
            )
            assert _keys(classify(shifted)) == _keys(classify(w))

    def test_scaling_invariance(self):
        """Test that positive scaling keeps the certificates."""
        for w in self.weights:
            scaled = WeightVector.of(3 * wi for wi in w)
            assert _keys(classify(scaled)) == _keys(classify(w))

    def test_reversal(self):
        """Test that reversing w reflects every certificate."""
        for w in self.weights:
            n = w.n
            expected = {c.reflected(n).key() for c in classify(w).certificates}
            assert _keys(classify(reflect(w))) == expected


class TestEnumerateCones:
    """Test cone enumeration."""

    def test_degree_four(self):
        """Test the three cones for n = 4."""
        cones = enumerate_cones(4)
        certificates = [cone.certificate for cone in cones]
        assert TypeII((0, 1, 3, 4)) in certificates
        cells = {c.cell for c in certificates if c.kind == "II"}
        assert cells == {(0, 1, 3, 4)}
        assert TypeI((0, 1, 2), (2, 3, 4)) in certificates
        assert TypeIII((0, 2, 4), 2, (1, 3)) in certificates
        assert len(cones) == 3

    def test_degree_five_counts(self):
        """Test the number of cones of each type for n = 5."""
        counts = Counter(cone.certificate.kind for cone in enumerate_cones(5))
        assert counts == {"I": 7, "II": 8, "III": 6}

    def test_scaled_exceptional_kept(self):
        """Test that 2 * {0,1,2,3} is a type II cone for n = 6."""
        cells = {
            cone.certificate.cell: cone.certificate
            for cone in enumerate_cones(6)
            if cone.certificate.kind == "II"
        }
        assert cells[(0, 2, 4, 6)].exceptional.s == 2
        assert (0, 1, 2, 3) not in cells

    @pytest.mark.parametrize("n", [3, 13])
    def test_budget(self, n):
        """Test that enumeration outside 4..12 is refused."""
        with pytest.raises(BudgetExceeded, match="supports 4 <= n <= 12"):
            enumerate_cones(n)

    def test_dimensions(self):
        """Test that every cone for n = 6 has dimension n - 1."""
        for cone in enumerate_cones(6):
            assert dimension_check(cone.certificate, 6) == 5

    def test_table(self):
        """Test the tabular view of the cones."""
        table = cones_table(4)
        assert list(table.columns) == ["type", "cells", "d", "tie", "equalities", "inequalities"]
        assert sorted(table["type"]) == ["I", "II", "III"]
        row = table[table["type"] == "III"].iloc[0]
        assert row["cells"] == "{0,2,4}"
        assert row["tie"] == "{1,3}"


class TestConeDescriptions:
    """Test H-descriptions and sampled interior points."""

    def test_type_three_description(self):
        """Test the equalities of the hidden-tie cone."""
        description = cone_h_description(TypeIII((1, 3, 5), 2, (2, 4)), 5)
        assert description.equalities[0] == (0, -2, 0, 4, 0, -2)
        assert description.equalities[1] == (0, -2, 4, 0, -4, 2)
        assert description.strictly_contains(WeightVector.of([2, 0, 1, 0, 1, 0]).entries)

    def test_describe_certificate(self):
        """Test the plain-data view of a scaled exceptional cell."""
        data = describe_certificate(TypeII((2, 8, 10, 14), exceptional=None).reflected(14))
        assert data["cell"] == [0, 4, 6, 12]
        assert data["exceptional"] == {"base": [0, 2, 3, 6], "s": 2, "r": 0}

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_sampled_points_are_interior(self, n):
        """Test that sampled points lie inside their cones and classify accordingly."""
        rng = random.Random(n)
        for cone in enumerate_cones(n):
            w = sample_interior_point(cone.certificate, n, rng)
            assert cone.h_description.strictly_contains(w.entries)
            result = classify(w)
            assert cone.certificate.key() in _keys(result)
