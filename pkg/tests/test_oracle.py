"""Tests for forward sampling and cross-validation."""

import random
from fractions import Fraction

import pytest
from tropsev.core.arith import CoeffRing
from tropsev.core.newton import WeightVector
from tropsev.core.oracle import (
    MODE_DISTINCT_NODES,
    MODE_HIDDEN_TIE,
    RootSample,
    canonical_form,
    check_profile,
    check_residuals,
    cross_validate,
    exceptional_smoke,
    exceptional_targets,
    exceptional_weight,
    forward_map,
    forward_sample,
    random_root_sample,
)
from tropsev.core.puiseux import PuiseuxTrunc

RING = CoeffRing.rationals()


def _terms(*pairs):
    return tuple((Fraction(e), RING.element(c)) for e, c in pairs)


class TestForwardSample:
    """Test expansion of polynomials with two double roots."""

    def test_two_cells(self):
        """Test b = t, one simple root t^-1 and leading coefficient t."""
        sample = RootSample(RING, _terms((1, 1)), (_terms((-1, 1)),), _terms((1, 1)))
        forward = forward_sample(sample)
        assert forward.weight == WeightVector.of([2, 1, 0, 0, 0, 1])
        assert check_profile(forward)
        assert check_residuals(forward)

    def test_hidden_tie(self):
        """Test b = -1 - t with the simple root t^2."""
        sample = RootSample(RING, _terms((0, -1), (1, -1)), (_terms((2, 1)),), _terms((0, 1)))
        forward = forward_sample(sample)
        assert forward.weight == WeightVector.of([2, 0, 1, 0, 1, 0])
        assert check_profile(forward)
        assert check_residuals(forward)

    def test_unit_roots(self):
        """Test that b = 2 without simple roots gives the zero weight."""
        sample = RootSample(RING, _terms((0, 2)), (), _terms((0, 1)))
        forward = forward_sample(sample)
        assert forward.weight == WeightVector.of([0, 0, 0, 0, 0])
        assert sample.n == 4
        assert check_residuals(forward)

    def test_forward_map(self):
        """Test the expansion at a fixed truncation order."""
        b = PuiseuxTrunc.monomial(RING, 1, 1, 12)
        simple = [PuiseuxTrunc.monomial(RING, 1, -1, 12)]
        lead = PuiseuxTrunc.monomial(RING, 1, 1, 12)
        coefficients, weight = forward_map(b, simple, lead)
        assert len(coefficients) == 6
        assert weight == WeightVector.of([2, 1, 0, 0, 0, 1])
        assert coefficients[5].leading_coefficient().to_fraction() == 1

    def test_node_must_differ_from_one(self):
        """Test that b = 1 is rejected."""
        with pytest.raises(ValueError, match="differ from 1"):
            RootSample(RING, _terms((0, 1)), (), _terms((0, 1)))
        one = PuiseuxTrunc.constant(RING, 1, 5)
        with pytest.raises(ValueError, match="differ from 1"):
            forward_map(one, [], one)

    def test_zero_root_rejected(self):
        """Test that roots must be nonzero."""
        with pytest.raises(ValueError, match="must be nonzero"):
            RootSample(RING, _terms((0, 2)), ((),), _terms((0, 1)))


class TestRandomSamples:
    """Test the sample distribution."""

    def test_unknown_mode(self):
        """Test that an unknown mode is rejected."""
        with pytest.raises(ValueError, match="Unknown sample mode"):
            random_root_sample(5, random.Random(0), "uniform")

    def test_distinct_nodes(self):
        """Test that the second node has nonzero valuation."""
        rng = random.Random(4)
        for _ in range(10):
            sample = random_root_sample(6, rng, MODE_DISTINCT_NODES)
            assert sample.root_valuations()[2] != 0
            assert len(sample.simple_roots) == 2

    def test_hidden_tie_nodes(self):
        """Test that b starts with -1 and simple roots have distinct valuations."""
        rng = random.Random(5)
        for _ in range(10):
            sample = random_root_sample(7, rng, MODE_HIDDEN_TIE)
            assert sample.node_b[0][1].to_fraction() == -1
            valuations = sample.root_valuations()[4:]
            assert len(set(valuations)) == 3
            assert 0 not in valuations


class TestCrossValidation:
    """Test that forward samples are always accepted."""

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_all_modes(self, n):
        """Test a short run over every mode."""
        report = cross_validate(n, 9, seed=n)
        assert report.ok, report.failures
        assert report.degenerate + len(report.kinds) == 9

    def test_hidden_tie_only_type_three(self):
        """Test that hidden-tie samples are certified by type III only."""
        report = cross_validate(5, 6, seed=2, modes=(MODE_HIDDEN_TIE,))
        assert report.ok, report.failures
        assert set(report.kinds) <= {"III"}

    def test_distinct_nodes_have_type_one(self):
        """Test that nodes of different valuations give a type I certificate."""
        report = cross_validate(5, 6, seed=3, modes=(MODE_DISTINCT_NODES,))
        assert report.ok, report.failures
        assert all("I" in kind.split("+") for kind in report.kinds)

    def test_report_dict(self):
        """Test the plain-data view of a report."""
        data = cross_validate(4, 3, seed=0).as_dict()
        assert set(data) == {"n", "seed", "samples", "degenerate", "failures", "histogram"}
        assert sum(data["histogram"].values()) + data["degenerate"] == 3

    def test_degree_range(self):
        """Test that the degree must lie in 4..10."""
        with pytest.raises(ValueError, match="between 4 and 10"):
            cross_validate(11, 1, seed=0)

    @pytest.mark.slow
    def test_long_run(self):
        """Test a longer run at degree 8."""
        assert cross_validate(8, 60, seed=11).ok


class TestExceptionalSmoke:
    """Test the exceptional single-cell weights."""

    def test_exceptional_weight(self):
        """Test the weight whose only marked cell is {0,1,2,4}."""
        assert exceptional_weight((0, 1, 2, 4), 5) == WeightVector.of([0, 0, 0, 1, 0, 1])

    def test_support_must_fit(self):
        """Test that the support must lie in 0..n."""
        with pytest.raises(ValueError, match="does not fit"):
            exceptional_weight((0, 3, 4, 6), 5)

    def test_targets(self):
        """Test the translates that fit for n = 5."""
        supports = [support for support, _ in exceptional_targets(5)]
        assert (0, 1, 2, 3) in supports
        assert (2, 3, 4, 5) in supports
        assert (1, 3, 4, 5) in supports
        assert len(supports) == 7

    def test_canonical_form(self):
        """Test invariance under adding a + b * i."""
        w = WeightVector.of([2, 1, 0, 0, 0, 1])
        moved = WeightVector.of(wi + 3 - Fraction(1, 2) * i for i, wi in enumerate(w))
        assert canonical_form(moved) == canonical_form(w)
        assert canonical_form(w)[0] == 0
        assert canonical_form(w)[-1] == 0

    def test_smoke(self):
        """Test that targets are refused and no sample hits them."""
        report = exceptional_smoke(5, 6, seed=0)
        assert report.ok
        assert not report.unrefused
