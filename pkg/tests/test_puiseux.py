"""Tests for truncated Puiseux series and precision retries."""

from fractions import Fraction

import pytest
from tropsev.core.arith import CoeffRing, int_poly
from tropsev.core.minors import minor_poly
from tropsev.core.precision import PrecisionPolicy, initial_trunc, parse_cap, with_precision
from tropsev.core.puiseux import PuiseuxTrunc, eval_intpoly_at_series
from tropsev.errors import PrecisionExhausted, ZeroUpToTruncation


def _coefficients(series):
    return {e: c.to_fraction() for e, c in series.terms}


class TestPuiseuxArithmetic:
    """Test series arithmetic over Q."""

    def setup_method(self):
        """Set up 1 + t and 1 - t modulo t^3."""
        self.ring = CoeffRing.rationals()
        self.one_plus_t = PuiseuxTrunc.from_terms(self.ring, [(0, 1), (1, 1)], 3)
        self.one_minus_t = PuiseuxTrunc.from_terms(self.ring, [(0, 1), (1, -1)], 3)

    def test_product(self):
        """Test (1 + t)(1 - t) = 1 - t^2 + O(t^3)."""
        product = self.one_plus_t * self.one_minus_t
        assert _coefficients(product) == {0: 1, 2: -1}
        assert product.trunc == 3

    def test_inverse(self):
        """Test 1 / (1 + t) = 1 - t + t^2 + O(t^3)."""
        inverse = self.one_plus_t.inverse()
        assert _coefficients(inverse) == {0: 1, 1: -1, 2: 1}
        assert inverse.trunc == 3

    def test_inverse_geometric_series(self):
        """Test 1 / (1 - t) modulo t^6."""
        series = PuiseuxTrunc.from_terms(self.ring, [(0, 1), (1, -1)], 6)
        inverse = series.inverse()
        assert _coefficients(inverse) == {e: 1 for e in range(6)}
        assert inverse.trunc == 6

    def test_inverse_with_valuation_and_leading_coefficient(self):
        """Test 1 / (2t - 2t^2) = t^-1 (1 + t + ...) / 2 modulo t^4."""
        series = PuiseuxTrunc.from_terms(self.ring, [(1, 2), (2, -2)], 6)
        inverse = series.inverse()
        assert _coefficients(inverse) == {e: Fraction(1, 2) for e in range(-1, 4)}
        assert inverse.trunc == 4

    def test_inverse_with_fractional_exponents(self):
        """Test 1 / (1 + t^(1/2)) modulo t^2."""
        series = PuiseuxTrunc.from_terms(self.ring, [(0, 1), (Fraction(1, 2), 1)], 2)
        inverse = series.inverse()
        assert _coefficients(inverse) == {
            Fraction(k, 2): (-1) ** k for k in range(4)
        }

    def test_sum_cancels_to_zero_up_to_truncation(self):
        """Test that a cancelled sum has no valuation."""
        difference = self.one_plus_t - self.one_plus_t
        assert difference.is_zero_to_precision()
        with pytest.raises(ZeroUpToTruncation, match="zero up to"):
            difference.valuation()

    def test_truncation_order_follows_valuation(self):
        """Test that multiplying by t^2 raises the truncation order by 2."""
        t_squared = PuiseuxTrunc.monomial(self.ring, 1, 2, 10)
        product = self.one_plus_t * t_squared
        assert product.trunc == 5
        assert product.valuation() == 2

    def test_rational_exponents(self):
        """Test arithmetic with t^(1/2)."""
        root = PuiseuxTrunc.monomial(self.ring, 3, Fraction(1, 2), 4)
        square = root * root
        assert _coefficients(square) == {Fraction(1): 9}
        assert square.trunc == Fraction(9, 2)

    def test_from_terms_merges_and_drops(self):
        """Test that equal exponents add and cancelled terms vanish."""
        series = PuiseuxTrunc.from_terms(self.ring, [(1, 2), (0, 1), (1, -2), (5, 1)], 4)
        assert _coefficients(series) == {0: 1}

    def test_shift_and_agrees_with(self):
        """Test multiplication by t^e and comparison up to truncation."""
        shifted = self.one_plus_t.shift(-1)
        assert shifted.valuation() == -1
        assert shifted.trunc == 2
        assert self.one_plus_t.agrees_with(self.one_plus_t.truncate(2))

    def test_coefficient_beyond_truncation(self):
        """Test that coefficients past O(t^trunc) are unknown."""
        with pytest.raises(ValueError, match="beyond the truncation"):
            self.one_plus_t.coefficient(3)

    def test_powers(self):
        """Test the list of powers of 1 + t."""
        powers = self.one_plus_t.powers(2)
        assert _coefficients(powers[0]) == {0: 1}
        assert _coefficients(powers[2]) == {0: 1, 1: 2, 2: 1}

    def test_different_rings(self):
        """Test that series over different rings do not mix."""
        other = PuiseuxTrunc.constant(CoeffRing.cyclotomic(3), 1, 3)
        with pytest.raises(ValueError, match="different coefficient rings"):
            self.one_plus_t + other

    def test_inverse_of_zero(self):
        """Test that a series zero up to truncation has no inverse."""
        with pytest.raises(ZeroUpToTruncation):
            PuiseuxTrunc.zero(self.ring, 3).inverse()


class TestQuotientRingSeries:
    """Test series with coefficients in Q[y]/(y^2 + 4y + 1)."""

    def test_product_reduces(self):
        """Test (y + t)(y - t) = (-4y - 1) - t^2."""
        ring = CoeffRing.dynamic([1, 4, 1])
        y = ring.gen()
        plus = PuiseuxTrunc.from_terms(ring, [(0, y), (1, 1)], 4)
        minus = PuiseuxTrunc.from_terms(ring, [(0, y), (1, -1)], 4)
        product = plus * minus
        assert product.coefficient(0) == ring.element((-4, -1))
        assert product.coefficient(1).is_zero()
        assert product.coefficient(2) == ring.element(-1)


class TestEvalIntpolyAtSeries:
    """Test polynomial evaluation at series."""

    def test_first_minor_near_one(self):
        """Test x(x - 1)^4 at 1 + t gives t^4 + t^5 + O(t^6)."""
        ring = CoeffRing.rationals()
        b = PuiseuxTrunc.from_terms(ring, [(0, 1), (1, 1)], 6)
        value = eval_intpoly_at_series(minor_poly((0, 1, 2, 3)).poly, b)
        assert _coefficients(value) == {4: 1, 5: 1}
        assert value.trunc == 6

    def test_linear_at_minus_one(self):
        """Test x - 1 at -1 + t over the cyclotomic ring of order 2."""
        ring = CoeffRing.cyclotomic(2)
        b = PuiseuxTrunc.from_terms(ring, [(0, ring.gen()), (1, 1)], 5)
        value = eval_intpoly_at_series(int_poly([-1, 1]), b)
        assert value.coefficient(0) == ring.element(-2)
        assert value.coefficient(1) == ring.one()

    def test_minor_valuation_at_perturbed_root(self):
        """Test val D_{1,2,3,5}(-1 + t) = 1."""
        ring = CoeffRing.cyclotomic(2)
        b = PuiseuxTrunc.from_terms(ring, [(0, ring.gen()), (1, 1)], 12)
        value = eval_intpoly_at_series(minor_poly((1, 2, 3, 5)).poly, b)
        assert value.valuation() == 1


class TestPrecisionPolicy:
    """Test truncation schedules and retries."""

    def test_schedule_doubles(self):
        """Test the default schedule doubles three times."""
        assert PrecisionPolicy().schedule(5) == [5, 10, 20, 40]

    def test_schedule_cap(self):
        """Test that the cap ends the schedule."""
        policy = PrecisionPolicy(max_trunc=Fraction(12))
        assert policy.schedule(5) == [5, 10, 12]

    def test_schedule_floor(self):
        """Test that the floor raises the first order."""
        policy = PrecisionPolicy(max_doublings=1, min_trunc=Fraction(8))
        assert policy.schedule(5) == [8, 16]

    def test_initial_trunc(self):
        """Test the default starting order."""
        assert initial_trunc(Fraction(3, 2)) == 7
        assert initial_trunc(-2) == 1

    def test_from_env(self, monkeypatch):
        """Test that the cap is read from the environment."""
        monkeypatch.setenv("TROPSEV_MAX_TRUNC", "33/2")
        assert PrecisionPolicy.from_env().max_trunc == Fraction(33, 2)

    def test_parse_cap_rejects_nonpositive(self):
        """Test that the cap must be positive."""
        with pytest.raises(ValueError, match="must be positive"):
            parse_cap("0")

    def test_with_precision_retries(self):
        """Test that an ambiguous attempt is retried at a larger order."""
        seen = []

        def attempt(trunc):
            seen.append(trunc)
            if trunc < 20:
                raise ZeroUpToTruncation("too small")
            return trunc

        assert with_precision(attempt, 5, PrecisionPolicy()) == 20
        assert seen == [5, 10, 20]

    def test_with_precision_exhausted(self):
        """Test that persistent ambiguity raises PrecisionExhausted."""

        def attempt(trunc):
            raise ZeroUpToTruncation("never enough")

        with pytest.raises(PrecisionExhausted, match="still ambiguous"):
            with_precision(attempt, 1, PrecisionPolicy(max_doublings=1), what="test")
