"""
Tests for the regularity checks and the growth fit
"""
import numpy as np
import pytest

from core.exceptions import SpecValidationError
from core.spaces.regularity import RegularityKind, fit_growth, regularity_check

SQRT = np.sqrt(np.arange(1, 81, dtype=float))


class TestRegularityCheck:
    def test_sqrt_has_lrp_with_b4(self):
        """2 sqrt(m) <= sqrt(4m) holds with equality"""
        result = regularity_check(SQRT, "LRP", 4, 20)
        assert result.passed
        assert result.first_violation is None

    def test_sqrt_fails_lrp_with_b2(self):
        result = regularity_check(SQRT, RegularityKind.LRP, 2, 20)
        assert not result.passed
        assert result.first_violation == 1

    def test_sqrt_has_urp(self):
        assert regularity_check(SQRT, "URP", 4, 20).passed

    def test_linear_fails_urp_with_b2(self):
        linear = np.arange(1, 41, dtype=float)
        assert not regularity_check(linear, "URP", 2, 20).passed

    def test_doubling(self):
        assert regularity_check(SQRT, "doubling", 2, 40, C=1.5).passed
        assert not regularity_check(SQRT, "doubling", 2, 40, C=1.4).passed

    def test_doubling_needs_constant(self):
        with pytest.raises(SpecValidationError):
            regularity_check(SQRT, "doubling", 2, 10)

    def test_sequence_too_short(self):
        with pytest.raises(SpecValidationError):
            regularity_check(SQRT, "LRP", 4, 30)

    def test_nonpositive_sequence(self):
        with pytest.raises(SpecValidationError):
            regularity_check([1.0, 0.0, 2.0, 3.0], "LRP", 2, 1)


class TestGrowthFit:
    def test_sqrt_exponent(self):
        fit = fit_growth(SQRT)
        assert fit.alpha == pytest.approx(0.5, rel=1e-9)
        assert fit.c1 == pytest.approx(1.0, rel=1e-9)

    def test_sampled_points(self):
        points = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
        fit = fit_growth(points**0.25, points=points)
        assert fit.alpha == pytest.approx(0.25, rel=1e-9)

    def test_points_must_increase(self):
        with pytest.raises(SpecValidationError):
            fit_growth([1.0, 2.0], points=[2.0, 1.0])

    def test_flat_sequence_rejected(self):
        with pytest.raises(SpecValidationError):
            fit_growth([1.0, 1.0, 1.0])
