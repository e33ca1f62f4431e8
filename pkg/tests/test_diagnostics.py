"""
Tests for the measured constants of a DKK construction and the regularity sums
"""
import math

import numpy as np
import pytest

from core.bases.schauder import DifferenceBasis
from core.dkk.diagnostics import block_equivalence, concavity_modulus, projection_bounds, unit_vector_seminormalization
from core.dkk.partition import partition_from_sizes
from core.dkk.regularity_sums import new_regular_sums, regularity_sums
from core.exceptions import SpecValidationError
from core.spaces.sequence_spaces import LpSpace


class TestDiagnostics:
    def test_projection_bounds_in_l2(self):
        """P is an orthogonal projection in l_2, so neither P nor Q can grow a vector"""
        sigma = partition_from_sizes([1, 2, 4])
        bounds = projection_bounds(sigma, LpSpace(p=2, dim=7), trials=500, seed=11)
        assert bounds["max_P"] <= 1 + 1e-12
        assert bounds["max_Q"] <= 1 + 1e-12

    def test_projection_bounds_in_l1(self):
        sigma = partition_from_sizes([1, 2, 4, 8])
        bounds = projection_bounds(sigma, LpSpace(p=1, dim=15), trials=500, seed=11)
        assert bounds["max_P"] <= 1 + 1e-12
        assert bounds["max_Q"] <= 2 + 1e-12

    def test_block_band(self, default_space):
        """On blocks of size >= 2 the band is [1, sqrt(17)]: ||Q f|| + 4 ||P f|| against ||f||"""
        rows = block_equivalence(default_space, trials=50, seed=3)
        assert [row["n"] for row in rows] == [1, 2, 3, 4]
        assert rows[0]["c1"] == pytest.approx(1.0) and rows[0]["c2"] == pytest.approx(1.0)
        for row in rows[1:]:
            assert row["c1"] == pytest.approx(1.0, rel=1e-9)
            assert row["c2"] == pytest.approx(math.sqrt(17), rel=1e-9)

    def test_seminormalization(self, default_space):
        info = unit_vector_seminormalization(default_space)
        assert 1 <= info["ratio"] < math.inf

    def test_concavity_modulus_of_l_half(self):
        """kappa = 2^(1/p - 1) is attained by two disjoint unit vectors"""
        assert concavity_modulus(LpSpace(p=0.5, dim=4), trials=200, seed=1) == pytest.approx(2.0, rel=1e-12)

    def test_concavity_modulus_of_banach_space(self):
        assert concavity_modulus(DifferenceBasis(p=1, dim=4), trials=200, seed=1) <= 1 + 1e-12


class TestRegularitySums:
    SIZES = [2**n for n in range(1, 13)]

    def test_sqrt_sums_are_bounded(self):
        sums = regularity_sums(np.sqrt, self.SIZES, 0.5)
        assert sums.passed
        assert sums.fit.alpha == pytest.approx(0.5, rel=1e-6)
        assert 1 < sums.c2 < 2
        assert sums.t == pytest.approx(sums.c2 / (1 + sums.c2))

    def test_adversarial_sum_is_bounded(self):
        result = new_regular_sums(np.sqrt, self.SIZES, 0.5)
        assert result["b"] == 2
        assert result["passed"]

    def test_exponent_range(self):
        with pytest.raises(SpecValidationError):
            regularity_sums(np.sqrt, self.SIZES, 1.5)

    def test_needs_two_blocks(self):
        with pytest.raises(SpecValidationError):
            regularity_sums(np.sqrt, [4], 0.5)
