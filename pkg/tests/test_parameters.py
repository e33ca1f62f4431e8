"""
Tests for the greedy-approximation parameters on bases with known values
"""
import math

import numpy as np
import pytest

from core.bases.normers import as_normer
from core.bases.schauder import DifferenceBasis
from core.exceptions import BudgetExceededError, SpecValidationError
from core.params.parameters import (
    analytic_ceiling,
    basis_constant,
    conditionality,
    dem_tqg_check,
    dem_tqg_ratio,
    democracy_functions,
    embedding_constants,
    lebesgue_lower,
    quasi_greedy_constant,
    suppression_asymptotic,
)
from core.params.search import ExhaustiveMode, SampledMode
from core.spaces.sequence_spaces import LpSpace


@pytest.fixture
def difference():
    return as_normer(DifferenceBasis(p=0.5, dim=4))


@pytest.fixture
def l2():
    return as_normer(LpSpace(p=2, dim=5))


class TestDemocracy:
    def test_l2_is_exactly_democratic(self):
        normer = as_normer(LpSpace(p=2, dim=4))
        report = democracy_functions(normer, 4, reference_exponent=2)
        for m in range(1, 5):
            assert report.value(m, "phi_u") == pytest.approx(math.sqrt(m))
            assert report.value(m, "phi_l") == pytest.approx(math.sqrt(m))
        assert {e.kind for e in report.entries} == {"exact"}
        assert report.reference["psi_2"] == pytest.approx([1, math.sqrt(2), math.sqrt(3), 2])
        assert report.verify(normer) == 8

    def test_sampled_labels(self):
        normer = as_normer(LpSpace(p=1, dim=6))
        report = democracy_functions(normer, 3, mode=SampledMode(trials=60, seed=4))
        assert report.series("phi_u", "lower_bound") == pytest.approx({1: 1.0, 2: 2.0, 3: 3.0})
        assert report.series("phi_l", "upper_bound") == pytest.approx({1: 1.0, 2: 2.0, 3: 3.0})
        assert report.extra["phi_l_truncated_at"] == 6

    def test_exhaustive_range(self):
        with pytest.raises(SpecValidationError):
            democracy_functions(LpSpace(p=2, dim=4), 2, mode=ExhaustiveMode(n_exh=3))

    def test_budget_guard(self, small_budget):
        with pytest.raises(BudgetExceededError):
            democracy_functions(LpSpace(p=2, dim=4), 2)


class TestConditionality:
    def test_difference_k_tilde_is_m_squared(self, difference):
        report = conditionality(difference, 3, "k_tilde")
        assert [report.value(m) for m in (1, 2, 3)] == pytest.approx([1.0, 4.0, 9.0], rel=1e-12)
        assert report.verify(difference) == 3

    def test_ceiling_and_reference(self, difference):
        report = conditionality(difference, 3, "k_tilde")
        assert [report.value(m, "ceiling") for m in (1, 2, 3)] == pytest.approx([4.0, 16.0, 36.0])
        assert report.reference["psi_0.5"] == pytest.approx([1.0, 4.0, 9.0])

    def test_k_dominates_k_tilde(self, difference):
        k = conditionality(difference, 3, "k", ExhaustiveMode())
        k_tilde = conditionality(difference, 3, "k_tilde", ExhaustiveMode())
        for m in (1, 2, 3):
            assert k_tilde.value(m) <= k.value(m) * (1 + 1e-12)
            assert k.value(m) <= k.value(m, "ceiling") * (1 + 1e-12)

    def test_sampled_finds_the_interval_witness(self):
        normer = as_normer(DifferenceBasis(p=0.5, dim=6))
        report = conditionality(normer, 3, "k_tilde", SampledMode(trials=200, seed=9))
        assert [report.value(m) for m in (1, 2, 3)] == pytest.approx([1.0, 4.0, 9.0], rel=1e-12)
        assert {e.kind for e in report.entries if e.series == "k_tilde"} == {"lower_bound"}

    def test_sampled_is_independent_of_jobs(self):
        normer = as_normer(DifferenceBasis(p=0.5, dim=6))
        mode = SampledMode(trials=100, seed=21)
        one = conditionality(normer, 3, "k", mode, jobs=1)
        many = conditionality(normer, 3, "k", mode, jobs=3)
        assert one.model_dump() == many.model_dump()

    def test_m_range(self, difference):
        with pytest.raises(SpecValidationError):
            conditionality(difference, 5, "k_tilde")

    def test_no_ceiling_without_coordinate_bound(self, small_space):
        assert analytic_ceiling(small_space, 2) is None
        assert analytic_ceiling(LpSpace(p=2, dim=3), 2) == pytest.approx(2.0)


class TestEmbeddingConstants:
    def test_beta_of_l1_against_l2(self):
        normer = as_normer(LpSpace(p=1, dim=4))
        report = embedding_constants(normer, 3, 2, "beta", SampledMode(trials=50, seed=1))
        for j in (1, 2, 3):
            assert report.value(j) == pytest.approx(report.value(j, "closed_form"), rel=1e-12)
            assert report.value(j, "closed_form") == pytest.approx(math.sqrt(j))
        assert report.verify(normer) == 3

    def test_eta_of_l1_against_l2(self):
        normer = as_normer(LpSpace(p=1, dim=4))
        report = embedding_constants(normer, 3, 2, "eta", SampledMode(trials=50, seed=1))
        assert [report.value(j) for j in (1, 2, 3)] == pytest.approx([1.0, 1.0, 1.0])

    def test_infinite_exponent(self):
        report = embedding_constants(LpSpace(p=1, dim=3), 2, "inf", "beta", SampledMode(trials=20, seed=1))
        assert report.extra["exponent"] == "inf"
        assert report.value(2, "closed_form") == pytest.approx(2.0)

    def test_r_range(self):
        with pytest.raises(SpecValidationError):
            embedding_constants(LpSpace(p=1, dim=3), 4, 2)


class TestQuasiGreedy:
    def test_l2_is_one(self, l2):
        report = quasi_greedy_constant(l2, trials=100, seed=2)
        assert report.value(5) == pytest.approx(1.0, rel=1e-12)

    def test_difference_grows(self):
        """1_[1,5] with A = {1, 3, 5} gives 5^2"""
        normer = as_normer(DifferenceBasis(p=0.5, dim=5))
        report = quasi_greedy_constant(normer, trials=20, seed=2)
        assert report.value(5) >= 25 * (1 - 1e-12)
        assert report.verify(normer) == 1


class TestSuppression:
    def test_l2_exhaustive(self):
        report = suppression_asymptotic(LpSpace(p=2, dim=4), mode=ExhaustiveMode(depth=1))
        assert report.value(4, "suppression") == pytest.approx(1.0, rel=1e-12)
        assert report.mode == "exhaustive"

    def test_relaxed_variant(self):
        normer = as_normer(LpSpace(p=2, dim=8))
        report = suppression_asymptotic(normer, mode=SampledMode(trials=50, seed=5), b=2, d=1)
        value = report.value(8, "suppression_b2_d1")
        assert 0 < value <= 1 + 1e-12
        assert report.extra == {"b": 2, "d": 1}
        assert set(report.witnesses[0].index_set) and min(report.witnesses[0].index_set) > 2 * 2

    def test_no_admissible_sets(self):
        with pytest.raises(SpecValidationError):
            suppression_asymptotic(LpSpace(p=2, dim=3), mode=ExhaustiveMode(depth=1), b=3)

    @pytest.mark.parametrize("d", [3, 6, 9])
    @pytest.mark.parametrize("mode", [SampledMode(trials=20, seed=1), ExhaustiveMode(depth=1)])
    def test_too_many_required_elements(self, d, mode):
        """Sampled and exhaustive searches agree on rejecting d beyond the admissible sizes"""
        with pytest.raises(SpecValidationError):
            suppression_asymptotic(DifferenceBasis(p=0.5, dim=6), mode=mode, d=d)

    def test_sampled_witness_is_admissible(self):
        report = suppression_asymptotic(DifferenceBasis(p=0.5, dim=6), mode=SampledMode(trials=200, seed=4), d=2)
        witness = report.witnesses[0]
        assert report.value(6, "suppression_b1_d2") > 0
        assert len(witness.index_set) == 3
        assert min(witness.index_set) > len(witness.index_set)


class TestBasisConstant:
    def test_difference_is_monotone(self):
        normer = as_normer(DifferenceBasis(p=0.5, dim=5))
        assert basis_constant(normer, trials=50, seed=3).value(5) == pytest.approx(1.0, rel=1e-12)
        exhaustive = basis_constant(normer, mode=ExhaustiveMode(depth=1))
        assert exhaustive.value(5) == pytest.approx(1.0, rel=1e-12)
        assert exhaustive.mode == "exhaustive"


class TestDemocracyTruncationQuasiGreedy:
    def test_ratio(self, l2):
        assert dem_tqg_ratio(l2, [1, 0, 0], [1, 1, 0]) == pytest.approx(1 / math.sqrt(2))

    def test_hypothesis_enforced(self, l2):
        with pytest.raises(SpecValidationError):
            dem_tqg_ratio(l2, [1, 1, 0], [2, 0, 0])

    def test_l2_bound(self):
        normer = as_normer(LpSpace(p=2, dim=4))
        report = dem_tqg_check(normer, trials=64, seed=8)
        assert report.value(4) <= 1 + 1e-12
        assert report.verify(normer) == 1


class TestLebesgue:
    def test_l2_is_one(self, l2):
        report = lebesgue_lower(l2, 2, witness_budget=8, seed=1)
        assert report.value(2) == pytest.approx(1.0, abs=1e-12)

    def test_difference_lower_bound(self, difference):
        """f = 1_[1,4], A = {1}, g = d_4"""
        report = lebesgue_lower(difference, 1, witness_budget=4, seed=1)
        assert report.value(1) >= 4 * (1 - 1e-12)
        witness = report.witnesses[0]
        assert set(witness.extra) == {"f", "g"}
        np.testing.assert_allclose(np.asarray(witness.extra["f"]) - np.asarray(witness.extra["g"]), witness.denominator)
        assert report.verify(difference) == 1

    def test_m_zero(self, difference):
        report = lebesgue_lower(difference, 0)
        assert report.value(0) == 1.0
        assert report.entries[0].kind == "exact"

    def test_m_range(self, difference):
        with pytest.raises(SpecValidationError):
            lebesgue_lower(difference, 4)
