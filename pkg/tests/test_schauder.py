"""
Tests for the bases: synthesis/analysis, the direct sums and semi-normalization
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from core.bases.normers import TruncatedNormer, as_normer, evaluate_rows
from core.bases.schauder import (
    ConcatenatedBasis,
    DifferenceBasis,
    InterleavedBasis,
    UnitVectorBasis,
    parse_basis,
    seminormalization,
)
from core.exceptions import SpecValidationError
from core.spaces.sequence_spaces import DirectSumDSpace, LorentzSpace, LpSpace


class TestDifferenceBasis:
    """Difference system of l_p"""

    def test_synthesis(self):
        basis = DifferenceBasis(p=0.5, dim=3)
        np.testing.assert_array_equal(basis.synthesize([1, 1, 1]), [0, 0, 1])
        np.testing.assert_array_equal(basis.synthesize([1, 0, 1]), [1, -1, 1])

    def test_odd_positions_of_an_interval(self):
        """||S_A 1_[1,3]|| / ||1_[1,3]|| = 3^2 for A = {1, 3}"""
        basis = DifferenceBasis(p=0.5, dim=3)
        assert basis.basis_norm([1, 0, 1]) / basis.basis_norm([1, 1, 1]) == 9.0

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(min_value=-50, max_value=50), min_size=1, max_size=12))
    def test_analysis_inverts_synthesis(self, a):
        basis = DifferenceBasis(p=1, dim=len(a))
        np.testing.assert_array_equal(basis.analyze(basis.synthesize(a)), np.asarray(a, dtype=float))

    def test_coordinate_bound(self):
        assert DifferenceBasis(p=0.5, dim=3).coordinate_bound == 1.0
        assert DifferenceBasis(p=2, dim=3).coordinate_bound is None

    def test_seminormalization(self):
        info = seminormalization(DifferenceBasis(p=0.5, dim=4))
        assert info == {"min": 1.0, "max": 4.0, "ratio": 4.0}


class TestUnitVectorBasis:
    def test_norm_is_space_norm(self):
        basis = UnitVectorBasis(space=LpSpace(p=2, dim=2))
        assert basis.basis_norm([3, 4]) == pytest.approx(5.0)

    def test_lorentz_coordinate_bound(self):
        basis = UnitVectorBasis(space=LorentzSpace(q=1, w=[2.0, 1.0], dim=2))
        assert basis.coordinate_bound == 0.5


class TestDirectSums:
    """Interleaved and concatenated sums"""

    def _interleaved(self):
        return InterleavedBasis(
            components=(DifferenceBasis(p=1, dim=2), UnitVectorBasis(space=LpSpace(p=1, dim=2))),
            ambient=DirectSumDSpace(p=1, q=1, dim=4, split=2),
        )

    def test_interleaved_synthesis(self):
        np.testing.assert_array_equal(self._interleaved().synthesize([1, 5, 1, 7]), [0, 1, 5, 7])

    def test_interleaved_analysis(self):
        basis = self._interleaved()
        np.testing.assert_array_equal(basis.analyze([0, 1, 5, 7]), [1, 5, 1, 7])

    def test_interleaved_needs_equal_dims(self):
        with pytest.raises(ValidationError):
            InterleavedBasis(
                components=(DifferenceBasis(p=1, dim=2), DifferenceBasis(p=1, dim=3)),
                ambient=LpSpace(p=1, dim=5),
            )

    def test_interleaved_ambient_dimension(self):
        with pytest.raises(ValidationError):
            InterleavedBasis(
                components=(DifferenceBasis(p=1, dim=2), DifferenceBasis(p=1, dim=2)),
                ambient=LpSpace(p=1, dim=5),
            )

    def test_direct_sum_ambient_takes_two_components(self):
        with pytest.raises(ValidationError):
            InterleavedBasis(
                components=tuple(DifferenceBasis(p=1, dim=2) for _ in range(3)),
                ambient=DirectSumDSpace(p=1, q=2, dim=6, split=2),
            )

    def test_direct_sum_ambient_split_must_match(self):
        components = (DifferenceBasis(p=1, dim=2), UnitVectorBasis(space=LpSpace(p=1, dim=2)))
        with pytest.raises(ValidationError):
            InterleavedBasis(components=components, ambient=DirectSumDSpace(p=1, q=1, dim=4, split=1))
        basis = InterleavedBasis(components=components, ambient=DirectSumDSpace(p=1, q=1, dim=4))
        assert basis.ambient.p_part == 2

    def test_concatenated_uses_outer_lattice(self):
        basis = ConcatenatedBasis(
            components=(DifferenceBasis(p=1, dim=2), DifferenceBasis(p=1, dim=2)),
            outer=LpSpace(p="inf", dim=2),
        )
        assert basis.basis_norm([1, 1, 2, 0]) == 2.0
        assert basis.p_convexity == 1.0

    def test_concatenated_outer_dimension(self):
        with pytest.raises(ValidationError):
            ConcatenatedBasis(components=(DifferenceBasis(p=1, dim=2),), outer=LpSpace(p=1, dim=2))

    def test_parse_nested_json(self):
        basis = parse_basis(
            '{"kind": "concatenated", "outer": {"kind": "lp", "p": 2, "dim": 2},'
            ' "components": [{"kind": "difference", "p": 0.5, "dim": 2}, {"kind": "difference", "p": 0.5, "dim": 3}]}'
        )
        assert basis.dim == 5
        assert basis.p_convexity == 0.5


class TestNormers:
    def test_space_is_wrapped_in_unit_vectors(self):
        normer = as_normer(LpSpace(p=0.5, dim=2))
        assert normer.dim == 2
        assert normer([1, 1]) == 4.0
        assert normer.p_convexity == 0.5

    def test_normers_pass_through(self):
        normer = as_normer(DifferenceBasis(p=1, dim=3))
        assert as_normer(normer) is normer

    def test_unknown_object(self):
        with pytest.raises(SpecValidationError):
            as_normer(42)

    def test_truncation(self):
        parent = as_normer(DifferenceBasis(p=1, dim=4))
        truncated = TruncatedNormer(parent, 2)
        assert truncated([1, 1]) == parent([1, 1, 0, 0])
        with pytest.raises(SpecValidationError):
            TruncatedNormer(parent, 5)

    def test_batched_evaluation_matches_direct(self):
        normer = as_normer(DifferenceBasis(p=0.5, dim=3))
        rows = np.random.default_rng(7).standard_normal((5, 3))
        np.testing.assert_allclose(evaluate_rows(normer, rows, batch_size=2), normer(rows), rtol=1e-15)

    def test_dkk_space_is_wrapped(self, small_space):
        normer = as_normer(small_space)
        assert normer.dim == 7
        assert normer.basis.kind == "dkk"
