"""
Tests for the DKK space: averaging projection, the biorthogonal system, H and
the quasi-norm
"""
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from pydantic import TypeAdapter

from core.bases.schauder import DifferenceBasis
from core.dkk.dkk_space import (
    AnyBasis,
    averaging_projection,
    build_dkk_space,
    dkk_norm,
    dump_table,
    h_coefficients,
    h_map,
    v_dual_coeffs,
    v_vectors,
)
from core.dkk.partition import partition_from_sizes
from core.exceptions import SpecValidationError
from core.spaces.sequence_spaces import LpSpace, MixedZSpace

vectors15 = st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=15, max_size=15)


class TestAveragingProjection:
    @settings(max_examples=40, deadline=None)
    @given(vectors15)
    def test_p_plus_q_is_identity(self, f):
        sigma = partition_from_sizes([1, 2, 4, 8])
        P, Q = averaging_projection(sigma, f)
        np.testing.assert_allclose(P + Q, f, rtol=1e-12, atol=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(vectors15)
    def test_p_is_idempotent(self, f):
        sigma = partition_from_sizes([1, 2, 4, 8])
        P, Q = averaging_projection(sigma, f)
        PP, QP = averaging_projection(sigma, P)
        PQ, _ = averaging_projection(sigma, Q)
        scale = max(1.0, float(np.max(np.abs(f))))
        np.testing.assert_allclose(PP, P, rtol=1e-12, atol=1e-12 * scale)
        np.testing.assert_allclose(QP, 0.0, atol=1e-12 * scale)
        np.testing.assert_allclose(PQ, 0.0, atol=1e-9 * scale)

    def test_p_is_constant_on_blocks(self):
        sigma = partition_from_sizes([1, 2, 4])
        P, Q = averaging_projection(sigma, [3, 1, 5, 4, 0, 0, 0])
        np.testing.assert_allclose(P, [3, 3, 3, 1, 1, 1, 1])
        np.testing.assert_allclose(Q, [0, -2, 2, 3, -1, -1, -1])

    def test_p_is_sum_of_rank_one_maps(self, default_space):
        f = np.random.default_rng(5).standard_normal((32, 15))
        P, _ = averaging_projection(default_space.sigma, f)
        np.testing.assert_allclose(v_dual_coeffs(default_space, f) @ v_vectors(default_space), P, atol=1e-12)

    def test_v_vectors_are_normalized(self, default_space):
        norms = default_space.S.norm(v_vectors(default_space))
        np.testing.assert_allclose(norms, 1.0, rtol=1e-12)


class TestDkkNorm:
    def test_first_unit_vector(self, default_space):
        assert dkk_norm(default_space, [1.0]) == pytest.approx(1.0)

    def test_second_unit_vector(self, default_space):
        """||Q e_2||_2 = 1/sqrt(2) and H e_2 = d_2 / sqrt(2) with ||d_2||_(1/2) = 4"""
        e2 = np.zeros(15)
        e2[1] = 1.0
        assert dkk_norm(default_space, e2) == pytest.approx(5 / math.sqrt(2), rel=1e-12)

    def test_h_map(self, default_space):
        e2 = np.zeros(15)
        e2[1] = 1.0
        np.testing.assert_allclose(h_coefficients(default_space, e2), [0, 1 / math.sqrt(2), 0, 0])
        np.testing.assert_allclose(h_map(default_space, e2), [-1 / math.sqrt(2), 1 / math.sqrt(2), 0, 0])

    def test_block_constant_vectors_only_see_h(self, default_space):
        f = np.repeat([1.0, -2.0, 0.5, 3.0], [1, 2, 4, 8])
        expected = default_space.X.basis_norm(h_coefficients(default_space, f))
        assert dkk_norm(default_space, f) == pytest.approx(expected, rel=1e-12)

    def test_dkk_basis_norm(self, default_space):
        basis = default_space.as_basis()
        f = np.linspace(-1, 1, 15)
        assert basis.basis_norm(f) == pytest.approx(dkk_norm(default_space, f))
        again = TypeAdapter(AnyBasis).validate_json(basis.model_dump_json())
        assert again.basis_norm(f) == pytest.approx(basis.basis_norm(f))

    @settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(vectors15, st.floats(min_value=-1e3, max_value=1e3, allow_nan=False))
    def test_homogeneity(self, default_space, f, t):
        expected = abs(t) * dkk_norm(default_space, f)
        assert dkk_norm(default_space, t * np.asarray(f)) == pytest.approx(expected, rel=1e-9, abs=1e-9)

    @settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(vectors15, vectors15)
    def test_quasi_triangle(self, default_space, f, g):
        """l_2 part is a norm and the l_1/2 part has modulus 2^(1/p - 1) = 2"""
        total = dkk_norm(default_space, np.asarray(f) + np.asarray(g))
        bound = 2 * (dkk_norm(default_space, f) + dkk_norm(default_space, g))
        assert total <= bound * (1 + 1e-9) + 1e-9


class TestConstruction:
    def test_table(self, default_space):
        table = dump_table(default_space)
        assert table["N_n"].tolist() == [1, 2, 4, 8]
        assert table["M_n"].tolist() == [1, 3, 7, 15]
        np.testing.assert_allclose(table["Lambda_N"], np.sqrt([1, 2, 4, 8]))
        np.testing.assert_allclose(table["Lambda_star_N"], np.sqrt([1, 2, 4, 8]))

    def test_s_must_be_locally_convex(self):
        with pytest.raises(SpecValidationError):
            build_dkk_space(LpSpace(p=0.5, dim=7), DifferenceBasis(p=0.5, dim=3), partition_from_sizes([1, 2, 4]))

    def test_s_must_be_symmetric(self):
        with pytest.raises(SpecValidationError):
            build_dkk_space(MixedZSpace(p=1, q=2, inner=2, dim=7), DifferenceBasis(p=0.5, dim=3), partition_from_sizes([1, 2, 4]))

    def test_dimensions_must_agree(self):
        with pytest.raises(SpecValidationError):
            build_dkk_space(LpSpace(p=2, dim=6), DifferenceBasis(p=0.5, dim=3), partition_from_sizes([1, 2, 4]))

    def test_x_must_cover_blocks(self):
        with pytest.raises(SpecValidationError):
            build_dkk_space(LpSpace(p=2, dim=7), DifferenceBasis(p=0.5, dim=2), partition_from_sizes([1, 2, 4]))
