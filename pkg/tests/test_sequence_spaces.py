"""
Tests for the sequence-space quasi-norms, the fundamental function and the
Lorentz inclusion constant
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from core.exceptions import SpecValidationError
from core.spaces.sequence_spaces import (
    DirectSumDSpace,
    LorentzSpace,
    LpSpace,
    MixedBSpace,
    MixedZSpace,
    WeakLorentzSpace,
    fundamental_function,
    lambda_pair,
    lorentz_inclusion_constant,
    norm,
    parse_space,
)

coefficients = st.lists(
    st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False, allow_subnormal=False),
    min_size=1,
    max_size=8,
)


class TestLpSpace:
    """l_p quasi-norms"""

    def test_half_norm_of_two_ones(self):
        assert norm(LpSpace(p=0.5, dim=2), [1, 1]) == 4.0

    def test_euclidean(self):
        assert LpSpace(p=2, dim=2).norm([3, 4]) == pytest.approx(5.0, rel=1e-15)

    def test_c0_from_string(self):
        space = LpSpace(p="inf", dim=3)
        assert math.isinf(space.p)
        assert space.norm([1, -5, 2]) == 5.0

    def test_short_vectors_are_padded(self):
        assert LpSpace(p=1, dim=5).norm([1, -2]) == 3.0

    def test_long_vector_rejected(self):
        with pytest.raises(SpecValidationError):
            LpSpace(p=1, dim=2).norm([1, 2, 3])

    def test_non_finite_rejected(self):
        with pytest.raises(SpecValidationError):
            LpSpace(p=1, dim=2).norm([1, np.nan])

    @pytest.mark.parametrize("p", [0, -1, "abc"])
    def test_bad_exponent(self, p):
        with pytest.raises(ValidationError):
            LpSpace(p=p, dim=2)

    def test_batch_evaluation(self):
        values = LpSpace(p=1, dim=3).norm(np.eye(3) * 2)
        assert values.shape == (3,)
        assert np.all(values == 2.0)

    def test_tiny_exponent_does_not_underflow(self):
        value = LpSpace(p=0.01, dim=2).norm([1e-3, 1e-3])
        assert value == pytest.approx(1e-3 * 2**100, rel=1e-9)

    def test_convexity_flags(self):
        assert LpSpace(p=0.5, dim=2).p_convexity == 0.5
        assert not LpSpace(p=0.5, dim=2).locally_convex
        assert LpSpace(p=3, dim=2).p_convexity == 1.0

    def test_json_keeps_infinity(self):
        space = parse_space('{"kind": "lp", "p": "inf", "dim": 3}')
        assert isinstance(space, LpSpace)
        assert '"inf"' in space.model_dump_json()

    @settings(max_examples=60, deadline=None)
    @given(coefficients, st.randoms(use_true_random=False), st.sampled_from([0.25, 0.5, 1.0, 2.0, math.inf]))
    def test_sign_and_permutation_invariance(self, f, rnd, p):
        space = LpSpace(p=p, dim=len(f))
        g = [x * rnd.choice([-1, 1]) for x in f]
        rnd.shuffle(g)
        assert space.norm(g) == pytest.approx(space.norm(f), rel=1e-12, abs=1e-300)

    @settings(max_examples=60, deadline=None)
    @given(coefficients, coefficients, st.sampled_from([0.25, 0.5, 1.0]))
    def test_p_triangle_inequality(self, f, g, p):
        dim = max(len(f), len(g))
        space = LpSpace(p=p, dim=dim)
        f = np.pad(f, (0, dim - len(f)))
        g = np.pad(g, (0, dim - len(g)))
        lhs = space.norm(f + g) ** p
        rhs = space.norm(f) ** p + space.norm(g) ** p
        assert lhs <= rhs * (1 + 1e-9) + 1e-12


class TestLorentzSpaces:
    """Lorentz and weak Lorentz quasi-norms"""

    def test_lorentz_q1_is_weighted_rearrangement(self):
        space = LorentzSpace(q=1, w=[1.0, 0.5], dim=2)
        assert space.norm([1, 2]) == pytest.approx(2.5, rel=1e-12)

    def test_weak_lorentz(self):
        space = WeakLorentzSpace(w=[1, 1, 1], dim=3)
        assert space.norm([1, -1, 1]) == 3.0

    def test_lorentz_infinity_matches_weak(self):
        w = [1.0 / math.sqrt(n) for n in range(1, 7)]
        f = [0.3, -2.0, 1.1, 0.0, 4.0, 0.5]
        assert LorentzSpace(q="inf", w=w, dim=6).norm(f) == pytest.approx(WeakLorentzSpace(w=w, dim=6).norm(f))

    def test_weight_needs_positive_head(self):
        with pytest.raises(ValidationError):
            LorentzSpace(q=1, w=[0.0, 1.0], dim=2)

    def test_weight_must_cover_dimension(self):
        with pytest.raises(ValidationError):
            LorentzSpace(q=1, w=[1.0], dim=2)

    def test_locally_convex_needs_nonincreasing_weight(self):
        assert LorentzSpace(q=2, w=[1.0, 0.5], dim=2).locally_convex
        assert not LorentzSpace(q=2, w=[0.5, 1.0], dim=2).locally_convex

    def test_inclusion_constant_at_most_one(self):
        w = [1.0 / math.sqrt(n) for n in range(1, 17)]
        assert lorentz_inclusion_constant(w, 1.0, 2.0, 16, trials=500, seed=3) <= 1.0 + 1e-12

    def test_inclusion_needs_ordered_exponents(self):
        with pytest.raises(SpecValidationError):
            lorentz_inclusion_constant([1.0, 1.0], 2.0, 1.0, 2)

    @settings(max_examples=60, deadline=None)
    @given(coefficients, st.randoms(use_true_random=False), st.sampled_from([0.5, 1.0, 2.0, math.inf]))
    def test_sign_and_permutation_invariance(self, f, rnd, q):
        w = [1.0 / math.sqrt(n) for n in range(1, len(f) + 1)]
        g = [x * rnd.choice([-1, 1]) for x in f]
        rnd.shuffle(g)
        for space in (LorentzSpace(q=q, w=w, dim=len(f)), WeakLorentzSpace(w=w, dim=len(f))):
            assert space.norm(g) == pytest.approx(space.norm(f), rel=1e-12, abs=1e-300)

    @settings(max_examples=40, deadline=None)
    @given(coefficients, st.sampled_from([0.5, 1.0, 2.0, math.inf]))
    def test_norm_only_sees_primitive_up_to_dim(self, f, q):
        """Weights agreeing on [1, dim] have the same primitive there"""
        dim = len(f)
        head = [1.0 / n for n in range(1, dim + 1)]
        first = LorentzSpace(q=q, w=head + [0.0, 0.0], dim=dim)
        second = LorentzSpace(q=q, w=head + [5.0, 7.0], dim=dim)
        assert first.norm(f) == second.norm(f)
        assert WeakLorentzSpace(w=head + [0.0], dim=dim).norm(f) == WeakLorentzSpace(w=head + [3.0], dim=dim).norm(f)


class TestMixedSpaces:
    """Z, B and D mixed quasi-norms"""

    def test_matrix_space(self):
        space = MixedZSpace(p=1, q="inf", inner=2, dim=4)
        assert space.norm([1, 1, 3, 0]) == 3.0

    def test_matrix_space_pads_last_row(self):
        assert MixedZSpace(p=1, q=1, inner=2, dim=3).block_sizes == [2, 1]

    def test_mixed_norm_default_sizes(self):
        space = MixedBSpace(p="inf", q=1, dim=6)
        assert space.block_sizes == [2, 4]
        assert space.norm([1, 2, 0, 0, 5, 1]) == 7.0

    def test_mixed_norm_sizes_must_grow(self):
        with pytest.raises(ValidationError):
            MixedBSpace(p=1, q=1, dim=3, sizes=(2, 1))

    def test_direct_sum(self):
        assert DirectSumDSpace(p=1, q="inf", dim=4).norm([1, -1, 3, -4]) == 6.0

    def test_direct_sum_split_in_range(self):
        with pytest.raises(ValidationError):
            DirectSumDSpace(p=1, q=1, dim=2, split=3)

    def test_mixed_spaces_are_not_symmetric(self):
        with pytest.raises(SpecValidationError):
            lambda_pair(MixedZSpace(p=1, q=2, inner=2, dim=4), 2)


class TestFundamentalFunction:
    """Lambda_m and its dual"""

    def test_lambda_pair_l2(self):
        value, dual = lambda_pair(LpSpace(p=2, dim=9), 4, seed=1)
        assert value == pytest.approx(2.0)
        assert dual == pytest.approx(2.0)

    def test_lambda_pair_range(self):
        with pytest.raises(SpecValidationError):
            lambda_pair(LpSpace(p=2, dim=3), 4)

    def test_l1_fundamental_function(self):
        np.testing.assert_allclose(fundamental_function(LpSpace(p=1, dim=5)), [1, 2, 3, 4, 5])

    def test_lorentz_fundamental_function_is_primitive(self):
        w = [1.0 / math.sqrt(n) for n in range(1, 9)]
        values = fundamental_function(LorentzSpace(q=1, w=w, dim=8))
        np.testing.assert_allclose(values, np.cumsum(w), rtol=1e-12)
