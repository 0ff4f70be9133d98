from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from sinkhornlab import (
    DiagonalScaling,
    DimensionError,
    IterationConfig,
    PositiveMatrix,
    RegimeError,
    StartSide,
    Status,
    Termination,
    apply_left,
    apply_right,
    classify_2x2,
    classify_both_orders,
    reconstruct,
    sinkhorn,
    stochastic_one_step_forms,
    termination_length_2x2,
)

from .strategies import exact_matrices_2x2, positive_fractions

F = Fraction


def M(*rows):
    return PositiveMatrix(rows)


FLAT = M((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2)))

one_step_column_forms = st.tuples(
    positive_fractions, positive_fractions, positive_fractions
).map(lambda act: M((act[0], act[1] * act[2]), (act[1], act[0] * act[2])))

rank_one_forms = st.tuples(
    positive_fractions, positive_fractions, positive_fractions
).map(lambda pqt: M((pqt[0], pqt[1]), (pqt[0] * pqt[2], pqt[1] * pqt[2])))


class TestVerdicts:
    def test_one_step_column_example(self):
        v = classify_2x2(M((1, 12), (3, 4)), StartSide.COLUMN_FIRST)
        assert v.variant is Termination.ONE_STEP_COLUMN
        assert v.length == 1
        assert v.limit == M((F(1, 4), F(3, 4)), (F(3, 4), F(1, 4)))
        assert v.params == {"a": 1, "c": 3, "t": 4}

    def test_one_step_row_example(self):
        v = classify_2x2(M((1, 3), (12, 4)), StartSide.ROW_FIRST)
        assert v.variant is Termination.ONE_STEP_ROW
        assert v.limit == M((F(1, 4), F(3, 4)), (F(3, 4), F(1, 4)))
        assert v.params == {"a": 1, "b": 3, "t": 4}

    def test_two_step_example(self):
        v = classify_2x2(M((2, 6), (5, 15)), StartSide.ROW_FIRST)
        assert v.variant is Termination.TWO_STEP_COLUMN_LAST
        assert v.params == {"p": 2, "r": 5, "t": 3}
        assert v.limit == FLAT

    def test_infinite_example(self):
        for side in StartSide:
            v = classify_2x2(M((1, 3), (3, 4)), side)
            assert v.variant is Termination.INFINITE
            assert v.length is None and v.limit is None

    def test_already_doubly_stochastic(self):
        A = M((F(2, 5), F(3, 5)), (F(3, 5), F(2, 5)))
        v = classify_2x2(A)
        assert v.variant is Termination.ALREADY_DOUBLY_STOCHASTIC
        assert v.length == 0 and v.limit == A

    def test_equal_rows_prefer_the_shorter_length(self):
        # equal rows are simultaneously rank one and a one-step form;
        # column-first must classify them as one step, row-first as two
        A = M((2, 3), (2, 3))
        assert classify_2x2(A, StartSide.COLUMN_FIRST).length == 1
        assert classify_2x2(A, StartSide.ROW_FIRST).length == 2

    def test_rejects_non_2x2(self):
        with pytest.raises(DimensionError):
            classify_2x2(M((1, 2, 3), (4, 5, 6), (7, 8, 9)))

    def test_rejects_approximate_entries(self):
        with pytest.raises(RegimeError):
            classify_2x2(M((1.0, 2.0), (3.0, 4.0)))


class TestSoundness:
    @given(exact_matrices_2x2(), st.sampled_from(list(StartSide)))
    @settings(max_examples=200, deadline=None)
    def test_finite_verdicts_match_the_engine_exactly(self, A, side):
        v = classify_2x2(A, side)
        if v.length is None:
            assert termination_length_2x2(A, side, max_steps=64) is None
            return
        res = sinkhorn(A, IterationConfig(start_side=side))
        assert res.status is Status.TERMINATED_FINITE
        assert res.steps_taken == v.length
        assert res.limit == v.limit

    @given(one_step_column_forms)
    @settings(max_examples=150)
    def test_one_step_forms_terminate_in_at_most_one(self, A):
        v = classify_2x2(A, StartSide.COLUMN_FIRST)
        assert v.length is not None and v.length <= 1

    @given(rank_one_forms)
    @settings(max_examples=150)
    def test_rank_one_forms_terminate_in_at_most_two(self, A):
        v = classify_2x2(A, StartSide.COLUMN_FIRST)
        assert v.length is not None and v.length <= 2
        if v.length == 2:
            assert v.variant is Termination.TWO_STEP_ROW_LAST
            assert v.limit == FLAT

    @given(rank_one_forms)
    @settings(max_examples=100)
    def test_two_step_limits_are_flat_under_both_orders(self, A):
        for side in StartSide:
            v = classify_2x2(A, side)
            if v.length == 2:
                assert v.limit == FLAT

    def test_small_exhaustive_agreement(self):
        values = [
            F(p, q) for p in range(1, 4) for q in range(1, 4) if gcd(p, q) == 1
        ]
        for a in values:
            for b in values:
                for c in values:
                    for d in values:
                        A = M((a, b), (c, d))
                        v = classify_2x2(A)
                        assert v.length == termination_length_2x2(A, max_steps=64)


class TestRoundTrip:
    @given(exact_matrices_2x2(), st.sampled_from(list(StartSide)))
    @settings(max_examples=200)
    def test_parameters_reconstruct_the_input(self, A, side):
        v = classify_2x2(A, side)
        rebuilt = reconstruct(v)
        if v.length is None:
            assert rebuilt is None
        else:
            assert rebuilt == A


class TestScaleInvariance:
    @given(
        rank_one_forms,
        positive_fractions,
        positive_fractions,
        positive_fractions,
        positive_fractions,
    )
    @settings(max_examples=100)
    def test_rank_one_limits_survive_diagonal_scaling(self, A, p1, p2, q1, q2):
        scaled = apply_right(apply_left(DiagonalScaling((p1, p2)), A), DiagonalScaling((q1, q2)))
        v1 = classify_2x2(A)
        v2 = classify_2x2(scaled)
        assert v1.length is not None and v2.length is not None
        if v1.length > 0 and v2.length > 0:
            assert v1.limit == v2.limit == FLAT

    @given(one_step_column_forms, positive_fractions)
    @settings(max_examples=100)
    def test_global_scaling_preserves_one_step_limits(self, A, lam):
        scaled = apply_left(DiagonalScaling((lam, lam)), A)
        v1 = classify_2x2(A)
        v2 = classify_2x2(scaled)
        assert v1.limit == v2.limit


class TestBothOrders:
    def test_rank_one_under_both_orders(self):
        comparison = classify_both_orders(M((1, 2), (2, 4)))
        assert comparison.column_first.length <= 2
        assert comparison.row_first.length <= 2
        assert comparison.step_difference <= 1

    def test_one_sided_termination(self):
        comparison = classify_both_orders(M((1, 12), (3, 4)))
        assert comparison.column_first.length == 1
        assert comparison.row_first.length is None
        assert comparison.step_difference is None

    def test_doubly_stochastic_input(self):
        comparison = classify_both_orders(M((F(2, 5), F(3, 5)), (F(3, 5), F(2, 5))))
        assert comparison.column_first.length == 0
        assert comparison.row_first.length == 0
        assert comparison.step_difference == 0


class TestStochasticOneStepForms:
    def test_row_stochastic_shape(self):
        form = stochastic_one_step_forms(M((F(1, 3), F(2, 3)), (F(1, 3), F(2, 3))))
        assert form is not None
        assert form.shape == "row-stochastic"
        assert form.a == F(1, 3)
        assert form.limit == FLAT

    def test_column_stochastic_shape(self):
        form = stochastic_one_step_forms(M((F(1, 4), F(1, 4)), (F(3, 4), F(3, 4))))
        assert form is not None
        assert form.shape == "column-stochastic"
        assert form.a == F(1, 4)

    def test_flat_matrix_is_excluded(self):
        assert stochastic_one_step_forms(FLAT) is None

    def test_generic_matrix_has_no_form(self):
        assert stochastic_one_step_forms(M((1, 3), (3, 4))) is None

    @given(positive_fractions.filter(lambda a: 0 < a < 1 and a != F(1, 2)))
    @settings(max_examples=80)
    def test_detected_forms_flatten_in_one_scaling(self, a):
        A = M((a, 1 - a), (a, 1 - a))
        form = stochastic_one_step_forms(A)
        assert form is not None and form.a == a
        res = sinkhorn(A)
        assert res.steps_taken == 1 and res.limit == FLAT
