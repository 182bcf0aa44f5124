from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from urnwalk import exact, oracle
from urnwalk.errors import (
    DomainError,
    IdenticalConfigurationsError,
)
from urnwalk.model import ModelParams

from _reference import pascal_binomial


class TestBinomial:
    def test_small_values(self):
        assert exact.binomial(2, 1) == 2
        assert exact.binomial(3, 2) == 3
        assert exact.binomial(0, 0) == 1

    def test_large_value_against_pascal(self):
        assert exact.binomial(30, 15) == pascal_binomial(30, 15) == 155117520

    @given(st.integers(0, 40), st.integers(0, 40))
    def test_matches_pascal(self, n, m):
        if m > n:
            with pytest.raises(DomainError):
                exact.binomial(n, m)
        else:
            assert exact.binomial(n, m) == pascal_binomial(n, m)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            exact.binomial(-1, 0)
        with pytest.raises(DomainError):
            exact.binomial(3, -2)


class TestFullTransferTime:
    def test_five_urns_three_balls(self):
        assert exact.full_transfer_time(ModelParams(5, 3)) == 142

    def test_four_urns_four_balls(self):
        assert exact.full_transfer_time(ModelParams(4, 4)) == 292

    @pytest.mark.parametrize("urns", range(2, 9))
    def test_single_ball_is_geometric(self, urns):
        assert exact.full_transfer_time(ModelParams(urns, 1)) == urns - 1

    @pytest.mark.parametrize("balls", range(1, 11))
    def test_three_urn_series(self, balls):
        # known three-urn value: (2M/3) * sum(3**k / k)
        expected = Fraction(2 * balls, 3) * sum(
            Fraction(3**k, k) for k in range(1, balls + 1)
        )
        assert exact.full_transfer_time(ModelParams(3, balls)) == expected


class TestPassageIncrements:
    def test_five_urns_three_balls_terms(self):
        params = ModelParams(5, 3)
        assert [exact.passage_increment(params, k) for k in range(3)] == [4, 14, 124]

    def test_four_urns_four_balls_terms(self):
        params = ModelParams(4, 4)
        assert [exact.passage_increment(params, k) for k in range(4)] == [3, 7, 27, 255]

    @pytest.mark.parametrize("urns,balls", [(2, 3), (3, 1), (5, 4), (8, 2)])
    def test_first_increment_is_geometric(self, urns, balls):
        assert exact.passage_increment(ModelParams(urns, balls), 0) == urns - 1

    def test_recursion_examples(self):
        assert exact.passage_increments(ModelParams(5, 3)) == [4, 14, 124]
        assert exact.passage_increments(ModelParams(2, 2)) == [1, 3]
        assert exact.passage_increments(ModelParams(3, 1)) == [2]

    def test_recursion_matches_closed_form(self):
        for urns in range(2, 9):
            for balls in range(1, 13):
                params = ModelParams(urns, balls)
                assert exact.passage_increments(params) == [
                    exact.passage_increment(params, k) for k in range(balls)
                ]

    def test_index_out_of_range(self):
        params = ModelParams(3, 2)
        with pytest.raises(DomainError):
            exact.passage_increment(params, 2)
        with pytest.raises(DomainError):
            exact.passage_increment(params, -1)

    def test_strictly_increasing_on_grid(self):
        for urns in range(2, 9):
            for balls in range(2, 13):
                increments = exact.passage_increments(ModelParams(urns, balls))
                assert all(a < b for a, b in zip(increments, increments[1:]))


class TestGeneralHittingTime:
    def test_full_distance_is_transfer_time(self):
        query = exact.HittingQuery(params=ModelParams(5, 3), hamming_distance=3)
        assert exact.general_hitting_time(query) == 142

    def test_distance_one(self):
        query = exact.HittingQuery(params=ModelParams(5, 3), hamming_distance=1)
        assert exact.general_hitting_time(query) == 124

    def test_distance_two(self):
        query = exact.HittingQuery(params=ModelParams(4, 4), hamming_distance=2)
        assert exact.general_hitting_time(query) == 282

    def test_zero_distance_rejected(self):
        with pytest.raises(IdenticalConfigurationsError):
            exact.HittingQuery(params=ModelParams(5, 3), hamming_distance=0)
        with pytest.raises(IdenticalConfigurationsError):
            exact.HittingQuery.from_configurations(
                ModelParams(5, 3), (1, 2, 3), (1, 2, 3)
            )

    def test_distance_beyond_balls_rejected(self):
        with pytest.raises(DomainError):
            exact.HittingQuery(params=ModelParams(5, 3), hamming_distance=4)

    def test_from_configurations(self):
        query = exact.HittingQuery.from_configurations(
            ModelParams(5, 3), (1, 1, 1), (1, 1, 2)
        )
        assert query.hamming_distance == 1

    def test_collapse_to_transfer_time_on_grid(self):
        for urns in range(2, 9):
            for balls in range(1, 13):
                params = ModelParams(urns, balls)
                query = exact.HittingQuery(params=params, hamming_distance=balls)
                assert exact.general_hitting_time(query) == exact.full_transfer_time(
                    params
                )


class TestBallInduction:
    def test_examples(self):
        assert exact.full_transfer_time_by_ball_induction(ModelParams(5, 3)) == 142
        assert exact.full_transfer_time_by_ball_induction(ModelParams(2, 1)) == 1

    def test_three_urns_two_balls_by_hand(self):
        # s(1) = 2, s(2) = 2*2 + 2*3 = 10
        assert exact.full_transfer_time_by_ball_induction(ModelParams(3, 2)) == 10
        assert exact.full_transfer_time(ModelParams(3, 2)) == 10

    def test_matches_closed_form_on_grid(self):
        for urns in range(2, 9):
            for balls in range(1, 13):
                params = ModelParams(urns, balls)
                assert exact.full_transfer_time_by_ball_induction(
                    params
                ) == exact.full_transfer_time(params)

    def test_large_ball_count_exact(self):
        params = ModelParams(3, 64)
        closed = exact.full_transfer_time(params)
        assert exact.full_transfer_time_by_ball_induction(params) == closed
        assert sum(exact.passage_increments(params), Fraction(0)) == closed


class TestSumIdentity:
    def test_five_urns_three_balls(self):
        report = exact.sum_identity_report(ModelParams(5, 3))
        assert report.matches and report.left_total == 142
        assert report.left_terms == (4, 14, 124)
        assert report.right_terms == (12, 30, 100)
        assert not report.termwise_matches

    def test_four_urns_four_balls(self):
        report = exact.sum_identity_report(ModelParams(4, 4))
        assert report.matches and report.left_total == 292

    def test_two_urns_five_balls(self):
        assert exact.sum_identity_report(ModelParams(2, 5)).matches

    def test_holds_across_grid(self):
        for urns in range(2, 9):
            for balls in range(1, 13):
                assert exact.sum_identity_report(ModelParams(urns, balls)).matches


class TestFirstVisitProbability:
    def test_single_ball_zero(self):
        assert exact.first_visit_probability(ModelParams(7, 1)) == 0

    def test_small_values(self):
        assert exact.first_visit_probability(ModelParams(2, 2)) == Fraction(1, 3)
        assert exact.first_visit_probability(ModelParams(3, 2)) == Fraction(1, 4)


class TestFiberEscapeRatio:
    def test_ratio_is_urns_minus_one(self):
        assert exact.fiber_escape_ratio(ModelParams(3, 2)).ratio == 2
        assert exact.fiber_escape_ratio(ModelParams(4, 3)).ratio == 3

    def test_two_urns_components(self):
        escape = exact.fiber_escape_ratio(ModelParams(2, 4))
        assert escape.ratio == 1
        assert escape.first_miss == Fraction(8, 15)
        assert escape.repeat_miss == Fraction(7, 15)

    def test_needs_two_balls(self):
        with pytest.raises(DomainError):
            exact.fiber_escape_ratio(ModelParams(4, 1))


class TestClassicalTwoUrnReduction:
    @pytest.mark.parametrize("balls", range(1, 9))
    def test_matches_dense_solve(self, balls):
        params = ModelParams(2, balls)
        assert exact.full_transfer_time(params) == oracle.expected_hitting_time(
            params, (1,) * balls, (2,) * balls
        )
