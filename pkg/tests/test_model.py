import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from urnwalk.errors import ConfigurationError, DomainError, ValidationError
from urnwalk.model import (
    ModelParams,
    TransitionMatrix,
    build_automorphism,
    config_at,
    format_configuration,
    hamming_distance,
    index_of,
    lump_class_of,
    lumped_kernel,
    neighbors,
    parse_configuration,
    transition_probability,
)


@st.composite
def params_and_config(draw):
    urns = draw(st.integers(2, 5))
    balls = draw(st.integers(1, 4))
    params = ModelParams(urns=urns, balls=balls)
    config = tuple(
        draw(st.lists(st.integers(1, urns), min_size=balls, max_size=balls))
    )
    return params, config


@st.composite
def params_and_two_configs(draw):
    urns = draw(st.integers(2, 5))
    balls = draw(st.integers(1, 4))
    params = ModelParams(urns=urns, balls=balls)
    entries = st.lists(st.integers(1, urns), min_size=balls, max_size=balls)
    return params, tuple(draw(entries)), tuple(draw(entries))


class TestModelParams:
    def test_rejects_single_urn(self):
        with pytest.raises(ValidationError):
            ModelParams(urns=1, balls=3)

    def test_rejects_zero_balls(self):
        with pytest.raises(ValidationError):
            ModelParams(urns=3, balls=0)

    def test_counts(self):
        params = ModelParams(urns=5, balls=3)
        assert params.state_count == 125
        assert params.degree == 12


class TestConfigurationIO:
    def test_parse_round_trip(self):
        params = ModelParams(urns=4, balls=3)
        config = parse_configuration(" 1, 3 ,2", params)
        assert config == (1, 3, 2)
        assert format_configuration(config) == "1,3,2"

    def test_parse_rejects_garbage(self):
        params = ModelParams(urns=4, balls=3)
        with pytest.raises(ConfigurationError):
            parse_configuration("1,x,2", params)

    def test_parse_rejects_wrong_length(self):
        params = ModelParams(urns=4, balls=3)
        with pytest.raises(ConfigurationError):
            parse_configuration("1,2", params)

    def test_parse_rejects_out_of_range(self):
        params = ModelParams(urns=4, balls=2)
        with pytest.raises(ConfigurationError):
            parse_configuration("1,5", params)

    @given(params_and_config())
    def test_index_round_trip(self, pc):
        params, config = pc
        assert config_at(index_of(config, params), params) == config

    def test_index_is_bijective_small(self):
        params = ModelParams(urns=3, balls=3)
        indices = {
            index_of(config, params)
            for config in itertools.product((1, 2, 3), repeat=3)
        }
        assert indices == set(range(27))


class TestNeighbors:
    def test_two_urns_one_ball(self):
        params = ModelParams(urns=2, balls=1)
        assert neighbors((1,), params) == [(2,)]

    def test_three_urns_two_balls(self):
        params = ModelParams(urns=3, balls=2)
        assert set(neighbors((1, 1), params)) == {(2, 1), (3, 1), (1, 2), (1, 3)}

    def test_degree_exhaustive(self):
        # cross-check against a per-coordinate enumeration done from scratch
        params = ModelParams(urns=5, balls=3)
        for config in itertools.product(range(1, 6), repeat=3):
            found = neighbors(config, params)
            expected = {
                config[:i] + (urn,) + config[i + 1 :]
                for i in range(3)
                for urn in range(1, 6)
                if urn != config[i]
            }
            assert len(found) == 12
            assert len(set(found)) == 12
            assert set(found) == expected
            assert config not in found

    @given(params_and_config())
    def test_each_neighbor_one_move_away(self, pc):
        params, config = pc
        for other in neighbors(config, params):
            assert hamming_distance(config, other) == 1


class TestTransitionProbability:
    def test_one_move(self):
        params = ModelParams(urns=3, balls=2)
        assert transition_probability((1, 1), (2, 1), params) == Fraction(1, 4)

    def test_self_loop_zero(self):
        params = ModelParams(urns=3, balls=2)
        assert transition_probability((1, 2), (1, 2), params) == 0

    def test_two_moves_zero(self):
        params = ModelParams(urns=5, balls=3)
        assert transition_probability((1, 1, 1), (2, 2, 1), params) == 0

    def test_length_mismatch(self):
        params = ModelParams(urns=3, balls=2)
        with pytest.raises(ConfigurationError):
            transition_probability((1, 1), (1, 1, 1), params)

    @given(params_and_config())
    def test_rows_sum_to_one(self, pc):
        params, config = pc
        total = sum(
            (transition_probability(config, other, params)
             for other in neighbors(config, params)),
            Fraction(0),
        )
        assert total == 1

    @given(params_and_two_configs())
    def test_symmetric(self, pcc):
        params, a, b = pcc
        assert transition_probability(a, b, params) == transition_probability(
            b, a, params
        )


class TestAutomorphism:
    def test_identity_when_target_is_source(self):
        params = ModelParams(urns=3, balls=2)
        phi = build_automorphism((1, 1), params)
        for config in itertools.product((1, 2, 3), repeat=2):
            assert phi(config) == config

    def test_swap_example(self):
        params = ModelParams(urns=3, balls=2)
        phi = build_automorphism((3, 3), params)
        assert phi((1, 3)) == (3, 1)
        assert phi((2, 2)) == (2, 2)
        assert phi((1, 1)) == (3, 3)

    def test_rejects_target_touching_urn_two(self):
        params = ModelParams(urns=3, balls=2)
        with pytest.raises(DomainError):
            build_automorphism((1, 2), params)

    def test_self_inverse_exhaustive(self):
        params = ModelParams(urns=5, balls=3)
        phi = build_automorphism((3, 4, 5), params)
        permutation = phi.index_map()
        assert sorted(permutation) == list(range(125))
        for g, image in enumerate(permutation):
            assert permutation[image] == g
        assert phi((2, 2, 2)) == (2, 2, 2)
        assert phi((1, 1, 1)) == (3, 4, 5)

    def test_preserves_adjacency_exhaustive(self):
        params = ModelParams(urns=5, balls=3)
        phi = build_automorphism((3, 4, 5), params)
        for config in itertools.product(range(1, 6), repeat=3):
            mapped = {phi(other) for other in neighbors(config, params)}
            assert mapped == set(neighbors(phi(config), params))


class TestLumpClasses:
    def test_all_source(self):
        params = ModelParams(urns=3, balls=4)
        cls = lump_class_of((1, 1, 1, 1), params)
        assert cls.index == 1 and cls.level == 1 and not cls.last_is_two

    def test_all_target(self):
        params = ModelParams(urns=3, balls=4)
        cls = lump_class_of((2, 2, 2, 2), params)
        assert cls.index == 8 and cls.level == 4 and cls.last_is_two

    def test_mixed(self):
        params = ModelParams(urns=4, balls=3)
        cls = lump_class_of((2, 1, 2), params)
        assert cls.index == 4

    def test_classes_partition_state_space(self):
        params = ModelParams(urns=3, balls=3)
        by_class = {}
        for config in itertools.product((1, 2, 3), repeat=3):
            by_class.setdefault(lump_class_of(config, params).index, []).append(config)
        assert set(by_class) == set(range(1, 7))
        assert sum(len(v) for v in by_class.values()) == 27


class TestLumpedKernel:
    def test_row_sums_enforced(self):
        kernel = lumped_kernel(ModelParams(urns=4, balls=4))
        for row in kernel.rows:
            assert sum(row, Fraction(0)) == 1

    @pytest.mark.parametrize("urns,balls", [(3, 2), (4, 4), (2, 5), (6, 3)])
    def test_bottom_rate(self, urns, balls):
        kernel = lumped_kernel(ModelParams(urns=urns, balls=balls))
        size = 2 * balls
        assert kernel[size - 1][size - 3] == Fraction(balls - 1, balls)

    def test_matches_aggregated_full_kernel(self):
        params = ModelParams(urns=3, balls=2)
        kernel = lumped_kernel(params)
        for config in itertools.product((1, 2, 3), repeat=2):
            own = lump_class_of(config, params).index
            sums = [Fraction(0)] * 4
            for dest in neighbors(config, params):
                sums[lump_class_of(dest, params).index - 1] += (
                    transition_probability(config, dest, params)
                )
            assert tuple(sums) == kernel[own - 1]


class TestTransitionMatrix:
    def test_rejects_bad_row_sum(self):
        with pytest.raises(ValidationError):
            TransitionMatrix.from_rows([[Fraction(1, 2), Fraction(1, 3)]] * 2)

    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            TransitionMatrix.from_rows([[Fraction(1), Fraction(0)]])
