import math

import numpy as np
import pytest

from fourier_mixing.config import Limits
from fourier_mixing.errors import SpaceMismatchError
from fourier_mixing.fourier import (
    NotClassInvariantError,
    lazy_transposition,
    point_mass,
    random_distribution,
    uniform_class,
)
from fourier_mixing.group_core import CycleType, Permutation, identity
from fourier_mixing.symrep import InvalidPartitionError, Partition, dim_irrep
from fourier_mixing.walks.bounds import (
    BoundReport,
    InvalidThresholdError,
    attach_exhaustive_check,
    average_tv_sandwich,
    bad_state_fraction_bound,
    class_function_bound,
    curve_crossovers,
    cycle_bound_curve,
    l2_profile_is_constant,
    minimal_steps,
    tabloid_cycle_bound,
)
from fourier_mixing.walks.exact import (
    StateDistribution,
    UnknownRouteError,
    exact_walk_distribution,
    exhaustive_average_tv_sq,
    per_state_tv,
    simulate_walk,
    tv_distance,
)
from fourier_mixing.walks.spaces import (
    GroupSpace,
    InvalidSpaceError,
    TabloidSpace,
    TourSpace,
    action_matrix,
    make_space,
    space_from_json,
)

# Walk matrices of the two example distributions on the three tabloids of
# shape (2, 1), in eighths
M1 = np.array([[3, 2, 3], [3, 3, 2], [2, 3, 3]]) / 8
M2 = np.array([[2, 2, 4], [3, 3, 2], [3, 3, 2]]) / 8

# Tabloid shapes of S_3 and S_4 that random walks are checked on
RANDOM_WALK_SHAPES = [
    Partition((2, 1)),
    Partition((1, 1, 1)),
    Partition((3, 1)),
    Partition((2, 2)),
    Partition((1, 1, 1, 1)),
]


def cycle_class(k: int, n: int):
    return uniform_class(CycleType.from_lengths([k], n))


class TestSpaces:
    def test_tabloid_points(self, three_points):
        assert three_points.size == 3
        assert [three_points.point(x) for x in range(3)] == [
            (1, 0, 0),
            (0, 1, 0),
            (0, 0, 1),
        ]

    @pytest.mark.parametrize(
        "space",
        [TabloidSpace(Partition((2, 2))), TourSpace(5), GroupSpace(4)],
    )
    def test_index_round_trip(self, space):
        for x in range(space.size):
            assert space.index(space.point(x)) == x

    @pytest.mark.parametrize(
        "space, size",
        [
            (TabloidSpace(Partition((3, 2))), 10),
            (TourSpace(5), 24),
            (GroupSpace(4), 24),
        ],
    )
    def test_multiplicities_add_up(self, space, size):
        assert space.size == size
        total = sum(m * dim_irrep(lam) for lam, m in space.multiplicities().items())
        assert total == size

    def test_tour_action_starts_at_zero(self):
        tours = TourSpace(4)
        g = Permutation.parse("(0 1 2 3)", 4)
        assert tours.act_on_point(g, (0, 1, 2, 3)) == (0, 1, 2, 3)
        assert tours.act_on_point(Permutation.parse("(0 2)", 4), (0, 1, 2, 3)) == (
            0,
            3,
            2,
            1,
        )

    def test_base_cycle_fixes_first_tour(self):
        tours = TourSpace(6)
        start = tours.point(0)
        assert tours.act_on_point(tours.base_cycle(), start) == start

    def test_vectorized_action_matches(self):
        tours = TourSpace(5)
        g = Permutation.parse("(0 3)(1 4 2)", 5)
        points = tours.points_array()
        moved = tours.act_on_points(g, points)
        for x in range(tours.size):
            assert tuple(moved[x]) == tours.act_on_point(g, tours.point(x))

    @pytest.mark.parametrize(
        "space", [TabloidSpace(Partition((2, 1, 1))), TourSpace(4), GroupSpace(3)]
    )
    def test_transitive(self, space):
        assert space.is_transitive()

    def test_make_space(self):
        assert make_space("tabloids", shape="2+1") == TabloidSpace(Partition((2, 1)))
        assert make_space("tours", 5) == TourSpace(5)
        with pytest.raises(InvalidSpaceError):
            make_space("tabloids")
        with pytest.raises(InvalidSpaceError):
            make_space("cosets", 3)
        with pytest.raises(InvalidSpaceError):
            space_from_json({"kind": "cosets"})
        with pytest.raises(InvalidSpaceError):
            TourSpace(0)

    def test_describe_round_trip(self):
        for space in (TabloidSpace(Partition((2, 1))), TourSpace(4), GroupSpace(3)):
            assert space_from_json(space.describe()) == space


class TestExactWalks:
    def test_action_matrices(self, q1, q2, three_points):
        assert np.allclose(action_matrix(q1, three_points).toarray(), M1)
        assert np.allclose(action_matrix(q2, three_points).toarray(), M2)

    def test_action_matrix_is_column_stochastic(self):
        space = TourSpace(5)
        matrix = action_matrix(lazy_transposition(5, 0.5), space).toarray()
        assert np.allclose(matrix.sum(axis=0), 1.0)

    @pytest.mark.parametrize("steps", [0, 1, 3])
    def test_matrix_and_convolution_routes_agree(self, q1, three_points, steps):
        by_matrix = exact_walk_distribution(q1, three_points, 1, steps)
        by_convolution = exact_walk_distribution(
            q1, three_points, 1, steps, route="convolution"
        )
        assert np.allclose(by_matrix.probs, by_convolution.probs)

    def test_routes_agree_on_group(self, q2):
        space = GroupSpace(3)
        by_matrix = exact_walk_distribution(q2, space, 4, 2)
        by_convolution = exact_walk_distribution(q2, space, 4, 2, route="convolution")
        assert np.allclose(by_matrix.probs, by_convolution.probs)

    def test_one_step_from_first_tabloid(self, q1, three_points):
        dist = exact_walk_distribution(q1, three_points, 0, 1)
        assert np.allclose(dist.probs, M1[:, 0])

    def test_unknown_route(self, q1, three_points):
        with pytest.raises(UnknownRouteError):
            exact_walk_distribution(q1, three_points, 0, 1, route="fft")

    def test_tv_distance(self, three_points):
        p = StateDistribution.point_mass(three_points, 0)
        u = StateDistribution.uniform(three_points)
        assert math.isclose(tv_distance(p, u), 2 / 3)

    def test_tv_distance_space_mismatch(self, three_points):
        p = StateDistribution.point_mass(three_points, 0)
        q = StateDistribution.point_mass(GroupSpace(3), 0)
        with pytest.raises(SpaceMismatchError):
            tv_distance(p, q)

    def test_vector_length_mismatch(self, three_points):
        with pytest.raises(SpaceMismatchError):
            StateDistribution(three_points, np.full(6, 1 / 6))


class TestBounds:
    @pytest.mark.parametrize("steps", [1, 2, 4])
    def test_sandwich_contains_exhaustive_average(self, q1, three_points, steps):
        report = average_tv_sandwich(q1, three_points, steps)
        average = exhaustive_average_tv_sq(q1, three_points, steps)
        assert report.lower_avg <= average + 1e-12
        assert average <= report.upper_avg + 1e-12

    @pytest.mark.parametrize("seed", range(20))
    @pytest.mark.parametrize("shape", RANDOM_WALK_SHAPES, ids=str)
    def test_sandwich_on_random_walks(self, seed, shape):
        rng = np.random.default_rng(seed)
        support_size = int(rng.integers(2, math.factorial(shape.n) + 1))
        q = random_distribution(shape.n, rng, support_size=support_size)
        space = TabloidSpace(shape)
        for steps in range(1, 7):
            report = average_tv_sandwich(q, space, steps)
            average = exhaustive_average_tv_sq(q, space, steps)
            assert report.lower_avg - 1e-9 <= average <= report.upper_avg + 1e-9

    def test_attach_exhaustive_check(self):
        q = random_distribution(4, np.random.default_rng(2), support_size=10)
        space = TabloidSpace(Partition((2, 2)))
        report = attach_exhaustive_check(average_tv_sandwich(q, space, 2), q, space)
        assert report.exhaustive is not None
        assert report.exhaustive["inside"]
        assert report.exhaustive["min_tv"] <= report.exhaustive["max_tv"]

    def test_report_json_round_trip(self, q1, three_points):
        report = average_tv_sandwich(q1, three_points, 2)
        restored = BoundReport.from_json(report.to_json())
        assert restored == report

    def test_class_bound_holds_for_every_state(self):
        q = lazy_transposition(4, 0.5)
        space = TabloidSpace(Partition((2, 2)))
        for steps in (1, 3, 6):
            worst = per_state_tv(q, space, steps).max
            assert worst**2 <= class_function_bound(q, space, steps) + 1e-12

    def test_class_bound_rejects_non_invariant(self, q1, three_points):
        with pytest.raises(NotClassInvariantError):
            class_function_bound(q1, three_points, 1)

    @pytest.mark.parametrize("n, a, b, k", [(6, 4, 2, 3), (7, 4, 3, 2), (8, 5, 3, 5)])
    def test_cycle_bound_matches_class_bound(self, n, a, b, k):
        space = TabloidSpace(Partition((a, b)))
        for steps in (1, 5, 12):
            assert math.isclose(
                tabloid_cycle_bound(n, a, b, k, steps),
                class_function_bound(cycle_class(k, n), space, steps),
                rel_tol=1e-9,
            )

    @pytest.mark.parametrize("n, a, b, k", [(6, 2, 4, 2), (6, 4, 2, 1), (6, 3, 2, 2)])
    def test_cycle_bound_bad_arguments(self, n, a, b, k):
        with pytest.raises(InvalidPartitionError):
            tabloid_cycle_bound(n, a, b, k, 1)

    def test_cycle_bound_on_large_deck(self):
        """Tabloids of shape (26, 26) are never enumerated"""
        curve = cycle_bound_curve(52, 26, 26, 2, range(100, 400, 100))
        values = [bound for _, bound in curve]
        assert [steps for steps, _ in curve] == [100, 200, 300]
        assert all(0 < v < math.inf for v in values)
        assert values == sorted(values, reverse=True)

    def test_deck_curves_match_baselines(self, deck_baselines):
        curves = {
            k: cycle_bound_curve(52, 26, 26, k, range(1, 401)) for k in deck_baselines
        }
        for k, curve in curves.items():
            baseline = deck_baselines[k]
            assert [steps for steps, _ in curve] == [steps for steps, _ in baseline]
            for (_, value), (_, expected) in zip(curve, baseline):
                assert math.isclose(value, expected, rel_tol=1e-9)
            values = [value for _, value in curve]
            assert all(a > b for a, b in zip(values, values[1:]))

        # longer cycles mix faster at every N, so no pair of curves crosses
        assert curve_crossovers(curves) == []
        ks = sorted(curves)
        for low, high in zip(ks, ks[1:]):
            pairs = zip(curves[low], curves[high])
            assert all(faster < slower for (_, slower), (_, faster) in pairs)

    def test_curve_crossovers(self):
        curves = {
            2: [(1, 1.0), (2, 0.5), (3, 0.25)],
            3: [(1, 0.8), (2, 0.6), (3, 0.3)],
        }
        crossovers = curve_crossovers(curves)
        assert len(crossovers) == 1
        assert (crossovers[0].lower_k, crossovers[0].higher_k) == (2, 3)
        assert crossovers[0].steps == 2

    def test_bad_state_bound(self, q1, three_points):
        alpha = 0.05
        bound = bad_state_fraction_bound(q1, three_points, 2, alpha)
        assert per_state_tv(q1, three_points, 2).count_at_least(alpha) <= bound

    def test_bad_state_threshold(self, q1, three_points):
        with pytest.raises(InvalidThresholdError):
            bad_state_fraction_bound(q1, three_points, 2, 0.0)

    def test_l2_profile(self, q1, q2, three_points):
        assert l2_profile_is_constant(q1, GroupSpace(3)).constant
        assert l2_profile_is_constant(lazy_transposition(3, 0.5), three_points).constant
        assert l2_profile_is_constant(q1, three_points).constant
        assert l2_profile_is_constant(q2, three_points).constant is False

    def test_l2_profile_undecided(self, q1, three_points):
        check = l2_profile_is_constant(q1, three_points, Limits(dense_states=2))
        assert check.constant is None


class TestMinimalSteps:
    def test_lazy_transposition_on_pairs(self):
        """Bound 3/4 (4/9)^N first drops below 0.1^2 at N = 6"""
        q = lazy_transposition(4, 0.5)
        space = TabloidSpace(Partition((3, 1)))
        steps = minimal_steps(q, space, 0.1)
        assert steps == 6
        assert per_state_tv(q, space, steps).max <= 0.1

    def test_never_mixes(self):
        q = point_mass(identity(4))
        assert minimal_steps(q, GroupSpace(4), 0.1, max_steps=8) is None

    def test_requires_class_invariance_off_the_group(self, q1, three_points):
        with pytest.raises(NotClassInvariantError):
            minimal_steps(q1, three_points, 0.1)

    def test_bad_target(self):
        with pytest.raises(InvalidThresholdError):
            minimal_steps(lazy_transposition(3, 0.5), GroupSpace(3), 0.0)


class TestSimulation:
    def test_deterministic(self, q1, three_points):
        a = simulate_walk(q1, three_points, 0, 5, seed=7, replicas=200)
        b = simulate_walk(q1, three_points, 0, 5, seed=7, replicas=200)
        assert a.counts == b.counts
        assert sum(a.counts.values()) == 200

    def test_close_to_exact(self, q1, three_points):
        sampled = simulate_walk(q1, three_points, 2, 3, seed=1, replicas=20_000)
        exact = exact_walk_distribution(q1, three_points, 2, 3)
        assert sampled.tv_to(exact) < 0.03

    def test_zero_steps_stay_put(self, three_points):
        sampled = simulate_walk(lazy_transposition(3, 0.5), three_points, 1, 0, 3, 50)
        assert sampled.counts == {1: 50}

    def test_point_by_point_path(self):
        space = TourSpace(5)
        limits = Limits(exhaustive_space=10)
        sampled = simulate_walk(cycle_class(3, 5), space, 0, 4, 3, 300, limits)
        assert sum(sampled.counts.values()) == 300
        assert all(0 <= x < space.size for x in sampled.counts)

    def test_point_by_point_path_is_deterministic(self):
        space = TourSpace(5)
        limits = Limits(exhaustive_space=10)
        q = lazy_transposition(5)
        a = simulate_walk(q, space, 0, 6, 11, 200, limits)
        b = simulate_walk(q, space, 0, 6, 11, 200, limits)
        assert a.counts == b.counts
        fast = simulate_walk(q, space, 0, 6, 11, 200)
        assert sum(fast.counts.values()) == 200

    def test_frequencies(self, q1, three_points):
        sampled = simulate_walk(q1, three_points, 0, 2, seed=2, replicas=100)
        assert math.isclose(sum(sampled.frequencies().values()), 1.0)
        assert np.allclose(
            sampled.to_distribution().probs,
            [sampled.counts.get(x, 0) / 100 for x in range(3)],
        )
