import itertools
import math

import numpy as np
import pytest

from fourier_mixing.config import Limits
from fourier_mixing.errors import BudgetExceededError
from fourier_mixing.fourier import (
    InvalidDistributionError,
    NotClassInvariantError,
    lazy_transposition,
    uniform_class,
)
from fourier_mixing.group_core import CycleType
from fourier_mixing.jsr import fourier_jsr
from fourier_mixing.symrep import Partition
from fourier_mixing.walks.bounds import class_function_bound
from fourier_mixing.walks.exact import exact_walk_distribution, tv_columns
from fourier_mixing.walks.spaces import GroupSpace, TabloidSpace, action_matrix
from fourier_mixing.walks.switched import (
    WordLetterError,
    check_word,
    switched_class_bound,
    switched_exact_distribution,
    switched_worst_case_tv,
    symmetric_switching_bound,
    worst_case_roots,
)


@pytest.fixture
def three_cycles():
    return uniform_class(CycleType.from_lengths([3], 4))


@pytest.fixture
def pairs():
    """Tabloids of shape (3, 1)"""
    return TabloidSpace(Partition((3, 1)))


def brute_force_worst(matrices, steps):
    worst = 0.0
    for word in itertools.product(range(len(matrices)), repeat=steps):
        product = np.eye(matrices[0].shape[0])
        for a in word:
            product = matrices[a] @ product
        worst = max(worst, float(tv_columns(product).max()))
    return worst


class TestWords:
    def test_letters_out_of_range(self):
        with pytest.raises(WordLetterError):
            check_word([0, 2], 2)

    def test_letters_are_ints(self):
        assert check_word(["1", 0], 2) == [1, 0]


class TestExactSwitchedWalks:
    def test_first_letter_acts_first(self, q1, q2, three_points):
        result = switched_exact_distribution([q1, q2], [0, 1], three_points, 0)
        m1 = action_matrix(q1, three_points).toarray()
        m2 = action_matrix(q2, three_points).toarray()
        assert np.allclose(result.probs, (m2 @ m1)[:, 0])

    def test_constant_word_is_plain_walk(self, q1, q2, three_points):
        switched = switched_exact_distribution([q1, q2], [1, 1, 1], three_points, 2)
        plain = exact_walk_distribution(q2, three_points, 2, 3)
        assert np.allclose(switched.probs, plain.probs)

    def test_empty_word(self, q1, three_points):
        result = switched_exact_distribution([q1], [], three_points, 1)
        assert result.probs.tolist() == [0.0, 1.0, 0.0]


class TestWorstCase:
    @pytest.mark.parametrize("steps", [1, 2, 3])
    def test_matches_brute_force(self, q1, q2, three_points, steps):
        matrices = [action_matrix(q, three_points).toarray() for q in (q1, q2)]
        result = switched_worst_case_tv([q1, q2], three_points, steps)
        assert math.isclose(result.tv, brute_force_worst(matrices, steps))
        assert len(result.word) == steps

    def test_worst_word_reaches_worst_tv(self, q1, q2, three_points):
        result = switched_worst_case_tv([q1, q2], three_points, 2)
        dist = switched_exact_distribution(
            [q1, q2], result.word, three_points, result.state
        )
        assert math.isclose(0.5 * np.abs(dist.probs - 1 / 3).sum(), result.tv)

    def test_budget(self, q1, q2, three_points):
        with pytest.raises(BudgetExceededError):
            switched_worst_case_tv(
                [q1, q2], three_points, 4, Limits(switched_budget=10)
            )

    def test_roots(self, q1, q2, three_points):
        roots = worst_case_roots([q1, q2], three_points, 3)
        assert len(roots) == 3
        worst = switched_worst_case_tv([q1, q2], three_points, 3)
        assert math.isclose(roots[2], worst.tv ** (1 / 3))

    def test_roots_on_tabloids_stay_below_certified_bound(self, q1, q2, three_points):
        roots = worst_case_roots([q1, q2], three_points, 8)
        certified = fourier_jsr([q1, q2], three_points, tol=0.01, depth=2)
        assert math.isclose(roots[0], 1 / 6)
        assert all(root <= certified.upper + 1e-6 for root in roots)
        # only the standard component lives here, so the roots climb toward
        # jsr(N1, N2) >= sqrt(rho(N1 N2)) = 1/sqrt(32) rather than 1/4
        assert abs(roots[6] - 1 / math.sqrt(32)) < 0.005

    def test_roots_on_group_approach_quarter(self, q1, q2):
        # the sign component carries Q1 -> 1/4, Q2 -> 0
        group = GroupSpace(3)
        roots = worst_case_roots([q1, q2], group, 8)
        certified = fourier_jsr([q1, q2], group, tol=0.01, depth=2)
        assert certified.upper >= 0.25 - 1e-9
        assert all(root <= certified.upper + 1e-6 for root in roots)
        assert all(a < b for a, b in zip(roots, roots[1:]))
        assert abs(roots[-1] - 0.25) <= 0.08


class TestClassBounds:
    def test_constant_word_matches_class_bound(self, pairs):
        q = lazy_transposition(4, 0.5)
        for steps in (1, 4):
            assert math.isclose(
                switched_class_bound([q], [0] * steps, pairs),
                class_function_bound(q, pairs, steps),
            )

    def test_bound_holds_for_every_state(self, pairs, three_cycles):
        qs = [lazy_transposition(4, 0.3), three_cycles]
        word = [0, 1, 0, 0]
        bound = switched_class_bound(qs, word, pairs)
        worst = 0.0
        for x in range(pairs.size):
            dist = switched_exact_distribution(qs, word, pairs, x)
            worst = max(worst, 0.5 * float(np.abs(dist.probs - 0.25).sum()))
        assert worst**2 <= bound + 1e-12

    def test_three_cycle_kills_standard_component(self, pairs, three_cycles):
        # chi_(3,1) vanishes on 3-cycles, the only nontrivial part of C[X]
        assert switched_class_bound([three_cycles], [0], pairs) == 0.0

    def test_rejects_non_invariant(self, q1, three_points):
        with pytest.raises(NotClassInvariantError):
            switched_class_bound([q1], [0], three_points)


class TestSymmetricSwitching:
    def test_rate_and_prefactor(self, pairs, three_cycles):
        qs = [lazy_transposition(4, 0.5), three_cycles]
        result = symmetric_switching_bound(qs, pairs)
        assert math.isclose(result.rate, 2 / 3)
        assert result.worst_shape == Partition((3, 1))
        assert math.isclose(result.prefactor, 0.5 * math.sqrt(3))

    @pytest.mark.parametrize("steps", [1, 2, 3])
    def test_bounds_worst_case(self, pairs, three_cycles, steps):
        qs = [lazy_transposition(4, 0.5), three_cycles]
        result = symmetric_switching_bound(qs, pairs)
        worst = switched_worst_case_tv(qs, pairs, steps)
        assert worst.tv <= result.tv_bound(steps) + 1e-12

    def test_rejects_asymmetric(self, q1, three_points):
        with pytest.raises(InvalidDistributionError):
            symmetric_switching_bound([q1], three_points)
