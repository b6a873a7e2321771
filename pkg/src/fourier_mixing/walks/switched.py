"""Switched walks: at step i the increment is drawn from Q_{w_i}, where the word
w is chosen by an adversary. Letters are 0-based and position 0 acts first."""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from ..config import DEFAULT_LIMITS, Limits
from ..errors import BudgetExceededError, MixingError
from ..fourier import (
    Distribution,
    InvalidDistributionError,
    fourier_ratio,
    fourier_transform,
    is_symmetric,
)
from ..symrep import Partition, dim_irrep
from .bounds import LOG_QUARTER, as_space, exp_or_zero, log_sum
from .exact import StateDistribution, tv_columns
from .spaces import HomogeneousSpace, action_matrix, nontrivial_components


class WordLetterError(MixingError):
    """Exception thrown when a switching word uses a letter with no distribution"""


def check_word(word: Sequence[int], letters: int) -> List[int]:
    word = [int(a) for a in word]
    bad = [a for a in word if not 0 <= a < letters]
    if bad:
        raise WordLetterError(f"Letters {bad} out of range for {letters} distributions")
    return word


def switched_exact_distribution(
    qs: Sequence[Distribution],
    word: Sequence[int],
    space: HomogeneousSpace,
    x0: int,
    limits: Limits = DEFAULT_LIMITS,
) -> StateDistribution:
    """Distribution of g_{w_N,N} ... g_{w_1,1} (x0)"""
    word = check_word(word, len(qs))
    size = space.check_size(limits.exhaustive_space)
    matrices = {a: action_matrix(qs[a], space, limits) for a in set(word)}
    probs = np.zeros(size)
    probs[x0] = 1.0
    for a in word:
        probs = matrices[a] @ probs
    return StateDistribution(space, probs)


@dataclass
class SwitchedWorstCase:
    tv: float
    word: List[int]
    state: int

    @property
    def root(self) -> float:
        """tv^{1/N}"""
        return self.tv ** (1.0 / len(self.word)) if self.word else self.tv


def switched_worst_case_tv(
    qs: Sequence[Distribution],
    space: HomogeneousSpace,
    steps: int,
    limits: Limits = DEFAULT_LIMITS,
) -> SwitchedWorstCase:
    """max over words of length N and initial states of the TV to uniform,
    by depth-first enumeration of all m^N products.

    Ties keep the lexicographically first word and the lowest state."""
    m = len(qs)
    size = space.check_size(limits.dense_states, "dense state space")
    requested = m**steps * size
    if requested > limits.switched_budget:
        raise BudgetExceededError(
            "switched enumeration", limits.switched_budget, requested
        )
    matrices = [action_matrix(q, space, limits).toarray() for q in qs]

    best = SwitchedWorstCase(-1.0, [], 0)
    prefix: List[int] = []

    def visit(product: np.ndarray) -> None:
        nonlocal best
        if len(prefix) == steps:
            tv = tv_columns(product)
            state = int(np.argmax(tv))
            if tv[state] > best.tv:
                best = SwitchedWorstCase(float(tv[state]), list(prefix), state)
            return
        for a in range(m):
            prefix.append(a)
            visit(matrices[a] @ product)
            prefix.pop()

    visit(np.eye(size))
    logging.debug(f"Worst switched TV at N={steps}: {best.tv} for word {best.word}")
    return best


def worst_case_roots(
    qs: Sequence[Distribution],
    space: HomogeneousSpace,
    max_steps: int,
    limits: Limits = DEFAULT_LIMITS,
) -> List[float]:
    """(max TV)^{1/N} for N = 1..max_steps"""
    return [
        switched_worst_case_tv(qs, space, steps, limits).root
        for steps in range(1, max_steps + 1)
    ]


def switched_class_bound(
    qs: Sequence[Distribution],
    word: Sequence[int],
    space: Union[Partition, HomogeneousSpace],
) -> float:
    """Squared-TV bound after the word for class-invariant Q_i:

        1/4 sum_{lam != triv} m(S^lam, C[X]) dim(S^lam) prod_i r_{lam,w_i}^2
    """
    word = check_word(word, len(qs))
    for q in qs:
        q.class_masses()
    space = as_space(space)
    logs = []
    for lam, multiplicity in nontrivial_components(space):
        ratios = [fourier_ratio(qs[a], lam) for a in word]
        if any(r == 0 for r in ratios):
            continue
        logs.append(
            LOG_QUARTER
            + math.log(multiplicity)
            + math.log(dim_irrep(lam))
            + 2 * sum(math.log(abs(r)) for r in ratios)
        )
    return exp_or_zero(log_sum(logs))


@dataclass
class SymmetricSwitchingBound:
    """TV <= prefactor * rate^N for every word of length N and every start"""

    rate: float
    prefactor: float
    worst_shape: Optional[Partition]

    def tv_bound(self, steps: int) -> float:
        return self.prefactor * self.rate**steps


def symmetric_switching_bound(
    qs: Sequence[Distribution],
    space: HomogeneousSpace,
    limits: Limits = DEFAULT_LIMITS,
) -> SymmetricSwitchingBound:
    """For symmetric Q_i every transform is hermitian, so its operator norm is
    its spectral radius and products of them contract at the largest one.

    On the complement of the constants C[X] splits into blocks Q^_i(lam), hence
    ||q_w e_x - u||_2 <= rate^N ||e_x - u||_2 and Cauchy-Schwarz gives
    TV <= sqrt(|X| - 1) / 2 * rate^N."""
    for q in qs:
        if not is_symmetric(q):
            raise InvalidDistributionError(f"{q!r} is not symmetric under inversion")
    rate = 0.0
    worst: Optional[Partition] = None
    for lam, _ in nontrivial_components(space):
        for q in qs:
            norm = fourier_transform(q, lam, limits).operator_norm()
            if norm > rate:
                rate, worst = norm, lam
    prefactor = 0.5 * math.sqrt(space.size - 1)
    return SymmetricSwitchingBound(rate, prefactor, worst)

