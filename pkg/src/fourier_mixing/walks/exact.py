"""Exact and simulated walk distributions on homogeneous spaces"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import DEFAULT_LIMITS, Limits
from ..errors import MixingError, SpaceMismatchError
from ..fourier import Distribution, GroupDistribution, convolve, point_mass
from ..group_core import Permutation
from .spaces import HomogeneousSpace, action_matrix

# Walk distributions must sum to one within this tolerance after rounding
STATE_TOLERANCE = 1e-10


class UnknownRouteError(MixingError):
    """Exception thrown when an exact distribution is asked for by an unknown route"""


@dataclass
class StateDistribution:
    """A probability vector over the points of a space"""

    space: HomogeneousSpace
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.shape != (self.space.size,):
            raise SpaceMismatchError(
                f"Vector of length {self.probs.shape} does not match {self.space}"
            )
        assert self.probs.min() >= -1e-14, "negative state probability"
        assert abs(self.probs.sum() - 1.0) <= STATE_TOLERANCE, "not normalized"

    @classmethod
    def point_mass(cls, space: HomogeneousSpace, x0: int) -> "StateDistribution":
        probs = np.zeros(space.size)
        probs[x0] = 1.0
        return cls(space, probs)

    @classmethod
    def uniform(cls, space: HomogeneousSpace) -> "StateDistribution":
        return cls(space, np.full(space.size, 1.0 / space.size))


def tv_distance(p: StateDistribution, q: StateDistribution) -> float:
    """Half the l1 distance"""
    if p.space != q.space:
        raise SpaceMismatchError(f"{p.space} != {q.space}")
    return float(min(1.0, 0.5 * np.abs(p.probs - q.probs).sum()))


def tv_to_uniform(probs: np.ndarray) -> float:
    return float(0.5 * np.abs(probs - 1.0 / probs.shape[0]).sum())


def exact_walk_distribution(
    q: Distribution,
    space: HomogeneousSpace,
    x0: int,
    steps: int,
    limits: Limits = DEFAULT_LIMITS,
    route: str = "matrix",
) -> StateDistribution:
    """Distribution of g_N ... g_1 (x0).

    The "matrix" route applies the sparse action matrix N times; the
    "convolution" route pushes the N-fold convolution power forward from x0."""
    size = space.check_size(limits.exhaustive_space)
    if route == "matrix":
        probs = np.zeros(size)
        probs[x0] = 1.0
        if steps:
            matrix = action_matrix(q, space, limits)
            for _ in range(steps):
                probs = matrix @ probs
        return StateDistribution(space, probs)

    if route == "convolution":
        power: GroupDistribution = point_mass(Permutation.identity(q.n))
        for _ in range(steps):
            power = convolve(q, power, limits)
        probs = np.zeros(size)
        start = space.point(x0)
        for g, w in power.items():
            probs[space.index(space.act_on_point(g, start))] += w
        return StateDistribution(space, probs)

    raise UnknownRouteError(f"Unknown route '{route}'")


def transition_power(
    q: Distribution,
    space: HomogeneousSpace,
    steps: int,
    limits: Limits = DEFAULT_LIMITS,
) -> np.ndarray:
    """Dense A^N; column x is the walk distribution from x"""
    size = space.check_size(limits.dense_states, "dense state space")
    matrix = action_matrix(q, space, limits).toarray()
    return np.linalg.matrix_power(matrix, steps) if steps else np.eye(size)


@dataclass
class PerStateTv:
    """TV to uniform from every initial state"""

    values: np.ndarray = field(repr=False)
    argmin: int
    argmax: int

    @property
    def min(self) -> float:
        return float(self.values[self.argmin])

    @property
    def max(self) -> float:
        return float(self.values[self.argmax])

    def mean_square(self) -> float:
        return float(np.mean(self.values**2))

    def count_at_least(self, alpha: float) -> int:
        return int(np.count_nonzero(self.values >= alpha))


def tv_columns(power: np.ndarray) -> np.ndarray:
    return 0.5 * np.abs(power - 1.0 / power.shape[0]).sum(axis=0)


def per_state_tv(
    q: Distribution,
    space: HomogeneousSpace,
    steps: int,
    limits: Limits = DEFAULT_LIMITS,
) -> PerStateTv:
    values = tv_columns(transition_power(q, space, steps, limits))
    return PerStateTv(values, int(np.argmin(values)), int(np.argmax(values)))


def exhaustive_average_tv_sq(
    q: Distribution,
    space: HomogeneousSpace,
    steps: int,
    limits: Limits = DEFAULT_LIMITS,
) -> float:
    """(1/|X|) sum_x ||q^N e_x - u||_TV^2, by brute force"""
    return per_state_tv(q, space, steps, limits).mean_square()


@dataclass
class SampledStates:
    """Empirical end states of independent walk replicas"""

    space: HomogeneousSpace
    steps: int
    replicas: int
    seed: int
    counts: Dict[int, int]

    def frequencies(self) -> Dict[int, float]:
        return {x: c / self.replicas for x, c in self.counts.items()}

    def to_distribution(self, limits: Limits = DEFAULT_LIMITS) -> StateDistribution:
        size = self.space.check_size(limits.exhaustive_space)
        probs = np.zeros(size)
        for x, c in self.counts.items():
            probs[x] = c
        return StateDistribution(self.space, probs / self.replicas)

    def tv_to(self, exact: StateDistribution) -> float:
        if exact.space != self.space:
            raise SpaceMismatchError(f"{exact.space} != {self.space}")
        empirical = np.zeros(exact.probs.shape[0])
        for x, c in self.counts.items():
            empirical[x] = c / self.replicas
        return float(0.5 * np.abs(empirical - exact.probs).sum())


def walk_rng(seed: int) -> np.random.Generator:
    """Counter-based generator, reproducible across platforms"""
    return np.random.Generator(np.random.Philox(key=seed))


def _fast_table(
    q: Distribution, space: HomogeneousSpace, limits: Limits
) -> Optional[Tuple[GroupDistribution, np.ndarray]]:
    if space.size > limits.exhaustive_space or q.support_size() > limits.class_support:
        return None
    if q.support_size() * space.size > limits.action_entries:
        return None
    support = q.materialize(limits)
    return support, space.action_table(support.elements, limits)


def simulate_walk(
    q: Distribution,
    space: HomogeneousSpace,
    x0: int,
    steps: int,
    seed: int,
    replicas: int,
    limits: Limits = DEFAULT_LIMITS,
) -> SampledStates:
    """Run independent walks of the given length from x0.

    Replica i picks its steps with row i of one (replicas, steps) block of
    uniforms. Small spaces use a precomputed action table and advance all
    replicas at once; large ones walk point by point in canonical form, where
    a class distribution also draws a conjugating permutation per step from the
    same generator, in replica order. Either way the result only depends on
    (seed, replicas, steps)."""
    rng = walk_rng(seed)
    uniforms = rng.random((replicas, steps))

    fast = _fast_table(q, space, limits)
    if fast is not None:
        support, table = fast
        states = np.full(replicas, x0, dtype=np.int64)
        for step in range(steps):
            chosen = support.sample_index(uniforms[:, step])
            states = table[chosen, states]
        values, counts = np.unique(states, return_counts=True)
        result = {int(x): int(c) for x, c in zip(values, counts)}
    else:
        logging.debug(f"Simulating on {space} point by point")
        start = space.point(x0)
        ends: Counter = Counter()
        for replica in range(replicas):
            point = start
            for step in range(steps):
                g = q.sample(uniforms[replica, step], rng)
                point = space.act_on_point(g, point)
            ends[space.index(point)] += 1
        result = dict(sorted(ends.items()))

    return SampledStates(space, steps, replicas, seed, result)
