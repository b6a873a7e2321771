"""Monte Carlo estimation of uniform averages over a homogeneous space.

Samples are the end points of independent N-step walks. Once the walk is
within tv_bound of uniform in total variation, Hoeffding's inequality gives

    P(|E_U f - mean| >= eps) <= 2 exp(-M (eps - tv_bound)^2 / 2)

for |f| <= 1, which is what the planners below invert.
"""

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .errors import MixingError
from .fourier import Distribution, NotClassInvariantError
from .group_core import CycleType, cyclic_subgroup
from .symrep import (
    Partition,
    character_mn,
    dim_irrep,
    frobenius_reciprocity_multiplicity,
)
from .walks.bounds import minimal_steps, per_state_log_bound
from .walks.exact import simulate_walk
from .walks.spaces import HomogeneousSpace, TourSpace

PointFunction = Callable[[Tuple[int, ...]], float]

# Sample functions may exceed their declared bound by rounding only
BOUND_SLACK = 1e-12


class InvalidPlanError(MixingError):
    """Exception thrown when the walk is not close enough to uniform for the
    requested accuracy. required_steps is the least walk length that would do,
    when one was found."""

    def __init__(self, message: str, required_steps: Optional[int] = None, *args):
        self.required_steps = required_steps
        if required_steps is not None:
            message = f"{message}; use at least N = {required_steps} steps"
        super().__init__(message, *args)


class UnboundedFunctionError(MixingError):
    """Exception thrown when a sampled function exceeds its declared bound"""


class InvalidInstanceError(MixingError):
    """Exception thrown when a tour instance or its temperature is malformed"""


class NonPrimeDegreeError(MixingError):
    """Exception thrown when a prime-only formula is asked about composite n"""


def hoeffding_failure(samples: int, margin: float) -> float:
    """2 exp(-M margin^2 / 2), capped at 1"""
    return min(1.0, 2.0 * math.exp(-samples * margin * margin / 2.0))


def hoeffding_sample_size(epsilon: float, eta: float, tv_bound: float) -> int:
    """Least M with 2 exp(-M (epsilon - tv_bound)^2 / 2) <= eta"""
    if not 0 < eta < 1:
        raise InvalidPlanError(f"eta must lie in (0, 1), got {eta}")
    margin = epsilon - tv_bound
    if margin <= 0:
        raise InvalidPlanError(
            f"TV bound {tv_bound} leaves no room below the accuracy {epsilon}"
        )
    samples = max(1, math.ceil(2.0 * math.log(2.0 / eta) / (margin * margin)))
    while hoeffding_failure(samples, margin) > eta:
        samples += 1
    return samples


def walk_tv_bound(
    q: Distribution,
    space: HomogeneousSpace,
    steps: int,
    limits: Limits = DEFAULT_LIMITS,
) -> float:
    """Total-variation bound after N steps that holds from every start"""
    log_bound = per_state_log_bound(q, space, steps, limits)
    return 1.0 if log_bound >= 0 else math.sqrt(math.exp(log_bound))


@dataclass(frozen=True)
class EstimationPlan:
    epsilon: float
    eta: float
    tv_bound: float
    steps: int
    samples: int

    def __post_init__(self):
        if self.tv_bound >= self.epsilon:
            raise InvalidPlanError(
                f"TV bound {self.tv_bound} is not below epsilon {self.epsilon}"
            )
        if hoeffding_failure(self.samples, self.epsilon - self.tv_bound) > self.eta:
            raise InvalidPlanError(
                f"M = {self.samples} samples do not reach confidence 1 - {self.eta}"
            )

    @classmethod
    def build(
        cls, epsilon: float, eta: float, tv_bound: float, steps: int
    ) -> "EstimationPlan":
        """Plan with the least number of samples for a known TV bound"""
        return cls(
            epsilon, eta, tv_bound, steps, hoeffding_sample_size(epsilon, eta, tv_bound)
        )

    @property
    def confidence(self) -> float:
        return 1.0 - hoeffding_failure(self.samples, self.epsilon - self.tv_bound)

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


def _required_steps(
    q: Distribution, space: HomogeneousSpace, level: float, limits: Limits
) -> Optional[int]:
    # strictly below the level
    try:
        return minimal_steps(q, space, level * (1 - 1e-9), limits=limits)
    except NotClassInvariantError:
        return None


def plan_for_walk(
    q: Distribution,
    space: HomogeneousSpace,
    epsilon: float,
    eta: float,
    steps: Optional[int] = None,
    tv_bound: Optional[float] = None,
    limits: Limits = DEFAULT_LIMITS,
) -> EstimationPlan:
    """Plan an estimate for the walk driven by q.

    Without a walk length the shortest one whose bound is at most epsilon / 2
    is used. A caller-supplied tv_bound replaces the Fourier bound, which is
    needed when q is not constant on conjugacy classes."""
    if steps is None:
        found = minimal_steps(q, space, epsilon / 2, limits=limits)
        if found is None:
            raise InvalidPlanError(f"No walk length brings {space} within {epsilon}")
        steps = found
    if tv_bound is None:
        tv_bound = walk_tv_bound(q, space, steps, limits)
    if tv_bound >= epsilon:
        raise InvalidPlanError(
            f"After {steps} steps the TV bound is {tv_bound} >= epsilon {epsilon}",
            _required_steps(q, space, epsilon, limits),
        )
    plan = EstimationPlan.build(epsilon, eta, tv_bound, steps)
    logging.info(f"Planned N={plan.steps}, M={plan.samples} on {space}")
    return plan


@dataclass
class UniformMeanEstimate:
    estimate: float
    radius: float
    confidence: float
    steps: int
    samples: int
    tv_bound: float
    seed: int
    declared_bound: float

    def to_json(self) -> Dict[str, Any]:
        return {
            "estimate": self.estimate,
            "radius": self.radius,
            "confidence": self.confidence,
            "N": self.steps,
            "M": self.samples,
            "tv_bound": self.tv_bound,
            "seed": self.seed,
            "declared_bound": self.declared_bound,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "UniformMeanEstimate":
        return cls(
            estimate=data["estimate"],
            radius=data["radius"],
            confidence=data["confidence"],
            steps=data["N"],
            samples=data["M"],
            tv_bound=data["tv_bound"],
            seed=data["seed"],
            declared_bound=data["declared_bound"],
        )


def _sample_means(
    functions: Sequence[PointFunction],
    q: Distribution,
    space: HomogeneousSpace,
    steps: int,
    samples: int,
    seed: int,
    x0: int,
    limits: Limits,
) -> np.ndarray:
    """Mean of each function over the same M walk end points"""
    ends = simulate_walk(q, space, x0, steps, seed, samples, limits)
    sums = []
    for f in functions:
        terms = [c * f(space.point(x)) for x, c in ends.counts.items()]
        sums.append(math.fsum(terms))
    return np.array(sums) / samples


def _rescaled(f: PointFunction, bound: float) -> PointFunction:
    if bound <= 0:
        raise UnboundedFunctionError(f"Declared bound must be > 0, got {bound}")

    def g(point: Tuple[int, ...]) -> float:
        value = f(point)
        if abs(value) > bound * (1 + BOUND_SLACK):
            raise UnboundedFunctionError(
                f"|f({point})| = {abs(value)} exceeds the declared bound {bound}"
            )
        return value / bound

    return g


def estimate_uniform_mean(
    f: PointFunction,
    bound: float,
    q: Distribution,
    space: HomogeneousSpace,
    plan: EstimationPlan,
    seed: int,
    x0: int = 0,
    limits: Limits = DEFAULT_LIMITS,
) -> UniformMeanEstimate:
    """Estimate (1/|X|) sum_x f(x) from M walks of N steps started at x0.

    f is divided by its declared bound so that the Hoeffding guarantee applies;
    the estimate and radius are reported on the scale of f."""
    g = _rescaled(f, bound)
    (mean,) = _sample_means([g], q, space, plan.steps, plan.samples, seed, x0, limits)
    return UniformMeanEstimate(
        estimate=float(mean) * bound,
        radius=plan.epsilon * bound,
        confidence=plan.confidence,
        steps=plan.steps,
        samples=plan.samples,
        tv_bound=plan.tv_bound,
        seed=seed,
        declared_bound=bound,
    )


def exact_uniform_mean(
    f: PointFunction, space: HomogeneousSpace, limits: Limits = DEFAULT_LIMITS
) -> float:
    size = space.check_size(limits.exhaustive_space)
    return math.fsum(f(space.point(x)) for x in range(size)) / size


@dataclass
class CoverageResult:
    """How often repeated estimates missed the true mean by more than epsilon"""

    true_mean: float
    trials: int
    failures: int
    eta: float

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials

    def within_budget(self, slack: float = 0.03) -> bool:
        return self.failure_rate <= 2 * self.eta + slack


def coverage_experiment(
    f: PointFunction,
    bound: float,
    q: Distribution,
    space: HomogeneousSpace,
    plan: EstimationPlan,
    seeds: Iterable[int],
    x0: int = 0,
    limits: Limits = DEFAULT_LIMITS,
) -> CoverageResult:
    true_mean = exact_uniform_mean(f, space, limits)
    trials = failures = 0
    for seed in seeds:
        result = estimate_uniform_mean(f, bound, q, space, plan, seed, x0, limits)
        trials += 1
        if abs(result.estimate - true_mean) > result.radius:
            failures += 1
    logging.info(f"Coverage on {space}: {failures} misses in {trials} runs")
    return CoverageResult(true_mean, trials, failures, plan.eta)


@dataclass(frozen=True)
class TourInstance:
    """Symmetric distances between n cities"""

    dist: np.ndarray

    def __post_init__(self):
        dist = np.asarray(self.dist, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InvalidInstanceError(
                f"Distance matrix must be square, got {dist.shape}"
            )
        if dist.shape[0] < 3:
            raise InvalidInstanceError(
                f"Tours need at least 3 cities, got {dist.shape[0]}"
            )
        if not np.allclose(dist, dist.T):
            raise InvalidInstanceError("Distance matrix is not symmetric")
        if np.any(np.diag(dist) != 0):
            raise InvalidInstanceError("Distance matrix has a nonzero diagonal")
        if np.any(dist < 0):
            raise InvalidInstanceError("Distance matrix has negative entries")
        object.__setattr__(self, "dist", dist)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def space(self) -> TourSpace:
        return TourSpace(self.n)

    @property
    def length_bound(self) -> float:
        """D: the sum of the n largest pairwise distances"""
        pairs = self.dist[np.triu_indices(self.n, 1)]
        return float(np.sort(pairs)[::-1][: self.n].sum())

    def tour_length(self, point: Sequence[int]) -> float:
        return self.space.tour_length(point, self.dist)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "TourInstance":
        return cls(np.loadtxt(path, delimiter=",", ndmin=2))


def tour_length(instance: TourInstance, point: Sequence[int]) -> float:
    return instance.tour_length(point)


def annealing_level(epsilon: float, beta: float, length_bound: float) -> float:
    """epsilon e^{-2 beta D} / D^2, the accuracy each component must reach"""
    return epsilon * math.exp(-2 * beta * length_bound) / length_bound**2


def annealing_plan(
    instance: TourInstance,
    beta: float,
    q: Distribution,
    epsilon: float,
    eta: float,
    steps: Optional[int] = None,
    tv_bound: Optional[float] = None,
    limits: Limits = DEFAULT_LIMITS,
) -> EstimationPlan:
    """Walk length and sample count for an annealing estimate with radius
    2 epsilon. The returned plan's epsilon is the component level."""
    level = annealing_level(epsilon, beta, instance.length_bound)
    logging.debug(f"Annealing level for beta={beta}: {level}")
    return plan_for_walk(q, instance.space, level, eta, steps, tv_bound, limits)


@dataclass
class AnnealingEstimate:
    """A_hat / C_hat, the Gibbs-weighted mean tour length"""

    estimate: float
    radius: float
    a_hat: float
    c_hat: float
    beta: float
    steps: int
    samples: int
    seed: int
    tv_bound: Optional[float]
    confidence: float

    def to_json(self) -> Dict[str, Any]:
        return {
            "estimate": self.estimate,
            "radius": self.radius,
            "confidence": self.confidence,
            "N": self.steps,
            "M": self.samples,
            "tv_bound": self.tv_bound,
            "seed": self.seed,
            "beta": self.beta,
            "a_hat": self.a_hat,
            "c_hat": self.c_hat,
        }


def annealing_length_estimate(
    instance: TourInstance,
    beta: float,
    q: Distribution,
    steps: int,
    samples: int,
    seed: int,
    epsilon: float = 0.1,
    tv_bound: Optional[float] = None,
    x0: int = 0,
    limits: Limits = DEFAULT_LIMITS,
) -> AnnealingEstimate:
    """Estimate the Gibbs average of the tour length from walk samples, using
    a(x) = l(x) e^{-beta l(x)} and c(x) = e^{-beta l(x)}.

    The radius is 2 epsilon; the confidence is the one the walk length and
    sample count actually earn at the component level. Raises InvalidPlanError,
    with the least walk length that would do, when the TV bound does not fall
    below that level."""
    if beta < 0:
        raise InvalidInstanceError(f"beta must be >= 0, got {beta}")
    space = instance.space
    level = annealing_level(epsilon, beta, instance.length_bound)
    if tv_bound is None:
        tv_bound = walk_tv_bound(q, space, steps, limits)
    if tv_bound >= level:
        raise InvalidPlanError(
            f"After {steps} steps the TV bound {tv_bound} is not below the "
            f"annealing level {level}",
            _required_steps(q, space, level, limits),
        )
    confidence = max(0.0, 1.0 - 2 * hoeffding_failure(samples, level - tv_bound))

    def a(point: Tuple[int, ...]) -> float:
        length = instance.tour_length(point)
        return length * math.exp(-beta * length)

    def c(point: Tuple[int, ...]) -> float:
        return math.exp(-beta * instance.tour_length(point))

    a_hat, c_hat = _sample_means([a, c], q, space, steps, samples, seed, x0, limits)
    return AnnealingEstimate(
        estimate=float(a_hat / c_hat),
        radius=2 * epsilon,
        a_hat=float(a_hat),
        c_hat=float(c_hat),
        beta=beta,
        steps=steps,
        samples=samples,
        seed=seed,
        tv_bound=tv_bound,
        confidence=confidence,
    )


def exact_gibbs_average(
    instance: TourInstance, beta: float, limits: Limits = DEFAULT_LIMITS
) -> float:
    """sum_x l(x) e^{-beta l(x)} / sum_x e^{-beta l(x)} over all (n-1)! tours"""
    space = instance.space
    size = space.check_size(limits.exhaustive_space, "tour enumeration")
    lengths = np.array([instance.tour_length(space.point(x)) for x in range(size)])
    weights = np.exp(-beta * (lengths - lengths.min()))
    return float(np.dot(lengths, weights) / weights.sum())


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % p for p in range(2, math.isqrt(n) + 1))


def tours_multiplicity_ratio(n: int, lam: Partition) -> Fraction:
    """m(S^lam, C[tours]) / dim(S^lam) for prime n, from Frobenius reciprocity
    over the cyclic stabilizer of a tour"""
    if not is_prime(n):
        raise NonPrimeDegreeError(f"Tour multiplicity ratios need a prime n, not {n}")
    stabilizer = cyclic_subgroup(TourSpace(n).base_cycle())
    multiplicity = frobenius_reciprocity_multiplicity(lam, stabilizer)
    return Fraction(multiplicity, dim_irrep(lam))


def tours_multiplicity_closed_form(n: int, lam: Partition) -> Fraction:
    """(1 + (n-1) chi_lam(c) / dim) / n, where c is an n-cycle; only the
    identity and n-cycles lie in the stabilizer when n is prime"""
    if not is_prime(n):
        raise NonPrimeDegreeError(f"Tour multiplicity ratios need a prime n, not {n}")
    dim = dim_irrep(lam)
    chi = character_mn(lam, CycleType.from_lengths([n]))
    return (1 + Fraction((n - 1) * chi, dim)) / n
