"""Total-variation bounds from Fourier transforms.

Squared TV averaged over initial states is sandwiched by a weighted sum of
Frobenius norms of Fourier transforms; for class-invariant walks the same sum
bounds every initial state and collapses to characters. All sums are formed in
log space so that n = 52 shapes (dimensions beyond 10^14, powers of them far
beyond float range) stay finite.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from ..config import DEFAULT_LIMITS, Limits
from ..errors import MixingError
from ..fourier import (
    Distribution,
    NotClassInvariantError,
    fourier_ratio,
    fourier_transforms,
)
from ..symrep import (
    InvalidPartitionError,
    Partition,
    character_two_row,
    dim_irrep,
    two_row_dimension,
)
from .exact import per_state_tv
from .spaces import (
    GroupSpace,
    HomogeneousSpace,
    TabloidSpace,
    action_matrix,
    nontrivial_components,
)

LOG_QUARTER = math.log(0.25)


class InvalidThresholdError(MixingError):
    """Exception thrown when a bad-state threshold is not positive"""


def log_sum(logs: Iterable[float]) -> float:
    logs = [x for x in logs if x > -math.inf]
    if not logs:
        return -math.inf
    return float(logsumexp(logs))


def exp_or_zero(log_value: float) -> float:
    return 0.0 if log_value == -math.inf else math.exp(log_value)


def _log_power(base: float, exponent: int) -> float:
    """log(base^exponent), with 0^0 = 1"""
    return 0.0 if exponent == 0 else exponent * math.log(base)


@dataclass
class BoundRow:
    """Contribution of one irreducible to a bound"""

    shape: str
    multiplicity: int
    dim: int
    log_term: float

    @property
    def term(self) -> float:
        return exp_or_zero(self.log_term)


@dataclass
class BoundReport:
    """Average squared-TV sandwich after N steps"""

    space: Dict[str, Any]
    steps: int
    rows: List[BoundRow]
    log_upper_avg: float
    log_space_size: float
    method: str = "fourier"
    # Verification fields, filled only when an exhaustive check is requested
    exhaustive: Optional[Dict[str, Any]] = None

    @property
    def upper_avg(self) -> float:
        return exp_or_zero(self.log_upper_avg)

    @property
    def lower_avg(self) -> float:
        return exp_or_zero(self.log_upper_avg - self.log_space_size)

    def to_json(self) -> Dict[str, Any]:
        data = asdict(self)
        data["upper_avg"] = self.upper_avg
        data["lower_avg"] = self.lower_avg
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "BoundReport":
        fields = {k: v for k, v in data.items() if k not in ("upper_avg", "lower_avg")}
        fields["rows"] = [BoundRow(**row) for row in fields["rows"]]
        return cls(**fields)


def _log_multiplicity_term(multiplicity: int, log_norm_sq: float) -> float:
    if log_norm_sq == -math.inf:
        return -math.inf
    return LOG_QUARTER + math.log(multiplicity) + log_norm_sq


def average_tv_sandwich(
    q: Distribution,
    space: HomogeneousSpace,
    steps: int,
    limits: Limits = DEFAULT_LIMITS,
) -> BoundReport:
    """Bounds on (1/|X|) sum_x ||q^N e_x - u||_TV^2:

        upper = 1/4 sum_{lam != triv} m(S^lam, C[X]) ||Q^(lam)^N||_F^2
        lower = upper / |X|
    """
    components = nontrivial_components(space)
    transforms = fourier_transforms(q, [lam for lam, _ in components], limits)
    rows = []
    for lam, multiplicity in components:
        log_norm = transforms[lam].power(steps).log_frobenius_norm_sq()
        rows.append(
            BoundRow(
                str(lam),
                multiplicity,
                transforms[lam].dim,
                _log_multiplicity_term(multiplicity, log_norm),
            )
        )
    log_upper = log_sum(row.log_term for row in rows)
    logging.info(
        f"Average TV^2 upper bound on {space} after {steps} steps: "
        f"{exp_or_zero(log_upper)}"
    )
    return BoundReport(
        space.describe(), steps, rows, log_upper, math.log(space.size), "fourier"
    )


def attach_exhaustive_check(
    report: BoundReport,
    q: Distribution,
    space: HomogeneousSpace,
    limits: Limits = DEFAULT_LIMITS,
) -> BoundReport:
    """Add brute-force average TV^2 and per-state extremes; bounds are untouched"""
    tv = per_state_tv(q, space, report.steps, limits)
    average = tv.mean_square()
    tolerance = limits.tolerance
    report.exhaustive = {
        "average_tv_sq": average,
        "min_tv": tv.min,
        "max_tv": tv.max,
        "argmin": tv.argmin,
        "argmax": tv.argmax,
        "inside": (
            report.lower_avg - tolerance <= average <= report.upper_avg + tolerance
        ),
    }
    return report


def bad_state_fraction_bound(
    q: Distribution,
    space: HomogeneousSpace,
    steps: int,
    alpha: float,
    limits: Limits = DEFAULT_LIMITS,
) -> float:
    """Markov bound on |{x : ||q^N e_x - u||_TV >= alpha}|"""
    if alpha <= 0:
        raise InvalidThresholdError(f"Threshold must be > 0, got {alpha}")
    report = average_tv_sandwich(q, space, steps, limits)
    log_count = math.log(space.size) + report.log_upper_avg - 2 * math.log(alpha)
    return exp_or_zero(log_count)


def as_space(space: Union[Partition, HomogeneousSpace]) -> HomogeneousSpace:
    return TabloidSpace(space) if isinstance(space, Partition) else space


def log_class_function_bound(
    q: Distribution, space: Union[Partition, HomogeneousSpace], steps: int
) -> float:
    space = as_space(space)
    logs = []
    for lam, multiplicity in nontrivial_components(space):
        ratio = fourier_ratio(q, lam)
        if ratio == 0 and steps > 0:
            continue
        logs.append(
            LOG_QUARTER
            + math.log(multiplicity)
            + math.log(dim_irrep(lam))
            + _log_power(abs(ratio), 2 * steps)
        )
    return log_sum(logs)


def class_function_bound(
    q: Distribution, space: Union[Partition, HomogeneousSpace], steps: int
) -> float:
    """Bound on ||q^N e_x - u||_TV^2 valid for every x when Q is constant on
    conjugacy classes:

        1/4 sum_{lam != triv} m(S^lam, C[X]) dim(S^lam) r_lam^{2N}

    with r_lam = chi_lam(Q) / dim(S^lam)."""
    q.class_masses()
    return exp_or_zero(log_class_function_bound(q, space, steps))


def _check_tabloid_cycle_args(n: int, a: int, b: int, k: int) -> None:
    if not (a >= b >= 1 and a + b == n and 2 <= k <= n):
        raise InvalidPartitionError(
            f"Need a >= b >= 1, a + b = n and 2 <= k <= n, got n={n} a={a} b={b} k={k}"
        )


def log_tabloid_cycle_bound(n: int, a: int, b: int, k: int, steps: int) -> float:
    _check_tabloid_cycle_args(n, a, b, k)
    logs = []
    for t in range(1, b + 1):
        chi = character_two_row(n - t, t, k)
        if chi == 0 and steps > 0:
            continue
        dim = two_row_dimension(n, t)
        logs.append(
            LOG_QUARTER
            + _log_power(abs(chi), 2 * steps)
            - (2 * steps - 1) * math.log(dim)
        )
    return log_sum(logs)


def tabloid_cycle_bound(n: int, a: int, b: int, k: int, steps: int) -> float:
    """Squared-TV bound for the uniform k-cycle walk on tabloids of shape (a, b):

        1/4 sum_{t=1}^{b} chi_{(n-t,t)}(C_k)^{2N} / dim(S^{(n-t,t)})^{2N-1}

    evaluated with exact binomials and summed in log space."""
    return exp_or_zero(log_tabloid_cycle_bound(n, a, b, k, steps))


def cycle_bound_curve(
    n: int, a: int, b: int, k: int, steps: Iterable[int]
) -> List[Tuple[int, float]]:
    """(N, bound) pairs for one cycle length"""
    return [(s, tabloid_cycle_bound(n, a, b, k, s)) for s in steps]


@dataclass
class Crossover:
    """Two curves swap order between steps - 1 and steps"""

    lower_k: int
    higher_k: int
    steps: int


def curve_crossovers(curves: Dict[int, Sequence[Tuple[int, float]]]) -> List[Crossover]:
    """Where the ordering of consecutive cycle-length curves flips"""
    result = []
    ks = sorted(curves)
    for low, high in zip(ks, ks[1:]):
        previous = None
        for (steps, low_value), (_, high_value) in zip(curves[low], curves[high]):
            order = np.sign(high_value - low_value)
            if previous is not None and order != 0 and order != previous:
                result.append(Crossover(low, high, steps))
            if order != 0:
                previous = order
    return result


@dataclass
class L2ProfileCheck:
    """Whether ||q e_x||_2 is independent of x, and how that was decided"""

    constant: Optional[bool]
    reason: str
    norms: Optional[List[float]] = field(default=None, repr=False)


def l2_profile_is_constant(
    q: Distribution, space: HomogeneousSpace, limits: Limits = DEFAULT_LIMITS
) -> L2ProfileCheck:
    """When this holds, the average bound applies to every initial state"""
    if isinstance(space, GroupSpace):
        return L2ProfileCheck(True, "space is the group itself")
    if q.is_class_invariant():
        return L2ProfileCheck(True, "distribution is constant on conjugacy classes")
    if space.size > limits.dense_states:
        return L2ProfileCheck(None, f"{space} is too large to check exhaustively")
    matrix = action_matrix(q, space, limits)
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=0))).ravel()
    constant = bool(np.ptp(norms) <= limits.tolerance * (1 + norms.max()))
    return L2ProfileCheck(constant, "exhaustive column norms", norms.tolist())


def per_state_log_bound(
    q: Distribution,
    space: HomogeneousSpace,
    steps: int,
    limits: Limits = DEFAULT_LIMITS,
) -> float:
    """Log of a squared-TV bound that holds for every initial state"""
    if q.is_class_invariant():
        return log_class_function_bound(q, space, steps)
    if isinstance(space, GroupSpace):
        return average_tv_sandwich(q, space, steps, limits).log_upper_avg
    raise NotClassInvariantError(
        "A per-state bound needs a class-invariant walk or the group as the space"
    )


def minimal_steps(
    q: Distribution,
    space: HomogeneousSpace,
    target_tv: float,
    max_steps: int = 1_000_000,
    limits: Limits = DEFAULT_LIMITS,
) -> Optional[int]:
    """Smallest N whose per-state bound gives TV <= target, or None if no N up
    to max_steps does.

    Class-invariant bounds are nonincreasing in N, so doubling then bisecting
    finds the first such N; otherwise the returned N is still one where the
    bound holds."""
    if target_tv <= 0:
        raise InvalidThresholdError(f"Target TV must be > 0, got {target_tv}")
    log_target = 2 * math.log(target_tv)

    def good(steps: int) -> bool:
        return per_state_log_bound(q, space, steps, limits) <= log_target

    if good(0):
        return 0
    high = 1
    while not good(high):
        if high >= max_steps:
            return None
        high = min(2 * high, max_steps)
    low = high // 2
    while high - low > 1:
        middle = (low + high) // 2
        if good(middle):
            high = middle
        else:
            low = middle
    return high
