"""Probability distributions on S_n, convolution and Fourier transforms.

Two concrete distribution types are provided. GroupDistribution lists its
support explicitly. ClassDistribution is constant on conjugacy classes and is
stored as a mass per cycle type, so it can describe walks on S_52 without ever
listing an element; its Fourier transforms are scalars (Schur's lemma) obtained
from characters.
"""

import json
import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_LIMITS, Limits, thread_count
from .errors import DegreeMismatchError, ExhaustiveLimitError, MixingError
from .group_core import (
    CycleType,
    Permutation,
    class_representative,
    compose,
    conjugacy_class_size,
    conjugate,
    cycle_type,
    cycle_types,
    enumerate_group,
    iterate_class,
    random_permutation,
)
from .symrep import (
    DimensionCapError,
    Irrep,
    Partition,
    act_on_word,
    build_irrep,
    character_mn,
    dim_irrep,
    tabloid_count,
    tabloid_rank,
    tabloid_unrank,
    young_rule_multiplicities,
)

# Probability vectors must sum to one within this tolerance
NORMALIZATION_TOLERANCE = 1e-12


class InvalidDistributionError(MixingError):
    """Exception thrown when weights are negative, do not sum to one, or a
    distribution spec cannot be parsed"""


class NotClassInvariantError(MixingError):
    """Exception thrown when a class-function route is requested for a
    distribution that is not constant on conjugacy classes"""


class InvalidTransformError(MixingError):
    """Exception thrown when a Fourier matrix is built or combined inconsistently"""


class Distribution(ABC):
    """A probability distribution on S_n"""

    n: int

    @abstractmethod
    def weight(self, g: Permutation) -> float:
        """Q(g)"""

    @abstractmethod
    def support_size(self) -> int:
        """Number of elements with positive weight"""

    @abstractmethod
    def materialize(self, limits: Limits = DEFAULT_LIMITS) -> "GroupDistribution":
        """The same distribution with an explicit support"""

    @abstractmethod
    def class_masses(self, tolerance: float = 1e-12) -> Dict[CycleType, float]:
        """Total mass per conjugacy class, raising NotClassInvariantError if
        the distribution is not constant on classes"""

    @abstractmethod
    def sample(self, u: float, rng: np.random.Generator) -> Permutation:
        """Draw one element, using u in [0, 1) for the inverse-CDF step"""

    def is_class_invariant(self, tolerance: float = 1e-12) -> bool:
        try:
            self.class_masses(tolerance)
        except NotClassInvariantError:
            return False
        return True


def _check_probabilities(values: Iterable[float], what: str) -> None:
    values = list(values)
    if any(v < -1e-14 for v in values):
        raise InvalidDistributionError(f"{what} has negative weights")
    total = math.fsum(values)
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise InvalidDistributionError(f"{what} sums to {total!r}, not 1")


class GroupDistribution(Distribution):
    """Distribution with an explicit finite support, sorted by one-line images"""

    def __init__(self, n: int, weights: Mapping[Permutation, float]):
        self.n = n
        for g in weights:
            if g.n != n:
                raise DegreeMismatchError(g.n, n)
        _check_probabilities(weights.values(), "Distribution")

        items = sorted(
            ((g, max(0.0, float(w))) for g, w in weights.items() if w > 0),
            key=lambda item: item[0].images,
        )
        self.weights: Dict[Permutation, float] = dict(items)
        self.elements: List[Permutation] = [g for g, _ in items]
        self.probabilities = np.array([w for _, w in items])
        self.cdf = np.cumsum(self.probabilities)

    def __repr__(self) -> str:
        return f"GroupDistribution(n={self.n}, support={len(self.elements)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupDistribution):
            return NotImplemented
        return self.n == other.n and self.weights == other.weights

    def weight(self, g: Permutation) -> float:
        return self.weights.get(g, 0.0)

    def items(self) -> List[Tuple[Permutation, float]]:
        return list(self.weights.items())

    def support_size(self) -> int:
        return len(self.elements)

    def materialize(self, limits: Limits = DEFAULT_LIMITS) -> "GroupDistribution":
        return self

    def class_masses(self, tolerance: float = 1e-12) -> Dict[CycleType, float]:
        by_class: Dict[CycleType, List[float]] = {}
        for g, w in self.weights.items():
            by_class.setdefault(cycle_type(g), []).append(w)
        masses = {}
        for t, values in by_class.items():
            if len(values) != conjugacy_class_size(t):
                raise NotClassInvariantError(
                    f"Class {t} is only partly supported "
                    f"({len(values)} of {conjugacy_class_size(t)} elements)"
                )
            if max(values) - min(values) > tolerance:
                raise NotClassInvariantError(f"Weights vary across class {t}")
            masses[t] = math.fsum(values)
        return masses

    def sample(self, u: float, rng: np.random.Generator) -> Permutation:
        return self.elements[self.sample_index(u)]

    def sample_index(self, u: Union[float, np.ndarray]) -> Union[int, np.ndarray]:
        index = np.searchsorted(self.cdf, np.asarray(u) * self.cdf[-1], side="right")
        index = np.minimum(index, len(self.elements) - 1)
        return int(index) if np.ndim(index) == 0 else index

    def inverse(self) -> "GroupDistribution":
        """g -> Q(g^{-1})"""
        return GroupDistribution(self.n, {g.inverse(): w for g, w in self.items()})


class ClassDistribution(Distribution):
    """Distribution constant on conjugacy classes, stored as class masses"""

    def __init__(self, n: int, masses: Mapping[CycleType, float]):
        self.n = n
        for t in masses:
            if t.n != n:
                raise DegreeMismatchError(t.n, n)
        _check_probabilities(masses.values(), "Class distribution")
        items = sorted(
            ((t, float(m)) for t, m in masses.items() if m > 0),
            key=lambda item: item[0].lengths(),
            reverse=True,
        )
        self.masses: Dict[CycleType, float] = dict(items)
        self.classes = [t for t, _ in items]
        self.cdf = np.cumsum([m for _, m in items])
        self._materialized: Optional[GroupDistribution] = None

    def __repr__(self) -> str:
        classes = ", ".join(f"{t}: {m:g}" for t, m in self.masses.items())
        return f"ClassDistribution(n={self.n}, {{{classes}}})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClassDistribution):
            return NotImplemented
        return self.n == other.n and self.masses == other.masses

    def weight(self, g: Permutation) -> float:
        t = cycle_type(g)
        return self.masses.get(t, 0.0) / conjugacy_class_size(t)

    def support_size(self) -> int:
        return sum(conjugacy_class_size(t) for t in self.classes)

    def materialize(self, limits: Limits = DEFAULT_LIMITS) -> GroupDistribution:
        if self._materialized is None:
            size = self.support_size()
            if size > limits.class_support:
                raise ExhaustiveLimitError(
                    f"support of {self!r}", limits.class_support, size
                )
            weights = {}
            for t, mass in self.masses.items():
                each = mass / conjugacy_class_size(t)
                for g in iterate_class(t, limits.class_support):
                    weights[g] = each
            self._materialized = GroupDistribution(self.n, weights)
        return self._materialized

    def class_masses(self, tolerance: float = 1e-12) -> Dict[CycleType, float]:
        return dict(self.masses)

    def sample(self, u: float, rng: np.random.Generator) -> Permutation:
        index = int(np.searchsorted(self.cdf, u * self.cdf[-1], side="right"))
        t = self.classes[min(index, len(self.classes) - 1)]
        # a uniform conjugate of a fixed representative is uniform on the class
        return conjugate(random_permutation(self.n, rng), class_representative(t))


def as_class_distribution(q: Distribution) -> ClassDistribution:
    if isinstance(q, ClassDistribution):
        return q
    return ClassDistribution(q.n, q.class_masses())


def uniform(n: int) -> ClassDistribution:
    """The uniform distribution U on S_n"""
    order = math.factorial(n)
    return ClassDistribution(
        n, {t: conjugacy_class_size(t) / order for t in cycle_types(n)}
    )


def point_mass(g: Permutation) -> GroupDistribution:
    return GroupDistribution(g.n, {g: 1.0})


def uniform_class(t: CycleType) -> ClassDistribution:
    """Uniform on one conjugacy class, e.g. a random k-cycle"""
    return ClassDistribution(t.n, {t: 1.0})


def lazy_transposition(n: int, laziness: Optional[float] = None) -> ClassDistribution:
    """Stay put with probability `laziness`, else apply a uniform transposition.

    The default laziness 1/n gives Q(id) = 1/n and Q(tau) = 2/n^2 for every
    transposition tau."""
    if n < 2:
        raise InvalidDistributionError(f"S_{n} has no transpositions")
    if laziness is None:
        laziness = 1.0 / n
    if not 0 <= laziness <= 1:
        raise InvalidDistributionError(f"Laziness {laziness} is not a probability")
    masses = {
        CycleType.from_lengths([], n): laziness,
        CycleType.from_lengths([2], n): 1.0 - laziness,
    }
    return ClassDistribution(n, masses)


def random_distribution(
    n: int,
    rng: np.random.Generator,
    support_size: Optional[int] = None,
    limits: Limits = DEFAULT_LIMITS,
) -> GroupDistribution:
    """Dirichlet(1,...,1) weights on a random subset of S_n"""
    group = enumerate_group(n, limits.exhaustive_degree)
    size = len(group) if support_size is None else min(support_size, len(group))
    chosen = rng.choice(len(group), size=size, replace=False)
    weights = rng.dirichlet(np.ones(size))
    weights = weights / math.fsum(weights)
    return GroupDistribution(n, {group[i]: float(w) for i, w in zip(chosen, weights)})


def is_symmetric(q: Distribution, tolerance: float = 1e-12) -> bool:
    """Q(g) == Q(g^{-1}) for every g"""
    if isinstance(q, ClassDistribution):
        return True
    assert isinstance(q, GroupDistribution)
    return all(abs(w - q.weight(g.inverse())) <= tolerance for g, w in q.items())


def class_masses(q: Distribution, tolerance: float = 1e-12) -> Dict[CycleType, float]:
    return q.class_masses(tolerance)


def convolve(
    p: Distribution, q: Distribution, limits: Limits = DEFAULT_LIMITS
) -> GroupDistribution:
    """(P * Q)(h) = sum_g P(h g^{-1}) Q(g): draw from Q first, then from P"""
    if p.n != q.n:
        raise DegreeMismatchError(p.n, q.n)
    left = p.materialize(limits)
    right = q.materialize(limits)
    result: Dict[Permutation, float] = {}
    for a, wa in left.items():
        for b, wb in right.items():
            h = compose(a, b)
            result[h] = result.get(h, 0.0) + wa * wb
    total = math.fsum(result.values())
    return GroupDistribution(p.n, {g: w / total for g, w in result.items()})


@dataclass
class FourierMatrix:
    """Q^(rho_lam), held either as a dense matrix or, for class functions, as a
    scalar multiple of the identity of size dim"""

    shape: Partition
    dim: int
    entries: Optional[np.ndarray] = None
    scalar: Optional[complex] = None

    def __post_init__(self):
        if (self.entries is None) == (self.scalar is None):
            raise InvalidTransformError(
                "FourierMatrix needs exactly one of entries or scalar"
            )
        if self.entries is not None:
            self.entries = np.asarray(self.entries, dtype=complex)
            if self.entries.shape != (self.dim, self.dim):
                raise InvalidTransformError(
                    f"Entries have shape {self.entries.shape}, expected dim {self.dim}"
                )

    @property
    def is_scalar(self) -> bool:
        return self.scalar is not None

    def to_dense(self, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
        if self.entries is not None:
            return self.entries
        if self.dim > limits.matrix_dim:
            raise DimensionCapError(self.shape, self.dim, limits.matrix_dim)
        return complex(self.scalar) * np.eye(self.dim, dtype=complex)  # type: ignore

    def power(self, steps: int) -> "FourierMatrix":
        if self.scalar is not None:
            return FourierMatrix(self.shape, self.dim, scalar=self.scalar**steps)
        assert self.entries is not None
        return FourierMatrix(
            self.shape, self.dim, entries=np.linalg.matrix_power(self.entries, steps)
        )

    def __matmul__(self, other: "FourierMatrix") -> "FourierMatrix":
        if self.shape != other.shape:
            raise InvalidTransformError(
                f"Transforms at {self.shape} and {other.shape}"
            )
        if self.scalar is not None and other.scalar is not None:
            product = self.scalar * other.scalar
            return FourierMatrix(self.shape, self.dim, scalar=product)
        return FourierMatrix(
            self.shape, self.dim, entries=self.to_dense() @ other.to_dense()
        )

    def frobenius_norm_sq(self) -> float:
        return frobenius_norm_sq(self)

    def log_frobenius_norm_sq(self) -> float:
        """log of Tr(A A*), -inf for the zero matrix"""
        if self.scalar is not None:
            magnitude = abs(self.scalar)
            if magnitude == 0:
                return -math.inf
            return math.log(self.dim) + 2 * math.log(magnitude)
        value = frobenius_norm_sq(self)
        return math.log(value) if value > 0 else -math.inf

    def operator_norm(self) -> float:
        if self.scalar is not None:
            return abs(self.scalar)
        return float(np.linalg.norm(self.entries, 2))

    def eigenvalue_magnitudes(self, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
        """|eigenvalues| in decreasing order, with multiplicity"""
        if self.scalar is not None:
            if self.dim > limits.matrix_dim:
                raise DimensionCapError(self.shape, self.dim, limits.matrix_dim)
            return np.full(self.dim, abs(self.scalar))
        return np.sort(np.abs(np.linalg.eigvals(self.entries)))[::-1]


def frobenius_norm_sq(m: Union[FourierMatrix, np.ndarray]) -> float:
    """Tr(A A*) = sum of squared entry magnitudes"""
    if isinstance(m, FourierMatrix):
        if m.scalar is not None:
            return m.dim * abs(m.scalar) ** 2
        m = m.entries  # type: ignore
    return float(np.sum(np.abs(np.asarray(m)) ** 2))


def fourier_ratio(q: Distribution, shape: Partition) -> float:
    """a_lam |G| / dim = sum_c mass_c chi_lam(c) / dim, the scalar by which a
    class-invariant Q acts on S^lam"""
    masses = q.class_masses()
    if shape.n != q.n:
        raise DegreeMismatchError(shape.n, q.n)
    dim = dim_irrep(shape)
    total = math.fsum(mass * character_mn(shape, t) for t, mass in masses.items())
    return total / dim


def fourier_transform(
    q: Distribution,
    rho: Union[Irrep, Partition],
    limits: Limits = DEFAULT_LIMITS,
) -> FourierMatrix:
    """sum_g Q(g) rho(g).

    Class distributions named by shape take the scalar route and never build
    matrices; everything else sums the irrep matrices over the support."""
    shape = rho.shape if isinstance(rho, Irrep) else rho
    if shape.n != q.n:
        raise DegreeMismatchError(shape.n, q.n)

    if isinstance(q, ClassDistribution):
        return FourierMatrix(shape, dim_irrep(shape), scalar=fourier_ratio(q, shape))

    irrep = rho if isinstance(rho, Irrep) else build_irrep(rho, limits)
    support = q.materialize(limits)
    entries = np.zeros((irrep.dim, irrep.dim), dtype=complex)
    for g, w in support.items():
        entries += w * irrep.matrix(g)
    return FourierMatrix(shape, irrep.dim, entries=entries)


def fourier_transforms(
    q: Distribution, shapes: Sequence[Partition], limits: Limits = DEFAULT_LIMITS
) -> Dict[Partition, FourierMatrix]:
    """Transforms at several shapes, computed on FOURIER_MIXING_THREADS workers"""
    threads = thread_count()
    if threads == 1 or len(shapes) < 2:
        return {s: fourier_transform(q, s, limits) for s in shapes}
    with ThreadPoolExecutor(max_workers=threads) as executor:
        results = list(executor.map(lambda s: fourier_transform(q, s, limits), shapes))
    return dict(zip(shapes, results))


def parseval_check(
    q: Distribution, mu: Partition, limits: Limits = DEFAULT_LIMITS
) -> Tuple[float, float]:
    """Both sides of

        sum_x ||q e_x - u||^2 = sum_{lam != triv} K_{lam mu} ||Q^(lam)||_F^2

    The left side acts explicitly on every tabloid of shape mu; the right side
    uses Young's rule and the Fourier transforms."""
    if mu.n != q.n:
        raise DegreeMismatchError(mu.n, q.n)
    size = tabloid_count(mu)
    if size > limits.exhaustive_space:
        raise ExhaustiveLimitError(
            f"tabloids of shape {mu}", limits.exhaustive_space, size
        )

    support = q.materialize(limits)
    targets = np.empty((support.support_size(), size), dtype=np.int64)
    for x in range(size):
        word = tabloid_unrank(x, mu)
        for i, g in enumerate(support.elements):
            targets[i, x] = tabloid_rank(act_on_word(g, word), mu)
    lhs = 0.0
    for x in range(size):
        column = np.bincount(
            targets[:, x], weights=support.probabilities, minlength=size
        )
        lhs += float(np.sum((column - 1.0 / size) ** 2))

    rhs = 0.0
    for lam, multiplicity in young_rule_multiplicities(mu).items():
        if lam.is_trivial():
            continue
        rhs += multiplicity * fourier_transform(q, lam, limits).frobenius_norm_sq()
    logging.debug(f"Parseval check on M^{mu}: lhs={lhs!r} rhs={rhs!r}")
    return lhs, rhs


def _perm_from_json(value: Any, n: int) -> Permutation:
    if isinstance(value, str):
        return Permutation.parse(value, n)
    perm = Permutation(tuple(value))
    if perm.n != n:
        raise DegreeMismatchError(perm.n, n)
    return perm


def distribution_to_json(q: Distribution) -> Dict[str, Any]:
    if isinstance(q, ClassDistribution):
        return {
            "n": q.n,
            "classes": [{"cycle_type": str(t), "p": m} for t, m in q.masses.items()],
        }
    assert isinstance(q, GroupDistribution)
    return {
        "n": q.n,
        "support": [{"perm": list(g.images), "p": w} for g, w in q.items()],
    }


def distribution_from_json(data: Dict[str, Any]) -> Distribution:
    try:
        n = int(data["n"])
        if "classes" in data:
            return ClassDistribution(
                n,
                {
                    CycleType.parse(entry["cycle_type"], n): float(entry["p"])
                    for entry in data["classes"]
                },
            )
        return GroupDistribution(
            n,
            {
                _perm_from_json(entry["perm"], n): float(entry["p"])
                for entry in data["support"]
            },
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidDistributionError(f"Malformed distribution JSON: {e}") from e


def load_distribution(path: Union[str, Path]) -> Distribution:
    with open(path) as f:
        return distribution_from_json(json.load(f))


def dump_distribution(q: Distribution, path: Union[str, Path]) -> None:
    with open(path, "w") as f:
        json.dump(distribution_to_json(q), f, indent=2)


def _parse_lazy_transposition(argument: str, n: int) -> ClassDistribution:
    """lazy_transposition[:<n>[:<laziness>]]"""
    fields = [f.strip() for f in argument.split(":")] if argument else []
    if len(fields) > 2:
        raise InvalidDistributionError(f"Malformed lazy_transposition:{argument}")
    try:
        if fields and fields[0] and int(fields[0]) != n:
            raise DegreeMismatchError(int(fields[0]), n)
        laziness = float(fields[1]) if len(fields) == 2 else None
    except ValueError as e:
        raise InvalidDistributionError(
            f"Malformed lazy_transposition:{argument}"
        ) from e
    return lazy_transposition(n, laziness)


def parse_distribution(spec: str, n: int) -> Distribution:
    """Parse a distribution spec:

    uniform, point:<perm>, uniform_class:<cycle type>,
    lazy_transposition[:<n>[:<laziness>]], file:<path>"""
    kind, _, argument = spec.partition(":")
    kind = kind.strip()
    if kind == "uniform":
        return uniform(n)
    if kind == "point":
        return point_mass(Permutation.parse(argument, n))
    if kind == "uniform_class":
        return uniform_class(CycleType.parse(argument, n))
    if kind == "lazy_transposition":
        return _parse_lazy_transposition(argument, n)
    if kind == "file":
        q = load_distribution(argument)
        if q.n != n:
            raise DegreeMismatchError(q.n, n)
        return q
    raise InvalidDistributionError(f"Unknown distribution spec '{spec}'")
