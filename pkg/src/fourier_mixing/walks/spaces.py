"""Homogeneous spaces of S_n: tabloids, tours through n cities, and the group
itself acting on the left.

Points are indexed 0..size-1. Each space also knows its canonical point form
(a membership word, a tour starting at city 0, or one-line images) so that
large spaces can be walked on without ever being enumerated.
"""

import functools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from ..config import DEFAULT_LIMITS, Limits
from ..errors import ExhaustiveLimitError, MixingError
from ..fourier import Distribution
from ..group_core import (
    Permutation,
    cyclic_subgroup,
    lehmer_rank,
    lehmer_unrank,
)
from ..symrep import (
    Partition,
    act_on_word,
    dim_irrep,
    frobenius_reciprocity_multiplicity,
    partitions_of,
    tabloid_count,
    tabloid_rank,
    tabloid_unrank,
    young_rule_multiplicities,
)

# Beyond this degree the tour multiplicities would need too many characters
MAX_TOUR_MULTIPLICITY_DEGREE = 20


class NoMultiplicityRouteError(MixingError):
    """Exception thrown when the irreducible decomposition of C[X] cannot be
    computed for a space"""


class InvalidSpaceError(MixingError):
    """Exception thrown when a space is described by bad or missing arguments"""


class HomogeneousSpace(ABC):
    """A transitive S_n-set with indexed points"""

    kind: ClassVar[str]
    n: int

    @property
    @abstractmethod
    def size(self) -> int:
        """Number of points, possibly far beyond anything enumerable"""

    @abstractmethod
    def point(self, index: int) -> Tuple[int, ...]:
        """Canonical form of the point with this index"""

    @abstractmethod
    def index(self, point: Sequence[int]) -> int:
        """Inverse of point()"""

    @abstractmethod
    def act_on_point(self, g: Permutation, point: Sequence[int]) -> Tuple[int, ...]:
        """g . point in canonical form"""

    @abstractmethod
    def act_on_points(self, g: Permutation, points: np.ndarray) -> np.ndarray:
        """Row-wise act_on_point over a (count, n) array of canonical forms"""

    @abstractmethod
    def multiplicities(self) -> Dict[Partition, int]:
        """m(S^lam, C[X]) for every lam that occurs"""

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """JSON description, inverse of space_from_json"""

    def __str__(self) -> str:
        details = self.describe()
        details.pop("kind")
        return f"{self.kind}(" + ", ".join(f"{k}={v}" for k, v in details.items()) + ")"

    def act(self, g: Permutation, index: int) -> int:
        return self.index(self.act_on_point(g, self.point(index)))

    def check_size(self, cap: int, what: str = "space") -> int:
        if self.size > cap:
            raise ExhaustiveLimitError(f"{what} {self}", cap, self.size)
        return self.size

    @functools.cached_property
    def _points(self) -> np.ndarray:
        return np.array([self.point(i) for i in range(self.size)], dtype=np.int64)

    @functools.cached_property
    def _lookup(self):
        """Map from canonical forms back to indices, as sorted integer keys when
        they fit in int64 and a dict otherwise"""
        points = self._points
        if self.n**self.n < 2**62:
            powers = self.n ** np.arange(self.n, dtype=np.int64)
            keys = points @ powers
            order = np.argsort(keys)
            return powers, keys[order], order
        return None, {tuple(row): i for i, row in enumerate(points.tolist())}, None

    def points_array(self, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
        self.check_size(limits.exhaustive_space)
        return self._points

    def indices_of(self, points: np.ndarray) -> np.ndarray:
        powers, keys, order = self._lookup
        if powers is None:
            found = [keys[tuple(row)] for row in points.tolist()]
            return np.array(found, dtype=np.int64)
        return order[np.searchsorted(keys, points @ powers)]

    def action_table(
        self, elements: Sequence[Permutation], limits: Limits = DEFAULT_LIMITS
    ) -> np.ndarray:
        """table[i, x] = index of elements[i] . x"""
        size = self.check_size(limits.exhaustive_space)
        if len(elements) * size > limits.action_entries:
            raise ExhaustiveLimitError(
                f"action table on {self}", limits.action_entries, len(elements) * size
            )
        points = self.points_array(limits)
        table = np.empty((len(elements), size), dtype=np.int64)
        for i, g in enumerate(elements):
            table[i] = self.indices_of(self.act_on_points(g, points))
        return table

    def is_transitive(self, limits: Limits = DEFAULT_LIMITS) -> bool:
        """Single orbit under the adjacent transpositions"""
        size = self.check_size(limits.exhaustive_space)
        generators = [
            Permutation.from_cycles([[j, j + 1]], self.n) for j in range(self.n - 1)
        ]
        if not generators:
            return size == 1
        table = self.action_table(generators, limits)
        seen = np.zeros(size, dtype=bool)
        seen[0] = True
        frontier = np.array([0])
        while frontier.size:
            reached = np.unique(table[:, frontier].ravel())
            frontier = reached[~seen[reached]]
            seen[frontier] = True
        return bool(seen.all())


@dataclass(frozen=True)
class TabloidSpace(HomogeneousSpace):
    """Tabloids of shape mu; a point is the row-membership word"""

    shape: Partition
    kind: ClassVar[str] = "tabloids"

    @property
    def n(self) -> int:  # type: ignore[override]
        return self.shape.n

    @property
    def size(self) -> int:
        return tabloid_count(self.shape)

    def point(self, index: int) -> Tuple[int, ...]:
        return tabloid_unrank(index, self.shape)

    def index(self, point: Sequence[int]) -> int:
        return tabloid_rank(point, self.shape)

    def act_on_point(self, g: Permutation, point: Sequence[int]) -> Tuple[int, ...]:
        return act_on_word(g, point)

    def act_on_points(self, g: Permutation, points: np.ndarray) -> np.ndarray:
        moved = np.empty_like(points)
        moved[:, list(g.images)] = points
        return moved

    def multiplicities(self) -> Dict[Partition, int]:
        return young_rule_multiplicities(self.shape)

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self.n, "shape": str(self.shape)}


@dataclass(frozen=True)
class TourSpace(HomogeneousSpace):
    """Directed tours through cities 0..n-1, written starting at city 0.

    The stabilizer of the tour (0 1 ... n-1) is the cyclic group generated by
    the n-cycle, so there are (n-1)! points."""

    n: int
    kind: ClassVar[str] = "tours"

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSpaceError(f"Tours need at least one city, got {self.n}")

    @property
    def size(self) -> int:
        return math.factorial(self.n - 1)

    def point(self, index: int) -> Tuple[int, ...]:
        return (0, *lehmer_unrank(index, range(1, self.n)))

    def index(self, point: Sequence[int]) -> int:
        return lehmer_rank([c - 1 for c in point[1:]])

    def act_on_point(self, g: Permutation, point: Sequence[int]) -> Tuple[int, ...]:
        relabeled = [g(c) for c in point]
        start = relabeled.index(0)
        return tuple(relabeled[start:] + relabeled[:start])

    def act_on_points(self, g: Permutation, points: np.ndarray) -> np.ndarray:
        relabeled = np.asarray(g.images)[points]
        start = np.argmax(relabeled == 0, axis=1)
        columns = (start[:, None] + np.arange(self.n)) % self.n
        return np.take_along_axis(relabeled, columns, axis=1)

    def base_cycle(self) -> Permutation:
        """The n-cycle i -> i+1 mod n, generating the stabilizer of point 0"""
        return Permutation(tuple((i + 1) % self.n for i in range(self.n)))

    def multiplicities(self) -> Dict[Partition, int]:
        if self.n > MAX_TOUR_MULTIPLICITY_DEGREE:
            raise NoMultiplicityRouteError(
                f"Tour multiplicities are only computed for n <= "
                f"{MAX_TOUR_MULTIPLICITY_DEGREE}, got {self.n}"
            )
        stabilizer = cyclic_subgroup(self.base_cycle())
        result = {}
        for lam in partitions_of(self.n):
            m = frobenius_reciprocity_multiplicity(lam, stabilizer)
            if m:
                result[lam] = m
        return result

    def tour_length(self, point: Sequence[int], dist: np.ndarray) -> float:
        legs = (dist[point[i], point[(i + 1) % self.n]] for i in range(self.n))
        return float(sum(legs))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True)
class GroupSpace(HomogeneousSpace):
    """S_n acting on itself by left multiplication"""

    n: int
    kind: ClassVar[str] = "group"

    @property
    def size(self) -> int:
        return math.factorial(self.n)

    def point(self, index: int) -> Tuple[int, ...]:
        return lehmer_unrank(index, range(self.n))

    def index(self, point: Sequence[int]) -> int:
        return lehmer_rank(point)

    def act_on_point(self, g: Permutation, point: Sequence[int]) -> Tuple[int, ...]:
        return tuple(g.images[i] for i in point)

    def act_on_points(self, g: Permutation, points: np.ndarray) -> np.ndarray:
        return np.asarray(g.images)[points]

    def multiplicities(self) -> Dict[Partition, int]:
        # regular representation
        return {lam: dim_irrep(lam) for lam in partitions_of(self.n)}

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n": self.n}


def space_from_json(data: Dict[str, Any]) -> HomogeneousSpace:
    kind = data.get("kind")
    if kind == "tabloids":
        return TabloidSpace(Partition.parse(data["shape"]))
    if kind == "tours":
        return TourSpace(int(data["n"]))
    if kind == "group":
        return GroupSpace(int(data["n"]))
    raise InvalidSpaceError(f"Unknown space kind {kind!r}")


def make_space(
    kind: str, n: Optional[int] = None, shape: Optional[str] = None
) -> HomogeneousSpace:
    """Build a space from CLI-style arguments"""
    if kind == "tabloids":
        if shape is None:
            raise InvalidSpaceError("Tabloid spaces need a shape")
        return TabloidSpace(Partition.parse(shape))
    if n is None:
        raise InvalidSpaceError(f"Space '{kind}' needs a degree")
    if kind == "tours":
        return TourSpace(n)
    if kind == "group":
        return GroupSpace(n)
    raise InvalidSpaceError(f"Unknown space kind {kind!r}")


def nontrivial_components(space: HomogeneousSpace) -> List[Tuple[Partition, int]]:
    """(lam, multiplicity) for every nontrivial irreducible in C[X]"""
    return [
        (lam, m) for lam, m in space.multiplicities().items() if not lam.is_trivial()
    ]


def action_matrix(
    q: Distribution, space: HomogeneousSpace, limits: Limits = DEFAULT_LIMITS
) -> sparse.csr_matrix:
    """Column-stochastic A with A[y, x] = sum_g Q(g) [g . x == y]"""
    support = q.materialize(limits)
    size = space.check_size(limits.exhaustive_space)
    table = space.action_table(support.elements, limits)
    rows = table.ravel()
    cols = np.tile(np.arange(size), len(support.elements))
    data = np.repeat(support.probabilities, size)
    return sparse.csr_matrix((data, (rows, cols)), shape=(size, size))
