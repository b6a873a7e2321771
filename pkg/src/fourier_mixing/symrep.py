"""Partitions, tableaux, tabloids, Kostka numbers, characters and irreducible
representation matrices of S_n."""

import functools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from threading import RLock
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .errors import DegreeMismatchError, ExhaustiveLimitError, MixingError
from .group_core import (
    CycleType,
    Permutation,
    adjacent_transposition_factors,
    compose,
    conjugacy_class_size,
    cycle_type,
    cycle_types,
)


class InvalidPartitionError(MixingError):
    """Exception thrown when a sequence is not a partition, or a two-row
    shape is malformed"""


class DimensionCapError(MixingError):
    """Exception thrown when an irrep is too large to realize as explicit matrices"""

    def __init__(self, shape: "Partition", dim: int, cap: int, *args):
        self.shape = shape
        self.dim = dim
        self.cap = cap
        super().__init__(f"S^{shape} has dimension {dim} > cap {cap}", *args)


class NotASubgroupError(MixingError):
    """Exception thrown when an element list is not closed under products
    and inverses"""


class NonIntegralMultiplicityError(MixingError):
    """Exception thrown when a character average is not an integer, which
    means a character value is wrong"""


@dataclass(frozen=True, order=True)
class Partition:
    """Nonincreasing positive parts; trailing zeros are stripped"""

    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if any(p < 1 for p in parts):
            raise InvalidPartitionError(f"{parts} has non-positive parts")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise InvalidPartitionError(f"{parts} is not nonincreasing")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "+".join(str(p) for p in self.parts) if self.parts else "0"

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse the "a+b+c" text form"""
        try:
            parts = [int(x) for x in text.split("+") if x.strip()]
        except ValueError as e:
            raise InvalidPartitionError(f"Cannot parse partition '{text}'") from e
        return cls(tuple(parts))

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls((n,))

    @classmethod
    def sign(cls, n: int) -> "Partition":
        return cls((1,) * n)

    def is_trivial(self) -> bool:
        return len(self.parts) <= 1

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(
            tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0]))
        )

    def is_hook(self) -> bool:
        return len(self.parts) <= 1 or self.parts[1] <= 1

    def cells(self) -> List[Tuple[int, int]]:
        return [(r, c) for r, length in enumerate(self.parts) for c in range(length)]


def partitions_of(n: int) -> Iterator[Partition]:
    """Partitions of n, largest first in reverse lexicographic order"""

    def build(remaining: int, largest: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for part in range(min(remaining, largest), 0, -1):
            for rest in build(remaining - part, part):
                yield (part, *rest)

    for parts in build(n, n):
        yield Partition(parts)


def _prefix_sums(parts: Sequence[int], length: int) -> List[int]:
    sums = []
    total = 0
    for i in range(length):
        total += parts[i] if i < len(parts) else 0
        sums.append(total)
    return sums


def dominance_leq(lam: Partition, mu: Partition) -> bool:
    """True iff every prefix sum of lam is <= the matching prefix sum of mu"""
    if lam.n != mu.n:
        raise DegreeMismatchError(lam.n, mu.n)
    length = max(len(lam), len(mu))
    return all(
        a <= b
        for a, b in zip(_prefix_sums(lam.parts, length), _prefix_sums(mu.parts, length))
    )


def partitions_dominating(mu: Partition) -> Iterator[Partition]:
    """Every partition lam >= mu in dominance order, generated with pruning so
    that large n with few dominating shapes stays cheap"""
    n = mu.n
    required = _prefix_sums(mu.parts, max(n, 1))

    def build(prefix: int, remaining: int, largest: int, j: int):
        if remaining == 0:
            yield ()
            return
        for part in range(min(remaining, largest), 0, -1):
            if prefix + part < required[j]:
                break
            for rest in build(prefix + part, remaining - part, part, j + 1):
                yield (part, *rest)

    for parts in build(0, n, n, 0):
        yield Partition(parts)


def _horizontal_strip_removals(shape: Tuple[int, ...], size: int):
    """Shapes nu with shape/nu a horizontal strip of the given size"""
    length = len(shape)

    def build(i: int, left: int):
        if i == length:
            if left == 0:
                yield ()
            return
        lower = shape[i + 1] if i + 1 < length else 0
        for keep in range(shape[i], lower - 1, -1):
            removed = shape[i] - keep
            if removed > left:
                break
            for rest in build(i + 1, left - removed):
                yield (keep, *rest)

    for nu in build(0, size):
        yield tuple(p for p in nu if p > 0)


@functools.lru_cache(maxsize=None)
def _kostka(shape: Tuple[int, ...], content: Tuple[int, ...]) -> int:
    if not content:
        return 1 if not shape else 0
    if sum(shape) != sum(content):
        return 0
    return sum(
        _kostka(nu, content[:-1])
        for nu in _horizontal_strip_removals(shape, content[-1])
    )


def kostka(lam: Partition, mu: Partition) -> int:
    """Number of semistandard tableaux of shape lam and content mu.

    Counted by peeling off the cells holding the largest label, which always
    form a horizontal strip."""
    if lam.n != mu.n:
        return 0
    return _kostka(lam.parts, mu.parts)


def young_rule_multiplicities(mu: Partition) -> Dict[Partition, int]:
    """Multiplicities of S^lam in the permutation module M^mu (Young's rule)"""
    result = {}
    for lam in partitions_dominating(mu):
        count = kostka(lam, mu)
        if count:
            result[lam] = count
    return result


def hook_lengths(lam: Partition) -> List[int]:
    conj = lam.conjugate().parts
    return [
        (lam.parts[r] - c - 1) + (conj[c] - r - 1) + 1 for r, c in lam.cells()
    ]


def dim_irrep(lam: Partition) -> int:
    """Hook length formula, exact in integer arithmetic"""
    return math.factorial(lam.n) // math.prod(hook_lengths(lam))


@functools.lru_cache(maxsize=None)
def _murnaghan_nakayama(parts: Tuple[int, ...], cycles: Tuple[int, ...]) -> int:
    if not cycles:
        return 1 if not parts else 0
    r = cycles[0]
    length = len(parts)
    # beta numbers: first-column hook lengths; removing a border strip of
    # length r moves one bead down by r
    beta = [parts[i] + (length - 1 - i) for i in range(length)]
    beads = set(beta)
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in beads:
            continue
        height = sum(1 for x in beta if target < x < b)
        moved = sorted((beads - {b}) | {target}, reverse=True)
        nu = tuple(x - (length - 1 - i) for i, x in enumerate(moved))
        nu = tuple(p for p in nu if p > 0)
        total += (-1) ** height * _murnaghan_nakayama(nu, cycles[1:])
    return total


def character_mn(lam: Partition, c: CycleType) -> int:
    """chi_lam(c) by the recursive Murnaghan-Nakayama rule"""
    if lam.n != c.n:
        raise DegreeMismatchError(lam.n, c.n)
    return _murnaghan_nakayama(lam.parts, c.lengths())


def binomial(m: int, j: int) -> int:
    """C(m, j), zero outside 0 <= j <= m"""
    if j < 0 or m < 0 or j > m:
        return 0
    return math.comb(m, j)


def character_two_row(a: int, b: int, k: int) -> int:
    """chi_{(a,b)} on a single k-cycle (with n - k fixed points)"""
    n = a + b
    if b < 0 or a < b or not 1 <= k <= max(n, 1):
        raise InvalidPartitionError(
            f"Two-row character needs a >= b >= 0 and 1 <= k <= n, got {a}, {b}, {k}"
        )
    m = n - k
    return (binomial(m, a) - binomial(m, a + 1)) + (binomial(m, b) - binomial(m, b - 1))


def two_row_dimension(n: int, t: int) -> int:
    """dim S^{(n-t, t)} = C(n, t) - C(n, t-1)"""
    return binomial(n, t) - binomial(n, t - 1)


@dataclass
class CharacterTable:
    n: int
    shapes: List[Partition]
    classes: List[CycleType]
    values: Dict[Tuple[Partition, CycleType], int] = field(repr=False)

    def __getitem__(self, key: Tuple[Partition, CycleType]) -> int:
        return self.values[key]

    def inner_product_times_order(self, lam: Partition, mu: Partition) -> int:
        """n! <chi_lam, chi_mu>, exact"""
        return sum(
            conjugacy_class_size(c) * self.values[(lam, c)] * self.values[(mu, c)]
            for c in self.classes
        )

    def is_orthonormal(self) -> bool:
        order = math.factorial(self.n)
        return all(
            self.inner_product_times_order(lam, mu) == (order if lam == mu else 0)
            for lam in self.shapes
            for mu in self.shapes
        )


def character_table(n: int) -> CharacterTable:
    shapes = list(partitions_of(n))
    classes = cycle_types(n)
    values = {(lam, c): character_mn(lam, c) for lam in shapes for c in classes}
    return CharacterTable(n, shapes, classes, values)


# A standard tableau is stored as positions[entry] = (row, column)
Tableau = Tuple[Tuple[int, int], ...]


def standard_tableaux(lam: Partition) -> List[Tableau]:
    """All standard Young tableaux of shape lam, built by placing the largest
    entry in each removable corner in turn"""

    @functools.lru_cache(maxsize=None)
    def build(parts: Tuple[int, ...]) -> Tuple[Tableau, ...]:
        if not parts:
            return ((),)
        result = []
        for r, length in enumerate(parts):
            below = parts[r + 1] if r + 1 < len(parts) else 0
            if length > below:
                smaller = list(parts)
                smaller[r] -= 1
                smaller_parts = tuple(p for p in smaller if p > 0)
                for t in build(smaller_parts):
                    result.append((*t, (r, length - 1)))
        return tuple(result)

    return list(build(lam.parts))


class Irrep:
    """Young's orthogonal form of S^lam.

    Generator matrices are built for the adjacent transpositions s_j = (j j+1);
    other elements are products along a bubble-sort factorization. Matrices
    are real orthogonal."""

    def __init__(self, shape: Partition):
        self.shape = shape
        self.n = shape.n
        self.tableaux = standard_tableaux(shape)
        self.dim = len(self.tableaux)
        self.generators = [self._generator(j) for j in range(self.n - 1)]

        # Guards the product cache; matrices are shared between threads
        self.lock = RLock()
        self._cache: Dict[Permutation, np.ndarray] = {}

    def _generator(self, j: int) -> np.ndarray:
        index = {t: i for i, t in enumerate(self.tableaux)}
        matrix = np.zeros((self.dim, self.dim))
        for i, t in enumerate(self.tableaux):
            (r1, c1), (r2, c2) = t[j], t[j + 1]
            # axial distance from entry j to entry j+1
            d = (c2 - r2) - (c1 - r1)
            matrix[i, i] = 1.0 / d
            if abs(d) > 1:
                swapped = list(t)
                swapped[j], swapped[j + 1] = t[j + 1], t[j]
                matrix[index[tuple(swapped)], i] = math.sqrt(1.0 - 1.0 / d**2)
        return matrix

    def matrix(self, g: Permutation) -> np.ndarray:
        if g.n != self.n:
            raise DegreeMismatchError(g.n, self.n)
        with self.lock:
            cached = self._cache.get(g)
            if cached is not None:
                return cached
        result = np.eye(self.dim)
        for j in adjacent_transposition_factors(g):
            result = self.generators[j] @ result
        result.setflags(write=False)
        with self.lock:
            self._cache[g] = result
        return result

    def trace(self, g: Permutation) -> float:
        return float(np.trace(self.matrix(g)))

    def orthogonality_defect(self, g: Permutation) -> float:
        m = self.matrix(g)
        return float(np.max(np.abs(m @ m.T - np.eye(self.dim))))


@functools.lru_cache(maxsize=None)
def _cached_irrep(parts: Tuple[int, ...]) -> Irrep:
    irrep = Irrep(Partition(parts))
    logging.debug(f"Built irrep S^{irrep.shape} of dimension {irrep.dim}")
    return irrep


def build_irrep(lam: Partition, limits: Limits = DEFAULT_LIMITS) -> Irrep:
    dim = dim_irrep(lam)
    if dim > limits.matrix_dim:
        raise DimensionCapError(lam, dim, limits.matrix_dim)
    return _cached_irrep(lam.parts)


def frobenius_reciprocity_multiplicity(
    lam: Partition, subgroup: Sequence[Permutation]
) -> int:
    """m(S^lam, C[G/H]) = (1/|H|) sum_{h in H} chi_lam(h)"""
    elements = set(subgroup)
    if not elements:
        raise NotASubgroupError("The empty set is not a subgroup")
    degrees = {h.n for h in elements}
    if degrees != {lam.n}:
        raise DegreeMismatchError(lam.n, min(degrees - {lam.n}, default=lam.n))
    for h in elements:
        if h.inverse() not in elements:
            raise NotASubgroupError(f"{h} has no inverse in the given set")
        for k in elements:
            if compose(h, k) not in elements:
                raise NotASubgroupError(f"{h} * {k} is not in the given set")

    total = Fraction(0)
    for h in elements:
        total += character_mn(lam, cycle_type(h))
    average = total / len(elements)
    if average.denominator != 1:
        raise NonIntegralMultiplicityError(
            f"Multiplicity of S^{lam} came out as {average}"
        )
    result = int(average)
    assert result >= 0, f"Negative multiplicity {result} for S^{lam}"
    return result


@dataclass(frozen=True)
class Tabloid:
    """Ordered set partition; rows[i] has shape.parts[i] elements"""

    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(sorted(r)) for r in self.rows)
        flat = sorted(x for r in rows for x in r)
        if flat != list(range(len(flat))):
            raise InvalidPartitionError(f"Rows {rows} do not cover 0..n-1 once")
        Partition(tuple(len(r) for r in rows))
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> Partition:
        return Partition(tuple(len(r) for r in self.rows))

    @property
    def word(self) -> Tuple[int, ...]:
        """word[i] is the row holding element i"""
        membership = [0] * sum(len(r) for r in self.rows)
        for row_index, row in enumerate(self.rows):
            for x in row:
                membership[x] = row_index
        return tuple(membership)

    @classmethod
    def from_word(cls, word: Sequence[int], shape: Partition) -> "Tabloid":
        rows: List[List[int]] = [[] for _ in shape.parts]
        for x, r in enumerate(word):
            rows[r].append(x)
        tabloid = cls(tuple(tuple(r) for r in rows))
        if tabloid.shape != shape:
            raise InvalidPartitionError(f"Word {list(word)} is not of shape {shape}")
        return tabloid

    def act(self, g: Permutation) -> "Tabloid":
        return Tabloid(tuple(tuple(g(x) for x in row) for row in self.rows))

    def to_json(self) -> List[List[int]]:
        return [list(r) for r in self.rows]


def act_on_word(g: Permutation, word: Sequence[int]) -> Tuple[int, ...]:
    """Element i in row r moves to g(i), still in row r"""
    moved = [0] * len(word)
    for i, r in enumerate(word):
        moved[g.images[i]] = r
    return tuple(moved)


def _multinomial(counts: Sequence[int]) -> int:
    result = math.factorial(sum(counts))
    for c in counts:
        result //= math.factorial(c)
    return result


def tabloid_count(shape: Partition) -> int:
    return _multinomial(shape.parts)


def tabloid_rank(word: Sequence[int], shape: Partition) -> int:
    """Colex rank of a membership word: lexicographic rank of its reversal"""
    counts = list(shape.parts)
    rank = 0
    for letter in reversed(word):
        for r in range(letter):
            if counts[r]:
                counts[r] -= 1
                rank += _multinomial(counts)
                counts[r] += 1
        counts[letter] -= 1
    return rank


def tabloid_unrank(rank: int, shape: Partition) -> Tuple[int, ...]:
    counts = list(shape.parts)
    reversed_word = []
    for _ in range(shape.n):
        for r in range(len(counts)):
            if not counts[r]:
                continue
            counts[r] -= 1
            block = _multinomial(counts)
            if rank < block:
                reversed_word.append(r)
                break
            rank -= block
            counts[r] += 1
    return tuple(reversed(reversed_word))


def tabloids_of_shape(
    mu: Partition, limit: Optional[int] = None
) -> List[Tabloid]:
    """Every tabloid of shape mu, in colex order of membership words"""
    count = tabloid_count(mu)
    if limit is not None and count > limit:
        raise ExhaustiveLimitError(f"tabloids of shape {mu}", limit, count)
    return [Tabloid.from_word(tabloid_unrank(i, mu), mu) for i in range(count)]
