"""Permutations of S_n, cycle types and conjugacy classes.

Permutations are stored in 0-based one-line notation. The group product is
function composition with the right factor acting first:

    compose(p, q).images[i] == p.images[q.images[i]]

so a walk that applies g_1, then g_2, ... ends at g_N ... g_2 g_1 (x_0). Every
other module inherits this convention.
"""

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_LIMITS
from .errors import DegreeMismatchError, ExhaustiveLimitError, MixingError


class InvalidPermutationError(MixingError):
    """Exception thrown when a sequence is not a bijection of {0..n-1}"""


@dataclass(frozen=True)
class Permutation:
    """An element of S_n in one-line notation"""

    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise InvalidPermutationError(f"{list(images)} is not a permutation")
        object.__setattr__(self, "images", images)

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        """Build from disjoint 0-based cycles, each mapping c[i] -> c[i+1]"""
        cycles = [list(c) for c in cycles]
        images = list(range(n))
        seen = set()
        for cycle in cycles:
            for i, point in enumerate(cycle):
                if not 0 <= point < n or point in seen:
                    raise InvalidPermutationError(
                        f"Cycles {list(cycles)} are not disjoint cycles on {n} points"
                    )
                seen.add(point)
                images[point] = cycle[(i + 1) % len(cycle)]
        return cls(tuple(images))

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None) -> "Permutation":
        """Parse "[i0,i1,...]" one-line or "(a b c)(d e)" cycle syntax.

        Cycle syntax needs the degree n unless it can be read off the largest
        point mentioned."""
        text = text.strip()
        if text.startswith("["):
            try:
                images = [int(x) for x in text.strip("[]").split(",") if x.strip()]
            except ValueError as e:
                raise InvalidPermutationError(f"Cannot parse '{text}'") from e
            perm = cls(tuple(images))
            if n is not None and perm.n != n:
                raise DegreeMismatchError(perm.n, n)
            return perm

        if text in ("", "()", "e"):
            if n is None:
                raise InvalidPermutationError("The identity needs an explicit degree")
            return cls.identity(n)

        groups = re.findall(r"\(([^()]*)\)", text)
        if not groups or re.sub(r"\([^()]*\)", "", text).strip():
            raise InvalidPermutationError(f"Cannot parse '{text}'")
        try:
            cycles = [[int(x) for x in g.replace(",", " ").split()] for g in groups]
        except ValueError as e:
            raise InvalidPermutationError(f"Cannot parse '{text}'") from e
        largest = max((max(c) for c in cycles if c), default=-1)
        degree = n if n is not None else largest + 1
        return cls.from_cycles(cycles, degree)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __str__(self) -> str:
        return "[" + ",".join(str(i) for i in self.images) + "]"

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, image in enumerate(self.images):
            inv[image] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == image for i, image in enumerate(self.images))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Disjoint cycle decomposition, fixed points included, smallest point
        first in each cycle"""
        seen = [False] * self.n
        result = []
        for start in range(self.n):
            if seen[start]:
                continue
            cycle = []
            point = start
            while not seen[point]:
                seen[point] = True
                cycle.append(point)
                point = self.images[point]
            result.append(tuple(cycle))
        return result

    def cycle_notation(self) -> str:
        nontrivial = [c for c in self.cycles() if len(c) > 1]
        if not nontrivial:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in nontrivial)

    def sign(self) -> int:
        transpositions = sum(len(c) - 1 for c in self.cycles())
        return -1 if transpositions % 2 else 1


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Group product pq: apply q first, then p"""
    if p.n != q.n:
        raise DegreeMismatchError(p.n, q.n)
    return Permutation(tuple(p.images[i] for i in q.images))


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def identity(n: int) -> Permutation:
    return Permutation.identity(n)


@dataclass(frozen=True)
class CycleType:
    """counts[j-1] is the number of j-cycles; sum(j * counts[j-1]) == n"""

    counts: Tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise InvalidPermutationError(f"Negative cycle counts in {counts}")
        if sum((j + 1) * c for j, c in enumerate(counts)) != len(counts):
            raise InvalidPermutationError(
                f"Cycle counts {counts} do not describe a permutation of "
                f"{len(counts)} points"
            )
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return len(self.counts)

    @classmethod
    def from_lengths(
        cls, lengths: Iterable[int], n: Optional[int] = None
    ) -> "CycleType":
        """Cycle type from cycle lengths, padded with fixed points up to n"""
        lengths = [int(x) for x in lengths]
        if any(x < 1 for x in lengths):
            raise InvalidPermutationError(f"Cycle lengths {lengths} must be >= 1")
        total = sum(lengths)
        degree = total if n is None else n
        if total > degree:
            raise InvalidPermutationError(
                f"Cycle lengths {lengths} do not fit in degree {degree}"
            )
        counts = [0] * degree
        for length in lengths:
            counts[length - 1] += 1
        if degree:
            counts[0] += degree - total
        return cls(tuple(counts))

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None) -> "CycleType":
        """Parse "a+b+..." cycle lengths (e.g. "2" or "3+2"), padded to n"""
        try:
            lengths = [int(x) for x in text.split("+") if x.strip()]
        except ValueError as e:
            raise InvalidPermutationError(f"Cannot parse cycle type '{text}'") from e
        return cls.from_lengths(lengths, n)

    def lengths(self) -> Tuple[int, ...]:
        """Cycle lengths in nonincreasing order (the associated partition)"""
        result: List[int] = []
        for j in range(self.n, 0, -1):
            result.extend([j] * self.counts[j - 1])
        return tuple(result)

    def __str__(self) -> str:
        return "+".join(str(x) for x in self.lengths())


def cycle_type(p: Permutation) -> CycleType:
    return CycleType.from_lengths((len(c) for c in p.cycles()), p.n)


def conjugacy_class_size(t: CycleType) -> int:
    """n! / prod(j^{n_j} n_j!)"""
    denominator = 1
    for j, count in enumerate(t.counts, start=1):
        denominator *= j**count * math.factorial(count)
    return math.factorial(t.n) // denominator


def class_representative(t: CycleType) -> Permutation:
    """The permutation with consecutive cycles (0 1 .. a-1)(a .. a+b-1)..."""
    cycles = []
    start = 0
    for length in t.lengths():
        cycles.append(list(range(start, start + length)))
        start += length
    return Permutation.from_cycles(cycles, t.n)


def cycle_types(n: int) -> List[CycleType]:
    """All cycle types of S_n, one per partition of n"""
    # Imported here to avoid a cycle: symrep builds on this module
    from .symrep import partitions_of

    return [CycleType.from_lengths(p.parts, n) for p in partitions_of(n)]


def enumerate_group(
    n: int, limit: int = DEFAULT_LIMITS.exhaustive_degree
) -> List[Permutation]:
    """All n! permutations in lexicographic one-line order"""
    if n > limit:
        raise ExhaustiveLimitError("enumerate_group", limit, n)
    return [Permutation(images) for images in itertools.permutations(range(n))]


def iterate_class(
    t: CycleType, limit: int = DEFAULT_LIMITS.class_support
) -> Iterator[Permutation]:
    """Every element of a conjugacy class, by placing points into cycle slots.

    Each cycle starts at its smallest point and cycles of equal length are
    ordered by their first point, so every element appears exactly once."""
    size = conjugacy_class_size(t)
    if size > limit:
        raise ExhaustiveLimitError(f"conjugacy class {t}", limit, size)
    lengths = [x for x in t.lengths() if x > 1]
    n = t.n

    def place(
        remaining: Tuple[int, ...], todo: List[int], prev: Tuple[int, int]
    ) -> Iterator[List[Tuple[int, ...]]]:
        if not todo:
            yield []
            return
        length = todo[0]
        # equal lengths: enforce increasing first points
        min_first = prev[1] if prev[0] == length else -1
        for first in remaining:
            if first <= min_first:
                continue
            rest = tuple(p for p in remaining if p != first)
            # first point must be the smallest in its cycle
            candidates = [p for p in rest if p > first]
            for tail in itertools.permutations(candidates, length - 1):
                remaining_after = tuple(p for p in rest if p not in tail)
                for others in place(remaining_after, todo[1:], (length, first)):
                    yield [(first, *tail)] + others

    for cycles in place(tuple(range(n)), lengths, (0, -1)):
        yield Permutation.from_cycles(cycles, n)


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(int(i) for i in rng.permutation(n)))


def conjugate(g: Permutation, h: Permutation) -> Permutation:
    """g h g^{-1}"""
    return compose(compose(g, h), g.inverse())


def cyclic_subgroup(g: Permutation) -> List[Permutation]:
    """The subgroup generated by g, starting at the identity"""
    elements = [Permutation.identity(g.n)]
    current = g
    while not current.is_identity():
        elements.append(current)
        current = compose(g, current)
    return elements


def adjacent_transposition_factors(p: Permutation) -> List[int]:
    """Indices j_1, ..., j_m with p = s_{j_m} ... s_{j_1}, where s_j swaps j and j+1.

    Bubble sort on the one-line images: each swap of positions j, j+1 is a right
    multiplication by s_j, so p s_{j_1} ... s_{j_m} is the identity."""
    images = list(p.images)
    factors = []
    for end in range(len(images) - 1, 0, -1):
        for j in range(end):
            if images[j] > images[j + 1]:
                images[j], images[j + 1] = images[j + 1], images[j]
                factors.append(j)
    return factors


def lehmer_rank(images: Sequence[int]) -> int:
    """Lexicographic rank of a permutation of range(len(images))"""
    n = len(images)
    rank = 0
    remaining = sorted(images)
    for i, value in enumerate(images):
        position = remaining.index(value)
        rank += position * math.factorial(n - 1 - i)
        remaining.pop(position)
    return rank


def lehmer_unrank(rank: int, items: Sequence[int]) -> Tuple[int, ...]:
    """Inverse of lehmer_rank over the sorted items"""
    remaining = sorted(items)
    result = []
    for i in range(len(remaining) - 1, -1, -1):
        position, rank = divmod(rank, math.factorial(i))
        result.append(remaining.pop(position))
    return tuple(result)
