import csv
from pathlib import Path
from typing import Dict, List, Tuple

import pytest

from fourier_mixing.fourier import GroupDistribution
from fourier_mixing.group_core import Permutation
from fourier_mixing.symrep import Partition
from fourier_mixing.walks.spaces import TabloidSpace

DATA_DIR = Path(__file__).parent / "data"


def _distribution(weights):
    """Build a distribution on S_3 from {cycle notation: weight in eighths}"""
    return GroupDistribution(
        3, {Permutation.parse(cycles, 3): w / 8 for cycles, w in weights.items()}
    )


@pytest.fixture
def q1() -> GroupDistribution:
    return _distribution(
        {"()": 2, "(1 2)": 1, "(0 1)": 1, "(0 1 2)": 2, "(0 2 1)": 1, "(0 2)": 1}
    )


@pytest.fixture
def q2() -> GroupDistribution:
    return _distribution(
        {"()": 1, "(1 2)": 1, "(0 1)": 1, "(0 1 2)": 2, "(0 2 1)": 1, "(0 2)": 2}
    )


@pytest.fixture
def standard_shape() -> Partition:
    return Partition((2, 1))


@pytest.fixture
def three_points(standard_shape) -> TabloidSpace:
    """Tabloids of shape (2, 1), indexed by the element in the second row"""
    return TabloidSpace(standard_shape)


@pytest.fixture(scope="session")
def deck_baselines() -> Dict[int, List[Tuple[int, float]]]:
    """Uniform k-cycle bounds on tabloids of shape (26, 26) for N = 1..400,
    computed independently with exact binomials"""
    baselines = {}
    for k in range(2, 6):
        path = DATA_DIR / f"cycle_26+26_k{k}.csv"
        with open(path, newline="") as f:
            baselines[k] = [(int(r["N"]), float(r["bound"])) for r in csv.DictReader(f)]
    return baselines
