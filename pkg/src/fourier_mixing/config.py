import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

from .errors import MixingError

# The only environment variable read by the package
THREADS_ENV_VAR = "FOURIER_MIXING_THREADS"


class ConfigError(MixingError):
    """Exception thrown when a run configuration is invalid or has unknown keys"""


@dataclass(frozen=True)
class Limits:
    """Caps and tolerances shared by all computations"""

    # Largest n for which S_n may be enumerated element by element
    exhaustive_degree: int = 8
    # Largest homogeneous space whose probability vectors are materialized
    exhaustive_space: int = 50_000
    # Largest space for which every initial state (dense |X| x |X|) is computed
    dense_states: int = 2_048
    # Largest m^N * |X| for exhaustive switched-walk enumeration
    switched_budget: int = 65_536
    # Largest irrep dimension for which explicit matrices are built
    matrix_dim: int = 512
    # Largest symmetric-power dimension for a norm certificate
    lifted_dim: int = 256
    # Matrix multiplications allowed when enumerating products
    product_budget: int = 1_000_000
    # Largest support x space action table built for sparse action matrices
    action_entries: int = 20_000_000
    # Largest conjugacy-class support that may be listed element by element
    class_support: int = 200_000
    # Absolute-plus-relative default tolerance
    tolerance: float = 1e-9
    # Eigenvalue margin tolerance when verifying certificates
    certificate_tolerance: float = 1e-8
    # Relative positive-definiteness floor for certificate Gram matrices
    pd_floor: float = 1e-8
    # cvxpy solver used for the certificate search
    sdp_solver: str = "CLARABEL"
    # Iteration cap for the jsr bisection
    bisection_iterations: int = 40

    def with_overrides(self, **overrides: Any) -> "Limits":
        return replace(self, **overrides)


DEFAULT_LIMITS = Limits()


def thread_count() -> int:
    """Number of worker threads for per-irrep parallel maps"""
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        threads = int(raw)
    except ValueError:
        logging.warning(f"Ignoring non-integer {THREADS_ENV_VAR}={raw!r}")
        return 1
    return max(1, threads)


# Replicas used by simulate when none are requested
DEFAULT_REPLICAS = 1000

SUBCOMMANDS = (
    "bounds",
    "jsr",
    "verify-cert",
    "simulate",
    "estimate",
    "fourier",
    "chars",
)


@dataclass
class RunConfig:
    """Everything a CLI subcommand needs. Validated before any computation."""

    subcommand: str
    # Group degree; derived from the space when that names it
    n: Optional[int] = None
    # One of "group", "tabloids", "tours"
    space: str = "group"
    # Partition text ("26+26") for tabloid spaces
    shape: Optional[str] = None
    # Distribution specs, see fourier.parse_distribution
    dists: List[str] = field(default_factory=list)
    # Shorthand for "uniform_class:<k>"
    class_cycle: Optional[int] = None
    # Walk length; estimate picks the shortest adequate one when absent
    steps: Optional[int] = None
    # "start:stop" inclusive sweep over N for curve output
    sweep: Optional[str] = None
    # Comma separated 0-based letters of a switching word
    word: Optional[str] = None
    tolerance: float = 1e-2
    epsilon: float = 0.1
    eta: float = 0.05
    alpha: Optional[float] = None
    seed: int = 0
    # Walk replicas; simulate falls back to DEFAULT_REPLICAS, estimate to the
    # Hoeffding sample size
    replicas: Optional[int] = None
    # Caller-supplied TV bound for walks with no computable Fourier bound
    tv_bound: Optional[float] = None
    beta: float = 0.0
    # Distance matrix CSV for tour instances
    matrix: Optional[str] = None
    # Certificate and matrices files for verify-cert
    certificate: Optional[str] = None
    matrices: Optional[str] = None
    # Product depth for jsr lower bounds
    depth: int = 6
    # Tabloid or tour start state (index)
    start: int = 0
    output: Optional[str] = None
    exhaustive_check: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"Unknown subcommand '{self.subcommand}'")
        if self.space not in ("group", "tabloids", "tours"):
            raise ConfigError(f"Unknown space kind '{self.space}'")
        if self.space == "tabloids" and self.shape is None:
            raise ConfigError("Tabloid spaces need a shape, e.g. --tabloids 2+1")
        if self.space in ("group", "tours") and self.n is None and self.subcommand in (
            "bounds",
            "jsr",
            "simulate",
            "estimate",
            "fourier",
        ):
            raise ConfigError(f"Space '{self.space}' needs a degree n")
        if self.steps is not None and self.steps < 0:
            raise ConfigError(f"Number of steps must be >= 0, got {self.steps}")
        if self.replicas is not None and self.replicas < 1:
            raise ConfigError(f"Number of replicas must be >= 1, got {self.replicas}")
        if self.tolerance <= 0:
            raise ConfigError(f"Tolerance must be > 0, got {self.tolerance}")
        if not 0 < self.eta < 1:
            raise ConfigError(f"eta must lie in (0, 1), got {self.eta}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if self.tv_bound is not None and not 0 <= self.tv_bound <= 1:
            raise ConfigError(f"TV bound must lie in [0, 1], got {self.tv_bound}")
        if self.depth < 1:
            raise ConfigError(f"Depth must be >= 1, got {self.depth}")

    @property
    def walk_length(self) -> int:
        return 1 if self.steps is None else self.steps

    def sweep_range(self) -> Optional[range]:
        """The inclusive N range requested by --sweep-N, if any"""
        if self.sweep is None:
            return None
        try:
            start, stop = (int(x) for x in self.sweep.split(":"))
        except ValueError as e:
            raise ConfigError(f"Sweep '{self.sweep}' is not of the form a:b") from e
        if not 0 <= start <= stop:
            raise ConfigError(f"Sweep '{self.sweep}' must satisfy 0 <= a <= b")
        return range(start, stop + 1)

    def word_letters(self) -> Optional[List[int]]:
        if self.word is None:
            return None
        try:
            return [int(x) for x in self.word.split(",") if x.strip() != ""]
        except ValueError as e:
            raise ConfigError(f"Word '{self.word}' is not a list of integers") from e

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
        return cls(**data)


def read_config_file(path: Path) -> Dict[str, Any]:
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return data
