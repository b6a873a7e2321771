"""Joint spectral radius estimation with certified upper bounds.

Lower bounds come from spectral radii of products, max_w rho(A_w)^{1/|w|}.
Upper bounds come from norm certificates: a positive definite P on the d-th
symmetric tensor power with

    L_j^* P L_j <= gamma^{2d} P    for every lifted A_j,

so F(z) = <z^{(x)d}, P z^{(x)d}> satisfies F(A_j z) <= gamma^{2d} F(z) and
jsr <= gamma. Certificates are searched for with cvxpy but accepted only after
an independent eigenvalue check.
"""

import enum
import functools
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import cvxpy as cp
import numpy as np
import scipy.linalg

from .config import DEFAULT_LIMITS, Limits, thread_count
from .errors import BudgetExceededError, ExhaustiveLimitError, MixingError
from .fourier import Distribution, fourier_transform
from .symrep import Partition
from .walks.spaces import HomogeneousSpace, nontrivial_components

SCHEMA_VERSION = 1

# A certificate found at gamma may prove a level this much above it
ACCEPTANCE_SLACK = 1e-6


class NonSquareMatrixError(MixingError):
    """Exception thrown when a matrix that must be square is not, or a matrix
    set mixes dimensions"""


class CertificateError(MixingError):
    """Exception thrown when a certificate file is malformed or does not
    match the matrices it is checked against"""


class InvalidSearchError(MixingError):
    """Exception thrown when a search parameter is out of range"""


def _as_square(a: Any) -> np.ndarray:
    matrix = np.asarray(a, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise NonSquareMatrixError(f"Expected a square matrix, got {matrix.shape}")
    return matrix


def matrix_to_pairs(a: np.ndarray) -> List[List[float]]:
    """Row-major [re, im] pairs"""
    return [[float(z.real), float(z.imag)] for z in np.asarray(a).ravel()]


def matrix_from_pairs(pairs: Sequence[Sequence[float]], dim: int) -> np.ndarray:
    if len(pairs) != dim * dim:
        raise CertificateError(f"Expected {dim * dim} entries, got {len(pairs)}")
    values = np.array([complex(re, im) for re, im in pairs])
    return values.reshape(dim, dim)


@dataclass
class MatrixSet:
    """A_1, ..., A_m, all dim x dim complex"""

    matrices: List[np.ndarray]

    def __post_init__(self):
        self.matrices = [_as_square(a) for a in self.matrices]
        if not self.matrices:
            raise NonSquareMatrixError("A matrix set needs at least one matrix")
        dims = {a.shape[0] for a in self.matrices}
        if len(dims) != 1:
            raise NonSquareMatrixError(f"Mixed dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def __len__(self) -> int:
        return len(self.matrices)

    def scaled(self, c: complex) -> "MatrixSet":
        return MatrixSet([c * a for a in self.matrices])

    def conjugated(self, t: np.ndarray) -> "MatrixSet":
        """T A_i T^{-1}"""
        t_inv = np.linalg.inv(t)
        return MatrixSet([t @ a @ t_inv for a in self.matrices])

    def is_hermitian(self, tolerance: float = 1e-12) -> bool:
        return all(np.allclose(a, a.conj().T, atol=tolerance) for a in self.matrices)

    def max_norm(self) -> float:
        return max(float(np.linalg.norm(a, 2)) for a in self.matrices)

    def to_json(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "dim": self.dim,
            "matrices": [matrix_to_pairs(a) for a in self.matrices],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "MatrixSet":
        try:
            dim = int(data["dim"])
            return cls([matrix_from_pairs(m, dim) for m in data["matrices"]])
        except (KeyError, TypeError, ValueError) as e:
            raise CertificateError(f"Malformed matrix set: {e}") from e


def spectral_radius(a: Any) -> float:
    """max |eigenvalue|, from LAPACK's Hessenberg QR so that complex-conjugate
    dominant pairs are resolved"""
    matrix = _as_square(a)
    if matrix.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(scipy.linalg.eigvals(matrix))))


@dataclass
class LowerBoundSearch:
    value: float
    word: List[int]
    depth: int
    multiplications: int
    exhausted: bool


def search_lower_bound(
    matrix_set: MatrixSet, depth: int, limits: Limits = DEFAULT_LIMITS
) -> LowerBoundSearch:
    """max over words |w| <= depth of rho(A_w)^{1/|w|}.

    A prefix P is extended only while some extension could still beat the
    incumbent, i.e. (||P|| M^r)^{1/(|P|+r)} > best for some r, where M is the
    largest norm in the set. Stops early once the multiplication budget is
    spent."""
    if depth < 1:
        raise InvalidSearchError(f"Depth must be >= 1, got {depth}")
    largest = matrix_set.max_norm()
    state = LowerBoundSearch(0.0, [], depth, 0, False)
    prefix: List[int] = []

    def promising(norm: float, length: int) -> bool:
        return any(
            (norm * largest**r) ** (1.0 / (length + r)) > state.value
            for r in range(1, depth - length + 1)
        )

    def visit(product: np.ndarray) -> None:
        for letter, a in enumerate(matrix_set.matrices):
            if state.multiplications >= limits.product_budget:
                state.exhausted = True
                return
            extended = a @ product
            state.multiplications += 1
            prefix.append(letter)
            length = len(prefix)
            root = spectral_radius(extended) ** (1.0 / length)
            if root > state.value:
                state.value = root
                state.word = list(prefix)
            if length < depth and promising(float(np.linalg.norm(extended, 2)), length):
                visit(extended)
            prefix.pop()
            if state.exhausted:
                return

    visit(np.eye(matrix_set.dim, dtype=complex))
    logging.debug(
        f"Lower bound {state.value} from word {state.word} after "
        f"{state.multiplications} products"
    )
    return state


def jsr_lower_bound(
    matrix_set: MatrixSet, depth: int, limits: Limits = DEFAULT_LIMITS
) -> float:
    search = search_lower_bound(matrix_set, depth, limits)
    if search.exhausted:
        raise BudgetExceededError(
            f"jsr lower bound at depth {depth}",
            limits.product_budget,
            search.multiplications + 1,
        )
    return search.value


def jsr_product_norm_bound(
    matrix_set: MatrixSet, depth: int, limits: Limits = DEFAULT_LIMITS
) -> float:
    """max_{|w| = depth} ||A_w||^{1/depth}, an upper bound for every depth"""
    m = len(matrix_set)
    requested = m**depth
    if requested > limits.product_budget:
        raise BudgetExceededError(
            f"products of length {depth}", limits.product_budget, requested
        )
    products = [np.eye(matrix_set.dim, dtype=complex)]
    for _ in range(depth):
        products = [a @ p for p in products for a in matrix_set.matrices]
    return max(float(np.linalg.norm(p, 2)) for p in products) ** (1.0 / depth)


def lifted_dimension(dim: int, half_degree: int) -> int:
    return math.comb(dim + half_degree - 1, half_degree)


@functools.lru_cache(maxsize=32)
def symmetric_basis(dim: int, half_degree: int) -> np.ndarray:
    """Orthonormal basis of Sym^d(C^dim) inside the full tensor power, one
    column per multiset of coordinates"""
    columns = []
    for multiset in itertools.combinations_with_replacement(range(dim), half_degree):
        orderings = set(itertools.permutations(multiset))
        column = np.zeros(dim**half_degree)
        for ordering in orderings:
            column[np.ravel_multi_index(ordering, (dim,) * half_degree)] = 1.0
        columns.append(column / math.sqrt(len(orderings)))
    basis = np.array(columns).T
    basis.setflags(write=False)
    return basis


def sym_lift(a: Any, half_degree: int) -> np.ndarray:
    """Matrix of A^{(x)d} restricted to the symmetric power, in the
    orthonormal basis of symmetric_basis"""
    matrix = _as_square(a)
    dim = matrix.shape[0]
    basis = symmetric_basis(dim, half_degree)
    tensor = basis.astype(complex).reshape((dim,) * half_degree + (basis.shape[1],))
    for axis in range(half_degree):
        tensor = np.moveaxis(np.tensordot(matrix, tensor, axes=([1], [axis])), 0, axis)
    return basis.T @ tensor.reshape(dim**half_degree, basis.shape[1])


@dataclass
class NormCertificate:
    """P on the d-th symmetric power proving jsr <= gamma * (1 + tol_growth)"""

    degree: int
    gamma: float
    gram: np.ndarray = field(repr=False)
    slacks: List[float]
    tol_growth: float = 0.0
    # lambda_min(P) / lambda_max(P)
    epsilon: float = 1.0

    @property
    def half_degree(self) -> int:
        return self.degree // 2

    @property
    def certified_bound(self) -> float:
        return self.gamma * (1.0 + self.tol_growth)

    def to_json(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "degree": self.degree,
            "gamma": self.gamma,
            "dim": int(self.gram.shape[0]),
            "gram": matrix_to_pairs(self.gram),
            "slacks": list(self.slacks),
            "tol_growth": self.tol_growth,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "NormCertificate":
        try:
            dim = int(data["dim"])
            return cls(
                degree=int(data["degree"]),
                gamma=float(data["gamma"]),
                gram=matrix_from_pairs(data["gram"], dim),
                slacks=[float(s) for s in data["slacks"]],
                tol_growth=float(data.get("tol_growth", 0.0)),
                epsilon=float(data.get("epsilon", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CertificateError(f"Malformed certificate: {e}") from e


@dataclass
class CertificateCheck:
    passed: bool
    slacks: List[float]
    epsilon: float
    tol_growth: float
    certified_bound: float
    reasons: List[str] = field(default_factory=list)


def _hermitian(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def _check_gram(
    gram: np.ndarray,
    lifted: Sequence[np.ndarray],
    gamma: float,
    half_degree: int,
    limits: Limits,
) -> CertificateCheck:
    reasons = []
    gram_h = _hermitian(gram)
    if not np.allclose(gram, gram_h, atol=limits.certificate_tolerance):
        reasons.append("Gram matrix is not hermitian")
    eigenvalues = scipy.linalg.eigvalsh(gram_h)
    top = float(eigenvalues[-1])
    if top <= 0:
        return CertificateCheck(
            False, [], 0.0, math.inf, math.inf, ["Gram matrix is not positive"]
        )
    epsilon = float(eigenvalues[0]) / top
    if epsilon < limits.pd_floor:
        reasons.append(f"Gram matrix too close to singular (ratio {epsilon:.3g})")

    level = gamma ** (2 * half_degree)
    slacks = []
    for matrix in lifted:
        constraint = _hermitian(level * gram_h - matrix.conj().T @ gram_h @ matrix)
        slacks.append(float(scipy.linalg.eigvalsh(constraint)[0]) / top)
    worst = min(slacks)
    if worst < -limits.certificate_tolerance:
        reasons.append(f"Constraint violated by {-worst:.3g}")

    # A violation of at most t relative to lambda_max(P) raises the proven
    # level from gamma^{2d} to gamma^{2d} + t / epsilon
    deficit = max(0.0, -worst)
    if epsilon > 0 and level > 0:
        growth = (1.0 + deficit / (epsilon * level)) ** (1.0 / (2 * half_degree)) - 1.0
    else:
        growth = 0.0 if deficit == 0 else math.inf
    return CertificateCheck(
        passed=not reasons,
        slacks=slacks,
        epsilon=epsilon,
        tol_growth=growth,
        certified_bound=gamma * (1.0 + growth),
        reasons=reasons,
    )


def verify_certificate(
    certificate: NormCertificate,
    matrix_set: MatrixSet,
    limits: Limits = DEFAULT_LIMITS,
) -> CertificateCheck:
    """Recompute every margin of a certificate from scratch"""
    if certificate.degree < 2 or certificate.degree % 2:
        raise CertificateError(
            f"Degree must be even and >= 2, got {certificate.degree}"
        )
    d = certificate.half_degree
    expected = lifted_dimension(matrix_set.dim, d)
    if certificate.gram.shape != (expected, expected):
        raise CertificateError(
            f"Gram matrix has shape {certificate.gram.shape}, the degree-"
            f"{certificate.degree} lift of dimension {matrix_set.dim} needs {expected}"
        )
    if certificate.gamma <= 0:
        raise CertificateError(f"Certified level must be > 0, got {certificate.gamma}")
    lifted = [sym_lift(a, d) for a in matrix_set.matrices]
    return _check_gram(certificate.gram, lifted, certificate.gamma, d, limits)


def _gram_level(
    gram: np.ndarray, lifted: Sequence[np.ndarray], half_degree: int
) -> float:
    """Smallest gamma with L_j^* P L_j <= gamma^{2d} P for all j"""
    worst = 0.0
    for matrix in lifted:
        image = _hermitian(matrix.conj().T @ gram @ matrix)
        worst = max(worst, float(scipy.linalg.eigh(image, gram, eigvals_only=True)[-1]))
    return max(worst, 0.0) ** (1.0 / (2 * half_degree))


def _realify(a: np.ndarray) -> np.ndarray:
    """Real 2n x 2n matrix of z -> A z on C^n = R^2n"""
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def _solve_gram(
    lifted: Sequence[np.ndarray], gamma: float, half_degree: int, limits: Limits
) -> Optional[np.ndarray]:
    """Search a real symmetric P on R^2D; averaging over multiplication by i
    turns it into a complex hermitian D x D Gram matrix"""
    size = lifted[0].shape[0]
    real_lifted = [_realify(m) for m in lifted]
    level = gamma ** (2 * half_degree)

    gram = cp.Variable((2 * size, 2 * size), symmetric=True)
    constraints = [gram >> np.eye(2 * size)]
    for matrix in real_lifted:
        margin = cp.Variable((2 * size, 2 * size), symmetric=True)
        constraints += [margin == level * gram - matrix.T @ gram @ matrix, margin >> 0]
    problem = cp.Problem(cp.Minimize(cp.trace(gram)), constraints)

    solver = limits.sdp_solver if limits.sdp_solver in cp.installed_solvers() else None
    try:
        problem.solve(solver=solver)
    except cp.error.SolverError as e:
        logging.debug(f"SDP attempt at gamma={gamma} d={half_degree} failed: {e}")
        return None
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or gram.value is None:
        logging.debug(f"SDP attempt at gamma={gamma} d={half_degree}: {problem.status}")
        return None

    value = 0.5 * (gram.value + gram.value.T)
    a = 0.5 * (value[:size, :size] + value[size:, size:])
    b = 0.5 * (value[size:, :size] - value[:size, size:])
    return _hermitian(a + 1j * b)


def certify_upper_bound(
    matrix_set: MatrixSet,
    gamma: float,
    half_degree: int,
    limits: Limits = DEFAULT_LIMITS,
) -> Optional[NormCertificate]:
    """A verified certificate that jsr <= gamma (up to ACCEPTANCE_SLACK), or
    None when none was found. None is not a proof that jsr > gamma."""
    if gamma <= 0:
        raise InvalidSearchError(f"gamma must be > 0, got {gamma}")
    if half_degree < 1:
        raise InvalidSearchError(f"Half degree must be >= 1, got {half_degree}")
    size = lifted_dimension(matrix_set.dim, half_degree)
    if size > limits.lifted_dim:
        raise ExhaustiveLimitError(
            f"degree-{2 * half_degree} lift of dimension {matrix_set.dim}",
            limits.lifted_dim,
            size,
        )
    lifted = [sym_lift(a, half_degree) for a in matrix_set.matrices]

    candidates = [np.eye(size, dtype=complex)]
    if _gram_level(candidates[0], lifted, half_degree) > gamma * (1 + ACCEPTANCE_SLACK):
        solved = _solve_gram(lifted, gamma, half_degree, limits)
        candidates = [] if solved is None else [solved]

    for gram in candidates:
        top = float(scipy.linalg.eigvalsh(gram)[-1])
        if top <= 0:
            continue
        gram = gram / top
        try:
            level = _gram_level(gram, lifted, half_degree)
        except (np.linalg.LinAlgError, ValueError):
            continue
        if level > gamma * (1 + ACCEPTANCE_SLACK):
            logging.debug(f"Gram matrix only proves {level} > {gamma}")
            continue
        proven = max(level, gamma * 1e-12) * (1 + 1e-9)
        check = _check_gram(gram, lifted, proven, half_degree, limits)
        if not check.passed:
            logging.debug(f"Certificate rejected: {'; '.join(check.reasons)}")
            continue
        return NormCertificate(
            degree=2 * half_degree,
            gamma=proven,
            gram=gram,
            slacks=check.slacks,
            tol_growth=check.tol_growth,
            epsilon=check.epsilon,
        )
    return None


@dataclass
class JsrEstimate:
    """Proven interval [lower, upper] for a joint spectral radius"""

    lower: float
    upper: float
    depth: int
    certificate: Optional[NormCertificate] = None
    lower_word: List[int] = field(default_factory=list)
    # Highest gamma at which no certificate was found
    search_floor: float = 0.0
    # Set when a budget cut the search short or the interval is wider than tol
    budget_exhausted: bool = False

    def __post_init__(self):
        assert self.lower <= self.upper + 1e-9, f"{self.lower} > {self.upper}"

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_json(self) -> Dict[str, Any]:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "depth": self.depth,
            "lower_word": self.lower_word,
            "search_floor": self.search_floor,
            "budget_exhausted": self.budget_exhausted,
            "certificate": (
                None if self.certificate is None else self.certificate.to_json()
            ),
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "JsrEstimate":
        certificate = data.get("certificate")
        return cls(
            lower=data["lower"],
            upper=data["upper"],
            depth=data["depth"],
            certificate=(
                None if certificate is None else NormCertificate.from_json(certificate)
            ),
            lower_word=list(data.get("lower_word", [])),
            search_floor=data.get("search_floor", 0.0),
            budget_exhausted=data.get("budget_exhausted", False),
        )


def _certify_any(
    matrix_set: MatrixSet,
    gamma: float,
    half_degrees: Sequence[int],
    limits: Limits,
) -> Tuple[Optional[NormCertificate], bool]:
    """Try each half degree in turn; also report whether a cap was hit"""
    capped = False
    for d in half_degrees:
        try:
            certificate = certify_upper_bound(matrix_set, gamma, d, limits)
        except ExhaustiveLimitError:
            capped = True
            break
        if certificate is not None:
            return certificate, capped
    return None, capped


def jsr_estimate(
    matrix_set: MatrixSet,
    tol: float,
    depth: int = 6,
    half_degrees: Sequence[int] = (1, 2, 3),
    limits: Limits = DEFAULT_LIMITS,
) -> JsrEstimate:
    """Bisect gamma between the product lower bound and the largest spectral
    norm, certifying each candidate with escalating degree.

    A failed candidate only moves the search floor; the reported lower end always
    comes from an actual product, and the upper end from a verified
    certificate."""
    if tol <= 0:
        raise InvalidSearchError(f"Tolerance must be > 0, got {tol}")
    search = search_lower_bound(matrix_set, depth, limits)
    lower = search.value
    exhausted = search.exhausted

    largest = matrix_set.max_norm()
    if largest == 0:
        return JsrEstimate(0.0, 0.0, depth, None, search.word, 0.0, exhausted)

    # The identity Gram matrix at degree 2 certifies the largest spectral norm
    certificate = certify_upper_bound(
        matrix_set, largest * (1 + ACCEPTANCE_SLACK), 1, limits
    )
    upper = certificate.certified_bound if certificate is not None else largest
    floor = lower

    for _ in range(limits.bisection_iterations):
        if upper - floor <= tol:
            break
        gamma = 0.5 * (floor + upper)
        if gamma <= 0:
            break
        found, capped = _certify_any(matrix_set, gamma, half_degrees, limits)
        exhausted = exhausted or capped
        if found is not None and found.certified_bound < upper:
            certificate, upper = found, found.certified_bound
            logging.debug(f"Certified jsr <= {upper} at degree {found.degree}")
        else:
            floor = gamma
    else:
        exhausted = exhausted or upper - floor > tol

    upper = max(upper, lower)
    if upper - lower > tol:
        # the floor closed in on upper but no product reached it
        logging.info(
            f"Products up to length {depth} leave a gap of {upper - lower} > {tol}"
        )
        exhausted = True
    if exhausted:
        logging.warning(
            f"jsr search hit a budget; interval [{lower}, {upper}] may be loose"
        )
    return JsrEstimate(lower, upper, depth, certificate, search.word, floor, exhausted)


class MixingVerdict(str, enum.Enum):
    MIXES = "mixes"
    DOES_NOT_MIX = "does not mix"
    UNDETERMINED = "undetermined"


def verdict_for(lower: float, upper: float) -> MixingVerdict:
    if upper < 1:
        return MixingVerdict.MIXES
    if lower >= 1:
        return MixingVerdict.DOES_NOT_MIX
    return MixingVerdict.UNDETERMINED


@dataclass
class FourierJsr:
    """Per-irreducible jsr estimates of a family of transforms over C[X]"""

    space: Dict[str, Any]
    per_irrep: Dict[str, JsrEstimate]

    @property
    def lower(self) -> float:
        return max((e.lower for e in self.per_irrep.values()), default=0.0)

    @property
    def upper(self) -> float:
        return max((e.upper for e in self.per_irrep.values()), default=0.0)

    @property
    def verdict(self) -> MixingVerdict:
        return verdict_for(self.lower, self.upper)

    @property
    def budget_exhausted(self) -> bool:
        return any(e.budget_exhausted for e in self.per_irrep.values())

    def to_json(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "space": self.space,
            "per_irrep": {shape: e.to_json() for shape, e in self.per_irrep.items()},
            "lower": self.lower,
            "upper": self.upper,
            "verdict": self.verdict.value,
            "budget_exhausted": self.budget_exhausted,
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "FourierJsr":
        return cls(
            space=data["space"],
            per_irrep={
                s: JsrEstimate.from_json(e) for s, e in data["per_irrep"].items()
            },
        )


def transform_set(
    qs: Sequence[Distribution], shape: Partition, limits: Limits = DEFAULT_LIMITS
) -> MatrixSet:
    """Q_1^(lam), ..., Q_m^(lam); class distributions give 1 x 1 scalars"""
    matrices = []
    for q in qs:
        transform = fourier_transform(q, shape, limits)
        if transform.scalar is not None:
            matrices.append(np.array([[transform.scalar]], dtype=complex))
        else:
            matrices.append(transform.to_dense(limits))
    dims = {m.shape[0] for m in matrices}
    if len(dims) > 1:
        # a mix of scalar and matrix transforms: expand the scalars
        dim = max(dims)
        matrices = [m if m.shape[0] == dim else m[0, 0] * np.eye(dim) for m in matrices]
    return MatrixSet(matrices)


def fourier_jsr(
    qs: Sequence[Distribution],
    space: HomogeneousSpace,
    tol: float,
    depth: int = 6,
    half_degrees: Sequence[int] = (1, 2, 3),
    limits: Limits = DEFAULT_LIMITS,
) -> FourierJsr:
    """max over nontrivial irreducibles of C[X] of jsr(Q_1^(lam), ..., Q_m^(lam))"""
    shapes = [lam for lam, _ in nontrivial_components(space)]

    def estimate(shape: Partition) -> JsrEstimate:
        matrix_set = transform_set(qs, shape, limits)
        result = jsr_estimate(matrix_set, tol, depth, half_degrees, limits)
        logging.info(f"jsr at S^{shape}: [{result.lower}, {result.upper}]")
        return result

    threads = thread_count()
    if threads > 1 and len(shapes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            estimates = list(executor.map(estimate, shapes))
    else:
        estimates = [estimate(shape) for shape in shapes]
    return FourierJsr(space.describe(), {str(s): e for s, e in zip(shapes, estimates)})
