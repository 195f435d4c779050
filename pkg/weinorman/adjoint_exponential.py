"""
Closed-form exponentials of adjoint generators.

e^{gamma M} is written as a polynomial of degree n-1 in M (Cayley-Hamilton):

    e^{gamma M} = beta_0 I + beta_1 M + ... + beta_{n-1} M^{n-1}

The beta_k solve the confluent interpolation conditions

    d^j/ds^j [sum_k beta_k s^k] (s_i) = gamma^j e^{gamma s_i},  j < m_i

over the distinct eigenvalues s_i of M with multiplicities m_i. The
interpolation matrix does not depend on gamma, so `AdjointExponentialTable`
factors it once per generator.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from loguru import logger

from .algebra_core import AdjointGenerator, StructureTensor, adjoint_generator
from .config import get_settings
from .errors import BetaSolveError, SpectrumError

MatrixLike = Union[np.ndarray, AdjointGenerator]


@dataclass(frozen=True)
class Spectrum:
    """
    Characteristic data of an n x n matrix.

    Attributes:
        char_poly: a_0..a_{n-1} with M^n = a_0 I + a_1 M + ... + a_{n-1} M^{n-1}.
        roots: Distinct eigenvalues with multiplicities, multiplicities summing to n.
    """
    char_poly: np.ndarray
    roots: Tuple[Tuple[complex, int], ...]

    @property
    def n(self) -> int:
        return len(self.char_poly)

    @property
    def monic(self) -> np.ndarray:
        """p_0..p_{n-1} of det(sI - M) = s^n + p_{n-1} s^{n-1} + ... + p_0."""
        return -np.asarray(self.char_poly, dtype=float)

    def eigenvalues(self) -> List[complex]:
        """Roots repeated according to multiplicity."""
        return [root for root, multiplicity in self.roots for _ in range(multiplicity)]

    def evaluate(self, s: complex, derivative: int = 0) -> complex:
        """Value of the monic characteristic polynomial (or a derivative) at s."""
        return complex(np.polyval(np.polyder(_descending(self.monic), derivative), s))

    def residuals(self) -> List[float]:
        return [abs(self.evaluate(root)) for root, _ in self.roots]


@dataclass(frozen=True)
class BetaSet:
    """Coefficients of e^{gamma M} in the basis I, M, ..., M^{n-1}."""
    gamma: float
    beta: np.ndarray


def _descending(monic: np.ndarray) -> np.ndarray:
    return np.concatenate([[1.0], np.asarray(monic)[::-1]])


def _as_matrix(M: MatrixLike) -> np.ndarray:
    matrix = M.matrix if isinstance(M, AdjointGenerator) else np.asarray(M)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    return matrix


def characteristic_polynomial(M: MatrixLike, snap_tol: Optional[float] = None) -> np.ndarray:
    """
    Cayley-Hamilton coefficients of M via the Faddeev-LeVerrier recursion.

    Args:
        M: Square real matrix (or AdjointGenerator)
        snap_tol: Coefficients within this distance of an integer are rounded

    Returns:
        a_0..a_{n-1}, so that det(sI - M) = s^n - a_{n-1} s^{n-1} - ... - a_0

    Raises:
        ValueError: If M is not square
    """
    matrix = _as_matrix(M).astype(float)
    snap_tol = get_settings().char_poly_snap_tol if snap_tol is None else snap_tol
    n = matrix.shape[0]
    identity = np.eye(n)
    monic = np.zeros(n + 1)
    monic[n] = 1.0
    running = np.zeros((n, n))
    for k in range(1, n + 1):
        running = matrix @ running + monic[n - k + 1] * identity
        monic[n - k] = -np.trace(matrix @ running) / k

    rounded = np.round(monic)
    monic = np.where(np.abs(monic - rounded) <= snap_tol, rounded, monic)
    return -monic[:n] + 0.0


def _cluster(values: np.ndarray, tol: float) -> List[Tuple[complex, int]]:
    clusters: List[List[complex]] = []
    for value in sorted(values, key=lambda z: (z.imag, z.real)):
        for members in clusters:
            if abs(value - np.mean(members)) < tol:
                members.append(value)
                break
        else:
            clusters.append([value])
    return [(complex(np.mean(members)), len(members)) for members in clusters]


def _polish(root: complex, multiplicity: int, descending: np.ndarray) -> complex:
    # Newton on the (m-1)-th derivative, where the root is simple
    target = np.polyder(descending, multiplicity - 1) if multiplicity > 1 else descending
    slope = np.polyder(target)
    value = np.polyval(target, root)
    derivative = np.polyval(slope, root)
    if derivative == 0:
        return root
    candidate = root - value / derivative
    if abs(np.polyval(target, candidate)) < abs(value):
        return complex(candidate)
    return root


def _sort_key(root: complex) -> Tuple[float, float, float]:
    return (round(abs(root), 9), -root.imag, root.real)


def spectrum(M: MatrixLike, adjoint: bool = True) -> Spectrum:
    """
    Distinct eigenvalues of M with multiplicities.

    Eigenvalues come from the Hessenberg form of M, are clustered at the
    configured tolerance and polished once against the characteristic
    polynomial. With `adjoint` set, real parts must vanish and nonzero roots
    must come in conjugate pairs (compact algebras).

    Args:
        M: Square real matrix (or AdjointGenerator)
        adjoint: Enforce the compact-adjoint structure of the roots

    Returns:
        Spectrum

    Raises:
        SpectrumError: If the roots violate the requested structure or do not
            annihilate the characteristic polynomial
    """
    settings = get_settings()
    matrix = _as_matrix(M).astype(float)
    char_poly = characteristic_polynomial(matrix)
    descending = _descending(-char_poly)

    raw = scipy.linalg.eigvals(scipy.linalg.hessenberg(matrix))
    roots = [(_polish(root, multiplicity, descending), multiplicity)
             for root, multiplicity in _cluster(raw, settings.cluster_tol)]
    logger.debug("Clustered eigenvalues", extra={"raw": len(raw), "distinct": len(roots)})

    if adjoint:
        roots = _enforce_compact(roots, settings.eig_real_tol, settings.cluster_tol)

    roots = sorted(roots, key=lambda item: _sort_key(item[0]))
    residuals = [abs(np.polyval(descending, root)) for root, _ in roots]
    if max(residuals, default=0.0) > settings.char_residual_tol:
        logger.error("Eigenvalues do not annihilate the characteristic polynomial",
                     extra={"residuals": residuals})
        raise SpectrumError(
            f"characteristic residual {max(residuals):.3e} exceeds {settings.char_residual_tol:.1e}",
            residuals=residuals,
        )
    return Spectrum(char_poly=char_poly, roots=tuple(roots))


def _enforce_compact(roots: List[Tuple[complex, int]], real_tol: float, pair_tol: float) -> List[Tuple[complex, int]]:
    cleaned: List[Tuple[complex, int]] = []
    for root, multiplicity in roots:
        if abs(root.real) > real_tol:
            logger.error("Adjoint eigenvalue has a real part", extra={"root": str(root)})
            raise SpectrumError(f"eigenvalue {root:.6g} has real part {root.real:.3e} (expected purely imaginary)",
                                residuals=[abs(root.real)])
        imag = 0.0 if abs(root.imag) < pair_tol else root.imag
        cleaned.append((complex(0.0, imag), multiplicity))

    upper = [(root, m) for root, m in cleaned if root.imag > 0]
    lower = [(root, m) for root, m in cleaned if root.imag < 0]
    paired: List[Tuple[complex, int]] = [(root, m) for root, m in cleaned if root.imag == 0]
    zero_multiplicity = sum(m for _, m in paired)
    paired = [(0j, zero_multiplicity)] if zero_multiplicity else []
    for root, multiplicity in upper:
        partner = [item for item in lower if abs(item[0] - root.conjugate()) < pair_tol and item[1] == multiplicity]
        if not partner:
            logger.error("Eigenvalue without conjugate partner", extra={"root": str(root)})
            raise SpectrumError(f"eigenvalue {root:.6g} (multiplicity {multiplicity}) has no conjugate partner")
        lower.remove(partner[0])
        imag = 0.5 * (root.imag - partner[0][0].imag)
        paired.extend([(complex(0.0, imag), multiplicity), (complex(0.0, -imag), multiplicity)])
    if lower:
        raise SpectrumError(f"unpaired eigenvalues {[str(root) for root, _ in lower]}")
    return paired


# ---------------------------------------------------------------------------
# Beta coefficients
# ---------------------------------------------------------------------------

def confluent_vandermonde(spec: Spectrum) -> np.ndarray:
    """
    Interpolation matrix in Taylor form: row (s_i, j) holds (1/j!) d^j/ds^j s^k
    at s_i for k = 0..n-1.
    """
    n = spec.n
    rows = []
    for root, multiplicity in spec.roots:
        for order in range(multiplicity):
            row = np.zeros(n, dtype=complex)
            for k in range(order, n):
                row[k] = math.comb(k, order) * root ** (k - order)
            rows.append(row)
    return np.array(rows).reshape(n, n)


def _confluent_rhs(spec: Spectrum, gamma: float) -> np.ndarray:
    return np.array([gamma ** order / math.factorial(order) * np.exp(gamma * root)
                     for root, multiplicity in spec.roots for order in range(multiplicity)], dtype=complex)


class ConfluentSolver:
    """LU-factored confluent system of one spectrum, reused for every gamma."""

    def __init__(self, spec: Spectrum, max_condition: Optional[float] = None, imag_tol: Optional[float] = None):
        settings = get_settings()
        self.spec = spec
        self.imag_tol = settings.beta_imag_tol if imag_tol is None else imag_tol
        max_condition = settings.beta_max_condition if max_condition is None else max_condition

        matrix = confluent_vandermonde(spec)
        self.condition = float(np.linalg.cond(matrix)) if spec.n else 1.0
        if not np.isfinite(self.condition) or self.condition > max_condition:
            logger.error("Confluent system is singular", extra={"condition": self.condition})
            raise BetaSolveError(
                f"confluent interpolation system is singular (condition {self.condition:.3e})",
                condition=self.condition,
            )
        self._lu = scipy.linalg.lu_factor(matrix)

    def solve(self, gamma: float) -> BetaSet:
        n = self.spec.n
        if gamma == 0:
            return BetaSet(gamma=0.0, beta=np.eye(n)[0])
        solution = scipy.linalg.lu_solve(self._lu, _confluent_rhs(self.spec, gamma))
        imag_residue = float(np.max(np.abs(solution.imag)))
        if imag_residue > self.imag_tol:
            logger.error("Beta coefficients are not real", extra={"gamma": gamma, "imag_residue": imag_residue})
            raise BetaSolveError(
                f"beta coefficients at gamma={gamma} carry imaginary residue {imag_residue:.3e}",
                condition=self.condition,
                imag_residue=imag_residue,
            )
        return BetaSet(gamma=float(gamma), beta=solution.real.copy())


def beta_coefficients(spec: Spectrum, gamma: float) -> BetaSet:
    """
    Solve the confluent interpolation conditions for one gamma.

    Args:
        spec: Spectrum of the adjoint generator
        gamma: Chart parameter

    Returns:
        BetaSet with beta_0..beta_{n-1}

    Raises:
        BetaSolveError: Singular system or non-real solution
    """
    return ConfluentSolver(spec).solve(gamma)


def beta_from_recurrence(char_poly: Sequence[float], gamma: float, terms: Optional[int] = None) -> np.ndarray:
    """
    Truncated-series betas from the linear recurrence of M^j.

    alpha_j is the coefficient of M^{n-1} in M^j reduced by Cayley-Hamilton;
    the coefficient of M^k follows from shifts of the same sequence.

    Args:
        char_poly: a_0..a_{n-1}
        gamma: Chart parameter
        terms: Number of series terms (default from settings)

    Returns:
        beta_0..beta_{n-1}
    """
    a = np.asarray(char_poly, dtype=float)
    n = len(a)
    terms = get_settings().recurrence_terms if terms is None else terms
    alpha = np.zeros(terms + 2 * n)
    alpha[n - 1] = 1.0
    for j in range(n - 1, len(alpha) - 1):
        alpha[j + 1] = sum(a[n - k - 1] * alpha[j - k] for k in range(n) if j - k >= 0)

    weights = np.array([gamma ** j / math.factorial(j) for j in range(terms)])
    beta = np.zeros(n)
    for k in range(n):
        series = np.array([
            alpha[j + n - k - 1] - sum(a[l] * alpha[j + l - k - 1] for l in range(k + 1, n))
            for j in range(terms)
        ])
        beta[k] = weights @ series
    return beta


# ---------------------------------------------------------------------------
# Exponentials
# ---------------------------------------------------------------------------

def matrix_powers(M: np.ndarray) -> np.ndarray:
    """Stack I, M, ..., M^{n-1} by repeated multiplication."""
    n = M.shape[0]
    powers = np.empty((n, n, n))
    powers[0] = np.eye(n)
    for k in range(1, n):
        powers[k] = powers[k - 1] @ M
    return powers


def adjoint_power(tensor: StructureTensor, i: int, l: int) -> np.ndarray:
    """
    l-th power of M_i as a chain of structure-constant contractions.

    (M_i^l)_kj = c^k_{i mu_1} c^{mu_1}_{i mu_2} ... c^{mu_{l-1}}_{ij}
    """
    if l < 0:
        raise ValueError(f"power must be non-negative, got {l}")
    adjoint_generator(tensor, i)
    result = np.eye(tensor.n)
    for _ in range(l):
        result = np.einsum("km,mj->kj", tensor.array[:, i - 1, :], result)
    return result


def exp_adjoint(M: MatrixLike, spec: Spectrum, gamma: float) -> np.ndarray:
    """
    e^{gamma M} as sum_k beta_k M^k.

    Args:
        M: Adjoint generator
        spec: Spectrum of M
        gamma: Chart parameter

    Returns:
        Real n x n automorphism matrix
    """
    matrix = _as_matrix(M)
    betas = beta_coefficients(spec, gamma)
    return np.tensordot(betas.beta, matrix_powers(matrix), axes=1)


class AdjointExponentialTable:
    """
    Read-only per-tensor cache of adjoint generators, spectra, powers and
    factored confluent systems.
    """

    def __init__(self, tensor: StructureTensor):
        self.tensor = tensor
        self.n = tensor.n
        self._generators: Dict[int, AdjointGenerator] = {}
        self._spectra: Dict[int, Spectrum] = {}
        self._powers: Dict[int, np.ndarray] = {}
        self._solvers: Dict[int, ConfluentSolver] = {}
        for i in range(1, self.n + 1):
            generator = adjoint_generator(tensor, i)
            spec = spectrum(generator)
            self._generators[i] = generator
            self._spectra[i] = spec
            self._powers[i] = matrix_powers(generator.matrix)
            self._solvers[i] = ConfluentSolver(spec)

        logger.info("AdjointExponentialTable initialized", extra={
            "basis": tensor.label,
            "n": self.n,
            "max_condition": max((solver.condition for solver in self._solvers.values()), default=1.0),
        })

    def _check(self, i: int) -> None:
        if i not in self._generators:
            raise IndexError(f"generator index {i} out of range 1..{self.n}")

    def generator(self, i: int) -> AdjointGenerator:
        self._check(i)
        return self._generators[i]

    def spectrum(self, i: int) -> Spectrum:
        self._check(i)
        return self._spectra[i]

    def beta(self, i: int, gamma: float) -> BetaSet:
        self._check(i)
        return self._solvers[i].solve(gamma)

    def exp(self, i: int, gamma: float) -> np.ndarray:
        """e^{gamma ad_{A_i}}."""
        return np.tensordot(self.beta(i, gamma).beta, self._powers[i], axes=1)

    def product(self, factors: Sequence[Tuple[int, float]]) -> np.ndarray:
        """
        Ordered product e^{g_1 ad_{A_{i_1}}} ... e^{g_m ad_{A_{i_m}}}.

        Args:
            factors: (1-based generator index, gamma) pairs, left to right

        Returns:
            Real n x n matrix (identity for an empty list)
        """
        result = np.eye(self.n)
        for index, gamma in factors:
            result = result @ self.exp(index, gamma)
        return result


def exp_adjoint_product(table: AdjointExponentialTable, factors: Sequence[Tuple[int, float]]) -> np.ndarray:
    """Ordered product of adjoint exponentials; see `AdjointExponentialTable.product`."""
    return table.product(factors)
