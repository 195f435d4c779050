"""
Lie algebra core.

Represents a basis A_1..A_n of skew-Hermitian traceless matrices, derives the
structure constants c^k_ij from the bracket ([A_i, A_j] = c^k_ij A_k) and
materializes the adjoint generators M_i with (M_i)_kj = c^k_ij.

Public indices (generator numbers, structure-constant triplets) are 1-based.
Arrays carry 0-based storage; use `StructureTensor.constant` for 1-based
access.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from loguru import logger

from .config import get_settings
from .errors import BasisValidationError, ClosureError, UnsupportedBasisError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LieBasis:
    """
    Ordered basis of a compact matrix Lie algebra inside su(N).

    Attributes:
        label: Identifier of the basis (built-in label or file stem).
        generators: Complex array of shape (n, N, N).
    """
    label: str
    generators: np.ndarray
    skew_tol: Optional[float] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        generators = np.asarray(self.generators, dtype=complex)
        if generators.ndim != 3 or generators.shape[1] != generators.shape[2] or generators.shape[0] == 0:
            raise BasisValidationError(
                f"generators must form an array of shape (n, N, N), got {generators.shape}"
            )
        object.__setattr__(self, "generators", _frozen(generators))
        self._validate(self.skew_tol if self.skew_tol is not None else get_settings().skew_tol)

    @property
    def dim_defining(self) -> int:
        return self.generators.shape[1]

    @property
    def dim_algebra(self) -> int:
        return self.generators.shape[0]

    @property
    def is_full_algebra(self) -> bool:
        """True when the basis spans all of su(N)."""
        return self.dim_algebra == self.dim_defining ** 2 - 1

    def vectorized(self) -> np.ndarray:
        """Real (2N^2 x n) matrix whose columns are [Re vec(A_mu); Im vec(A_mu)]."""
        flat = self.generators.reshape(self.dim_algebra, -1)
        return np.concatenate([flat.real, flat.imag], axis=1).T

    def _validate(self, tol: float) -> None:
        for position, generator in enumerate(self.generators, start=1):
            skew = np.max(np.abs(generator + generator.conj().T))
            if skew > tol:
                logger.error("Generator is not skew-Hermitian",
                             extra={"basis": self.label, "position": position, "deviation": float(skew)})
                raise BasisValidationError(
                    f"generator {position} of '{self.label}' is not skew-Hermitian (max |G + G^H| = {skew:.3e})"
                )
            trace = abs(np.trace(generator))
            if trace > tol:
                logger.error("Generator is not traceless",
                             extra={"basis": self.label, "position": position, "trace": float(trace)})
                raise BasisValidationError(
                    f"generator {position} of '{self.label}' is not traceless (|tr G| = {trace:.3e})"
                )
        rank = np.linalg.matrix_rank(self.vectorized())
        if rank != self.dim_algebra:
            logger.error("Generators are linearly dependent",
                         extra={"basis": self.label, "rank": int(rank), "n": self.dim_algebra})
            raise BasisValidationError(
                f"generators of '{self.label}' are linearly dependent over the reals (rank {rank} < {self.dim_algebra})"
            )


@dataclass(frozen=True)
class StructureTensor:
    """
    Structure constants of a basis.

    Attributes:
        array: Real array of shape (n, n, n); array[k, i, j] = c^{k+1}_{i+1, j+1}.
        label: Label of the basis the constants were derived from.
    """
    array: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        array = np.asarray(self.array, dtype=float)
        if array.ndim != 3 or len(set(array.shape)) != 1:
            raise ValueError(f"structure tensor must have shape (n, n, n), got {array.shape}")
        asym = np.max(np.abs(array + array.transpose(0, 2, 1))) if array.size else 0.0
        if asym > get_settings().structure_tol:
            raise ValueError(f"structure tensor is not antisymmetric in its lower indices (deviation {asym:.3e})")
        object.__setattr__(self, "array", _frozen(array))

    @property
    def n(self) -> int:
        return self.array.shape[0]

    def constant(self, k: int, i: int, j: int) -> float:
        """c^k_ij with 1-based indices."""
        for index in (k, i, j):
            _check_index(index, self.n)
        return float(self.array[k - 1, i - 1, j - 1])

    def nonzero_triplets(self, upper_only: bool = False) -> List[Tuple[int, int, int, float]]:
        """
        Sparse listing of the nonzero constants.

        Args:
            upper_only: Keep only i < j (the rest follows by antisymmetry).

        Returns:
            List of (k, i, j, value) with 1-based indices, sorted by (i, j, k).
        """
        triplets = []
        for k, i, j in zip(*np.nonzero(self.array)):
            if upper_only and not i < j:
                continue
            triplets.append((int(k) + 1, int(i) + 1, int(j) + 1, float(self.array[k, i, j])))
        return sorted(triplets, key=lambda item: (item[1], item[2], item[0]))


@dataclass(frozen=True)
class AdjointGenerator:
    """ad_{A_i} in basis coordinates: (M_i)[k][j] = c^k_ij."""
    index: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.asarray(self.matrix, dtype=float)))


def _check_index(index: int, n: int) -> None:
    if not 1 <= index <= n:
        raise IndexError(f"generator index {index} out of range 1..{n}")


# ---------------------------------------------------------------------------
# Built-in bases
# ---------------------------------------------------------------------------

def _unit(N: int, row: int, col: int) -> np.ndarray:
    matrix = np.zeros((N, N), dtype=complex)
    matrix[row - 1, col - 1] = 1.0
    return matrix


def _su2_pauli_half() -> np.ndarray:
    # A_1 = (i/2) sigma_1, A_3 = (i/2) sigma_3 and A_2 = -(i/2) sigma_2, so that
    # c^3_12 = c^1_23 = c^2_31 = +1 (right-handed ordering).
    a1 = 0.5 * np.array([[0, 1j], [1j, 0]])
    a2 = 0.5 * np.array([[0, -1], [1, 0]], dtype=complex)
    a3 = 0.5 * np.array([[1j, 0], [0, -1j]])
    return np.array([a1, a2, a3])


def _su3_cartan() -> np.ndarray:
    N = 3
    ih1 = 1j * (_unit(N, 1, 1) - _unit(N, 2, 2))
    ih2 = 1j * (_unit(N, 2, 2) - _unit(N, 3, 3))

    def x(j: int, k: int) -> np.ndarray:
        return _unit(N, j, k) - _unit(N, k, j)

    def y(j: int, k: int) -> np.ndarray:
        return 1j * (_unit(N, j, k) + _unit(N, k, j))

    return np.array([ih1, ih2, x(1, 2), y(1, 2), x(1, 3), y(1, 3), x(2, 3), y(2, 3)])


def gellmann_matrices(N: int) -> np.ndarray:
    """
    Generalized Gell-Mann matrices of su(N) in the standard ordering.

    For each column k = 2..N: the symmetric and antisymmetric pairs (j, k),
    j < k, followed by the k-th diagonal matrix. For N = 3 this reproduces
    lambda_1..lambda_8.

    Args:
        N: Dimension of the defining representation (N >= 2)

    Returns:
        Hermitian array of shape (N^2 - 1, N, N)
    """
    if N < 2:
        raise ValueError(f"su(N) needs N >= 2, got {N}")
    matrices = []
    for k in range(2, N + 1):
        for j in range(1, k):
            matrices.append(_unit(N, j, k) + _unit(N, k, j))
            matrices.append(-1j * _unit(N, j, k) + 1j * _unit(N, k, j))
        level = k - 1
        diagonal = sum((_unit(N, m, m) for m in range(1, level + 1)), np.zeros((N, N), dtype=complex))
        diagonal = diagonal - level * _unit(N, level + 1, level + 1)
        matrices.append(np.sqrt(2.0 / (level * (level + 1))) * diagonal)
    return np.array(matrices)


_GELLMANN_LABEL = re.compile(r"^su(\d+)_gellmann$")
# largest N whose adjoint beta systems stay below the conditioning limit
MAX_GELLMANN_N = 4

BUILTIN_BASES: Dict[str, str] = {
    "su2_pauli_half": "A_j = (i/2) sigma_j with A_2 sign-flipped to the right-handed orientation",
    "su3_cartan": "iH1, iH2, X12, Y12, X13, Y13, X23, Y23 (compact real form of A_2)",
    "suN_gellmann": "A_j = -(i/2) lambda_j, generalized Gell-Mann matrices, 2 <= N <= 4",
}


def builtin_basis(label: str) -> LieBasis:
    """
    Return one of the built-in bases.

    Args:
        label: `su2_pauli_half`, `su3_cartan` or `su<N>_gellmann` (2 <= N <= 4)

    Returns:
        LieBasis with the generators in their documented ordering

    Raises:
        UnsupportedBasisError: If the label is unknown
    """
    if label == "su2_pauli_half":
        return LieBasis(label, _su2_pauli_half())
    if label == "su3_cartan":
        return LieBasis(label, _su3_cartan())
    match = _GELLMANN_LABEL.match(label)
    if match and 2 <= int(match.group(1)) <= MAX_GELLMANN_N:
        return LieBasis(label, -0.5j * gellmann_matrices(int(match.group(1))))
    logger.error("Unsupported basis requested", extra={"label": label})
    raise UnsupportedBasisError(label, supported=list(BUILTIN_BASES))


# ---------------------------------------------------------------------------
# Structure constants
# ---------------------------------------------------------------------------

def _real_stack(flat: np.ndarray) -> np.ndarray:
    """Columns [Re; Im] of a (count, N*N) complex array."""
    return np.concatenate([flat.real, flat.imag], axis=1).T


def _brackets(basis: LieBasis) -> np.ndarray:
    """All commutators [A_i, A_j], shape (n, n, N, N)."""
    products = np.einsum("iab,jbc->ijac", basis.generators, basis.generators)
    return products - products.transpose(1, 0, 2, 3)


def _worst_pair(residuals: np.ndarray) -> Tuple[Tuple[int, int], float]:
    worst = np.unravel_index(np.argmax(residuals), residuals.shape)
    return (int(worst[0]) + 1, int(worst[1]) + 1), float(residuals[worst])


def compute_structure_tensor(
    basis: LieBasis,
    closure_error_tol: Optional[float] = None,
    snap_tol: Optional[float] = None,
) -> StructureTensor:
    """
    Derive c^k_ij by solving the vectorized bracket against the vectorized basis.

    The basis need not be trace-orthogonal: every bracket is solved in the
    least-squares sense and the residual is checked.

    Args:
        basis: Validated basis
        closure_error_tol: Maximum Frobenius residual of any bracket
        snap_tol: Constants within this distance of an integer are snapped

    Returns:
        StructureTensor with exact antisymmetry in the lower indices

    Raises:
        ClosureError: If some bracket leaves the span of the basis, or the
            returned constants miss the structural closure tolerance
    """
    settings = get_settings()
    closure_error_tol = settings.closure_error_tol if closure_error_tol is None else closure_error_tol
    snap_tol = settings.structure_snap_tol if snap_tol is None else snap_tol
    n = basis.dim_algebra

    design = basis.vectorized()
    targets = _real_stack(_brackets(basis).reshape(n * n, -1))
    coefficients, *_ = scipy.linalg.lstsq(design, targets)
    residuals = np.linalg.norm(design @ coefficients - targets, axis=0).reshape(n, n)

    pair, worst_residual = _worst_pair(residuals)
    if worst_residual > closure_error_tol:
        logger.error("Basis not closed under bracket", extra={"pair": pair, "residual": worst_residual})
        raise ClosureError(pair, worst_residual)

    constants = coefficients.reshape(n, n, n)
    rounded = np.round(constants)
    snapped = np.abs(constants - rounded) <= snap_tol
    constants = np.where(snapped, rounded, constants)
    constants = 0.5 * (constants - constants.transpose(0, 2, 1))
    tensor = StructureTensor(constants, label=basis.label)

    # the returned constants must reproduce every bracket to the structural tolerance
    pair, final_residual = _worst_pair(closure_residuals(basis, tensor))
    if final_residual > settings.structure_tol:
        logger.error("Structure constants miss the closure tolerance",
                     extra={"pair": pair, "residual": final_residual, "tolerance": settings.structure_tol})
        raise ClosureError(pair, final_residual)

    logger.info("Structure tensor derived", extra={
        "basis": basis.label,
        "n": n,
        "nonzero": int(np.count_nonzero(constants)),
        "max_closure_residual": final_residual,
    })
    return tensor


def closure_residuals(basis: LieBasis, tensor: StructureTensor) -> np.ndarray:
    """
    Frobenius norms ||[A_i, A_j] - sum_k c^k_ij A_k|| for every pair.

    Returns:
        Array of shape (n, n), 0-based storage
    """
    reconstructed = np.einsum("kij,kab->ijab", tensor.array, basis.generators)
    return np.linalg.norm(_brackets(basis) - reconstructed, axis=(2, 3))


def jacobi_residual(tensor: StructureTensor) -> float:
    """Largest violation of the Jacobi identity over all index quadruples."""
    c = tensor.array
    jacobi = (
        np.einsum("mij,lmk->ijkl", c, c)
        + np.einsum("mjk,lmi->ijkl", c, c)
        + np.einsum("mki,lmj->ijkl", c, c)
    )
    return float(np.max(np.abs(jacobi))) if jacobi.size else 0.0


# ---------------------------------------------------------------------------
# Adjoint representation
# ---------------------------------------------------------------------------

def adjoint_generator(tensor: StructureTensor, i: int) -> AdjointGenerator:
    """
    Materialize M_i = ad_{A_i}.

    Args:
        tensor: Structure constants
        i: 1-based generator index

    Returns:
        AdjointGenerator whose matrix is a copy of c[:, i, :]
    """
    _check_index(i, tensor.n)
    return AdjointGenerator(index=i, matrix=tensor.array[:, i - 1, :].copy())


def _coords(vector: Sequence[float], n: int, name: str) -> np.ndarray:
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (n,):
        raise ValueError(f"{name} must have length {n}, got shape {vector.shape}")
    return vector


def adjoint_matrix(tensor: StructureTensor, d: Sequence[float]) -> np.ndarray:
    """ad_D = sum_nu d^nu M_nu as an n x n matrix."""
    d = _coords(d, tensor.n, "d")
    return np.tensordot(d, tensor.array, axes=([0], [1]))


def adjoint_action(tensor: StructureTensor, d: Sequence[float], b: Sequence[float]) -> np.ndarray:
    """
    Coordinates of [D, B] for D = d^mu A_mu and B = b^mu A_mu.

    Args:
        tensor: Structure constants
        d: Coordinates of D
        b: Coordinates of B

    Returns:
        Coordinates of the bracket, sum_nu d^nu M_nu b
    """
    b = _coords(b, tensor.n, "b")
    return adjoint_matrix(tensor, d) @ b


def algebra_element(basis: LieBasis, b: Sequence[float]) -> np.ndarray:
    """The matrix sum_mu b^mu A_mu."""
    b = _coords(b, basis.dim_algebra, "b")
    return np.einsum("m,mab->ab", b, basis.generators)


def algebra_coordinates(basis: LieBasis, matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Coordinates of an algebra element given in the defining representation.

    Args:
        basis: Basis to expand in
        matrix: N x N complex matrix

    Returns:
        (coordinates, Frobenius residual of the expansion)
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (basis.dim_defining,) * 2:
        raise ValueError(f"expected a {basis.dim_defining}x{basis.dim_defining} matrix, got {matrix.shape}")
    target = _real_stack(matrix.reshape(1, -1))[:, 0]
    design = basis.vectorized()
    coordinates, *_ = scipy.linalg.lstsq(design, target)
    return coordinates, float(np.linalg.norm(design @ coordinates - target))
