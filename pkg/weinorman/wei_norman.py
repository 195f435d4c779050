"""
Wei-Norman matrix and parameter ODE.

For a chart sigma = (sigma(1), ..., sigma(n)) the group element is written
as exp(gamma^1 A_sigma(1)) ... exp(gamma^n A_sigma(n)). With right-invariant
generators, U' = (u^mu A_mu) U, the parameters obey

    u = Xi(gamma) gamma',   column j of Xi = (prod_{i<j} e^{gamma^i ad A_sigma(i)}) e_sigma(j)

so gamma' = Xi^{-1} u wherever det Xi does not vanish.
"""

from dataclasses import dataclass
from threading import Lock
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize
from loguru import logger

from .adjoint_exponential import AdjointExponentialTable
from .algebra_core import LieBasis, StructureTensor
from .config import get_settings
from .errors import ChartSingularityError, WeiNormanError


@dataclass(frozen=True)
class ChartSequence:
    """
    Ordered 1-based generator indices of a product-of-exponentials chart.

    Repeats are allowed, e.g. (3, 2, 3) for ZYZ Euler angles on su(2).
    """
    indices: Tuple[int, ...]
    label: str = "custom"

    def __post_init__(self):
        indices = tuple(int(index) for index in self.indices)
        if not indices:
            raise ValueError("chart needs at least one generator index")
        if any(index < 1 for index in indices):
            raise ValueError(f"chart indices are 1-based, got {indices}")
        object.__setattr__(self, "indices", indices)

    def __len__(self) -> int:
        return len(self.indices)

    @classmethod
    def canonical(cls, n: int) -> "ChartSequence":
        return cls(tuple(range(1, n + 1)), label="canonical")

    @classmethod
    def zyz(cls) -> "ChartSequence":
        return cls((3, 2, 3), label="zyz")

    @classmethod
    def parse(cls, text: str) -> "ChartSequence":
        """Parse "3,2,3" (or the names `canonical:<n>` / `zyz`)."""
        text = text.strip()
        if text.lower() == "zyz":
            return cls.zyz()
        if text.lower().startswith("canonical:"):
            return cls.canonical(int(text.split(":", 1)[1]))
        try:
            indices = tuple(int(part) for part in text.split(",") if part.strip())
        except ValueError as exc:
            raise ValueError(f"chart must be a comma-separated list of integers, got '{text}'") from exc
        return cls(indices)

    def validate(self, n: int) -> None:
        """Check length and index range against an algebra of dimension n."""
        if len(self.indices) != n:
            raise ValueError(f"chart {self.indices} has length {len(self.indices)}, algebra dimension is {n}")
        out_of_range = [index for index in self.indices if index > n]
        if out_of_range:
            raise ValueError(f"chart indices {out_of_range} out of range 1..{n}")

    def to_text(self) -> str:
        return ",".join(str(index) for index in self.indices)


@dataclass(frozen=True)
class XiMatrix:
    """Xi evaluated at one point of the chart."""
    gamma: np.ndarray
    matrix: np.ndarray
    det: float


def _lu_determinant(lu: np.ndarray, piv: np.ndarray) -> float:
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return float((-1.0) ** swaps * np.prod(np.diag(lu)))


def _gamma_vector(gamma: Sequence[float], n: int, name: str = "gamma") -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (n,):
        raise ValueError(f"{name} must have length {n}, got shape {gamma.shape}")
    return gamma


class WeiNormanContext:
    """
    Immutable per-(tensor, chart) context.

    Holds the adjoint-exponential table of the tensor and evaluates Xi, its
    determinant, the parameter ODE right-hand side and the forward map.
    """

    def __init__(
        self,
        tensor: StructureTensor,
        chart: ChartSequence,
        singularity_threshold: Optional[float] = None,
        table: Optional[AdjointExponentialTable] = None,
    ):
        chart.validate(tensor.n)
        self.tensor = tensor
        self.chart = chart
        self.n = tensor.n
        self.singularity_threshold = (
            get_settings().singularity_threshold if singularity_threshold is None else singularity_threshold
        )
        self.table = table if table is not None else AdjointExponentialTable(tensor)
        self._det_origin = self.det(np.zeros(self.n))

        logger.info("WeiNormanContext initialized", extra={
            "basis": tensor.label,
            "chart": chart.to_text(),
            "singularity_threshold": self.singularity_threshold,
            "det_origin": self._det_origin,
        })

    @property
    def singular_at_origin(self) -> bool:
        """True when the chart cannot be inverted at gamma = 0 (e.g. ZYZ)."""
        return abs(self._det_origin) <= self.singularity_threshold

    def xi_array(self, gamma: Sequence[float]) -> np.ndarray:
        gamma = _gamma_vector(gamma, self.n)
        columns = np.empty((self.n, self.n))
        running = np.eye(self.n)
        for j, (index, value) in enumerate(zip(self.chart.indices, gamma)):
            columns[:, j] = running[:, index - 1]
            if j < self.n - 1:
                running = running @ self.table.exp(index, value)
        return columns

    def _factor(self, gamma: Sequence[float]) -> Tuple[np.ndarray, Tuple[np.ndarray, np.ndarray], float]:
        matrix = self.xi_array(gamma)
        lu, piv = scipy.linalg.lu_factor(matrix, check_finite=False)
        return matrix, (lu, piv), _lu_determinant(lu, piv)

    def xi(self, gamma: Sequence[float]) -> XiMatrix:
        gamma = _gamma_vector(gamma, self.n)
        matrix, _, det = self._factor(gamma)
        return XiMatrix(gamma=gamma.copy(), matrix=matrix, det=det)

    def det(self, gamma: Sequence[float]) -> float:
        return self._factor(gamma)[2]

    def rhs(self, gamma: Sequence[float], u: Sequence[float], t: Optional[float] = None) -> np.ndarray:
        """
        gamma' = Xi(gamma)^{-1} u via an LU solve.

        Raises:
            ChartSingularityError: If |det Xi| <= singularity threshold
        """
        gamma = _gamma_vector(gamma, self.n)
        u = _gamma_vector(u, self.n, "u")
        _, factors, det = self._factor(gamma)
        if abs(det) <= self.singularity_threshold:
            logger.error("Chart singularity reached", extra={"gamma": gamma.tolist(), "det": det, "t": t})
            raise ChartSingularityError(gamma, det, t=t)
        return scipy.linalg.lu_solve(factors, u, check_finite=False)

    def rhs_with_det(self, gamma: Sequence[float], u: Sequence[float], t: Optional[float] = None) -> Tuple[np.ndarray, float]:
        """Like `rhs` but also returns det Xi(gamma), factoring Xi once."""
        gamma = _gamma_vector(gamma, self.n)
        u = _gamma_vector(u, self.n, "u")
        _, factors, det = self._factor(gamma)
        if abs(det) <= self.singularity_threshold:
            logger.error("Chart singularity reached", extra={"gamma": gamma.tolist(), "det": det, "t": t})
            raise ChartSingularityError(gamma, det, t=t)
        return scipy.linalg.lu_solve(factors, u, check_finite=False), det

    def forward(self, gamma: Sequence[float], gamma_dot: Sequence[float]) -> np.ndarray:
        """u = Xi(gamma) gamma'."""
        return self.xi_array(gamma) @ _gamma_vector(gamma_dot, self.n, "gamma_dot")


# Contexts own an AdjointExponentialTable; reuse tables and contexts across the functional API.
_CACHE_LOCK = Lock()
_TABLE_CACHE: Dict[int, Tuple[StructureTensor, AdjointExponentialTable]] = {}
_CONTEXT_CACHE: Dict[Tuple[int, ChartSequence, Optional[float]], WeiNormanContext] = {}
_TABLE_CACHE_SIZE = 8


def table_for(tensor: StructureTensor) -> AdjointExponentialTable:
    """Shared AdjointExponentialTable for a tensor instance."""
    with _CACHE_LOCK:
        cached = _TABLE_CACHE.get(id(tensor))
        if cached is not None and cached[0] is tensor:
            return cached[1]
        table = AdjointExponentialTable(tensor)
        if len(_TABLE_CACHE) >= _TABLE_CACHE_SIZE:
            evicted = next(iter(_TABLE_CACHE))
            _TABLE_CACHE.pop(evicted)
            for key in [key for key in _CONTEXT_CACHE if key[0] == evicted]:
                _CONTEXT_CACHE.pop(key)
        _TABLE_CACHE[id(tensor)] = (tensor, table)
        return table


def context_for(
    tensor: StructureTensor,
    chart: ChartSequence,
    singularity_threshold: Optional[float] = None,
) -> WeiNormanContext:
    """Shared WeiNormanContext for a tensor instance, chart and threshold."""
    key = (id(tensor), chart, singularity_threshold)
    with _CACHE_LOCK:
        context = _CONTEXT_CACHE.get(key)
        if context is not None and context.tensor is tensor:
            return context
    context = WeiNormanContext(tensor, chart, singularity_threshold, table=table_for(tensor))
    with _CACHE_LOCK:
        return _CONTEXT_CACHE.setdefault(key, context)


def xi_matrix(tensor: StructureTensor, chart: ChartSequence, gamma: Sequence[float]) -> XiMatrix:
    """
    Assemble Xi(gamma) column by column.

    Args:
        tensor: Structure constants
        chart: Chart sequence of length n
        gamma: Chart parameters

    Returns:
        XiMatrix with the LU determinant
    """
    return context_for(tensor, chart).xi(gamma)


def xi_determinant(xi: XiMatrix) -> float:
    """det Xi from the LU factorization."""
    lu, piv = scipy.linalg.lu_factor(xi.matrix)
    return _lu_determinant(lu, piv)


def wei_norman_rhs(
    tensor: StructureTensor,
    chart: ChartSequence,
    gamma: Sequence[float],
    u: Sequence[float],
    singularity_threshold: Optional[float] = None,
) -> np.ndarray:
    """
    gamma' = Xi(gamma)^{-1} u.

    Raises:
        ChartSingularityError: If |det Xi(gamma)| <= singularity_threshold
    """
    return context_for(tensor, chart, singularity_threshold).rhs(gamma, u)


def forward_map(tensor: StructureTensor, chart: ChartSequence, gamma: Sequence[float], gamma_dot: Sequence[float]) -> np.ndarray:
    """u = Xi(gamma) gamma'; valid everywhere, including singular points."""
    return context_for(tensor, chart).forward(gamma, gamma_dot)


# ---------------------------------------------------------------------------
# Chart coordinates of a given group element
# ---------------------------------------------------------------------------

class SubgroupExponentials:
    """exp(g A_i) for the generators of a basis, from one Hermitian eigendecomposition each."""

    def __init__(self, basis: LieBasis):
        self.basis = basis
        self._eigen: List[Tuple[np.ndarray, np.ndarray]] = []
        for generator in basis.generators:
            # A = i H with H Hermitian
            values, vectors = np.linalg.eigh(-1j * generator)
            self._eigen.append((values, vectors))

    def exp(self, i: int, gamma: float) -> np.ndarray:
        values, vectors = self._eigen[i - 1]
        return (vectors * np.exp(1j * gamma * values)) @ vectors.conj().T

    def product(self, chart: ChartSequence, gamma: Iterable[float]) -> np.ndarray:
        result = np.eye(self.basis.dim_defining, dtype=complex)
        for index, value in zip(chart.indices, gamma):
            result = result @ self.exp(index, value)
        return result


def chart_coordinates(
    basis: LieBasis,
    context: WeiNormanContext,
    U: np.ndarray,
    gamma_guess: Optional[Sequence[float]] = None,
    starts: int = 24,
    tol: float = 1e-10,
) -> np.ndarray:
    """
    Chart parameters gamma with exp(gamma^1 A_s1) ... exp(gamma^n A_sn) = U.

    Solves the defining-representation mismatch with Levenberg-Marquardt
    from a deterministic sequence of starting points (the guess, the
    origin, then seeded random points in [-pi, pi]^n). Solutions at which
    the chart is singular are skipped.

    Args:
        basis: Basis matching the context's tensor
        context: Chart context
        U: Target special unitary N x N matrix
        gamma_guess: Optional first starting point
        starts: Number of seeded random starting points
        tol: Acceptance threshold on the Frobenius mismatch

    Returns:
        Chart parameters

    Raises:
        WeiNormanError: If no regular solution is found
    """
    U = np.asarray(U, dtype=complex)
    N = basis.dim_defining
    if U.shape != (N, N):
        raise ValueError(f"expected a {N}x{N} matrix, got {U.shape}")
    chart = context.chart
    subgroups = SubgroupExponentials(basis)
    generators = [basis.generators[index - 1] for index in chart.indices]

    def residual(gamma: np.ndarray) -> np.ndarray:
        difference = subgroups.product(chart, gamma) - U
        return np.concatenate([difference.real.ravel(), difference.imag.ravel()])

    def jacobian(gamma: np.ndarray) -> np.ndarray:
        factors = [subgroups.exp(index, value) for index, value in zip(chart.indices, gamma)]
        prefix = [np.eye(N, dtype=complex)]
        for factor in factors:
            prefix.append(prefix[-1] @ factor)
        suffix = [np.eye(N, dtype=complex)]
        for factor in reversed(factors):
            suffix.append(factor @ suffix[-1])
        suffix = suffix[::-1]
        columns = []
        for j, generator in enumerate(generators):
            derivative = prefix[j + 1] @ generator @ suffix[j + 1]
            columns.append(np.concatenate([derivative.real.ravel(), derivative.imag.ravel()]))
        return np.array(columns).T

    rng = np.random.default_rng(0)
    seeds: List[np.ndarray] = []
    if gamma_guess is not None:
        seeds.append(_gamma_vector(gamma_guess, context.n, "gamma_guess"))
    seeds.append(np.zeros(context.n))
    seeds.extend(rng.uniform(-np.pi, np.pi, size=(starts, context.n)))

    for attempt, seed in enumerate(seeds):
        result = scipy.optimize.least_squares(
            residual, seed, jac=jacobian, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15
        )
        mismatch = float(np.linalg.norm(result.fun))
        if mismatch > tol:
            continue
        if abs(context.det(result.x)) <= context.singularity_threshold:
            logger.debug("Skipping singular chart solution", extra={"attempt": attempt})
            continue
        logger.debug("Chart coordinates recovered", extra={
            "chart": chart.to_text(), "mismatch": mismatch, "attempt": attempt,
        })
        return result.x

    logger.error("No chart coordinates found", extra={"chart": chart.to_text(), "starts": len(seeds)})
    raise WeiNormanError(f"could not find regular coordinates for U in chart {chart.to_text()}")
