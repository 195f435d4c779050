"""
Propagation of U' = (u^mu(t) A_mu) U.

Two independent routes:

* the Wei-Norman route integrates gamma' = Xi(gamma)^{-1} u(t) with
  fixed-step RK4 and rebuilds U as a product of one-parameter subgroups;
* the reference route steps U_{k+1} = exp(h G(t_k + h/2)) U_k
  (exponential midpoint) with an independent Pade matrix exponential.

The basis matrices already carry the factor i, so the physical Hamiltonian
is H = i u^mu A_mu (hbar = 1).
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from loguru import logger

from .algebra_core import LieBasis, StructureTensor, algebra_element
from .errors import ChartOriginError, ChartSingularityError, ControlSignalError
from .wei_norman import ChartSequence, WeiNormanContext, context_for

SAMPLED = "piecewise_constant_samples"
ANALYTIC = "analytic_preset"

COMPLETED = "completed"
ABORTED = "aborted_at_singularity"


# ---------------------------------------------------------------------------
# Controls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ControlSignal:
    """
    Control coefficients u^mu(t).

    Sampled signals hold each sample until the next one (left-hold) and
    extend the first and last samples to the whole real line. Analytic
    signals are sums of cosines per channel:

        u^mu(t) = offsets[mu] + sum_h amplitudes[mu, h] cos(frequencies[mu, h] t + phases[mu, h])

    Attributes:
        n_channels: Number of channels (algebra dimension).
        kind: SAMPLED or ANALYTIC.
        times: Sample times, strictly increasing (sampled signals).
        values: Sample values, shape (m, n_channels) (sampled signals).
        amplitudes: Shape (n_channels, H) (analytic signals).
        frequencies: Shape (n_channels, H) (analytic signals).
        phases: Shape (n_channels, H) (analytic signals).
        offsets: Shape (n_channels,) (analytic signals).
        label: Preset name or source file.
    """
    n_channels: int
    kind: str
    times: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    amplitudes: Optional[np.ndarray] = None
    frequencies: Optional[np.ndarray] = None
    phases: Optional[np.ndarray] = None
    offsets: Optional[np.ndarray] = None
    label: str = "custom"

    def __post_init__(self):
        if self.n_channels < 1:
            raise ControlSignalError(f"n_channels must be positive, got {self.n_channels}")
        if self.kind == SAMPLED:
            self._validate_samples()
        elif self.kind == ANALYTIC:
            self._validate_analytic()
        else:
            raise ControlSignalError(f"unknown control kind '{self.kind}'")

    def _validate_samples(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or len(times) == 0:
            raise ControlSignalError("sampled controls need at least one sample time")
        if values.shape != (len(times), self.n_channels):
            raise ControlSignalError(
                f"sample values must have shape ({len(times)}, {self.n_channels}), got {values.shape}"
            )
        if np.any(np.diff(times) <= 0):
            position = int(np.argmax(np.diff(times) <= 0)) + 1
            raise ControlSignalError(f"sample times must be strictly increasing (sample {position + 1})")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ControlSignalError("sample times and values must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def _validate_analytic(self) -> None:
        amplitudes = np.atleast_2d(np.asarray(self.amplitudes, dtype=float))
        frequencies = np.atleast_2d(np.asarray(self.frequencies, dtype=float))
        phases = np.atleast_2d(np.asarray(self.phases, dtype=float))
        offsets = np.zeros(self.n_channels) if self.offsets is None else np.asarray(self.offsets, dtype=float)
        expected = amplitudes.shape
        if expected[0] != self.n_channels or frequencies.shape != expected or phases.shape != expected:
            raise ControlSignalError(
                f"harmonic parameters must share shape ({self.n_channels}, H); got "
                f"{amplitudes.shape}, {frequencies.shape}, {phases.shape}"
            )
        if offsets.shape != (self.n_channels,):
            raise ControlSignalError(f"offsets must have length {self.n_channels}")
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "frequencies", frequencies)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "offsets", offsets)

    # constructors

    @classmethod
    def from_samples(cls, times: Sequence[float], values: Sequence[Sequence[float]], label: str = "samples") -> "ControlSignal":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise ControlSignalError(f"sample values must be a 2-d array, got shape {values.shape}")
        return cls(n_channels=values.shape[1], kind=SAMPLED, times=np.asarray(times, dtype=float), values=values, label=label)

    @classmethod
    def harmonic(
        cls,
        amplitudes: Sequence[Sequence[float]],
        frequencies: Sequence[Sequence[float]],
        phases: Sequence[Sequence[float]],
        offsets: Optional[Sequence[float]] = None,
        label: str = "harmonic",
    ) -> "ControlSignal":
        amplitudes = np.atleast_2d(np.asarray(amplitudes, dtype=float))
        return cls(n_channels=amplitudes.shape[0], kind=ANALYTIC, amplitudes=amplitudes,
                   frequencies=frequencies, phases=phases, offsets=offsets, label=label)

    @classmethod
    def constant(cls, u: Sequence[float], label: str = "constant") -> "ControlSignal":
        u = np.asarray(u, dtype=float)
        zeros = np.zeros((len(u), 1))
        return cls.harmonic(zeros, zeros, zeros, offsets=u, label=label)

    @classmethod
    def zero(cls, n: int) -> "ControlSignal":
        return cls.constant(np.zeros(n), label="zero")

    @classmethod
    def su2_three_harmonic(cls) -> "ControlSignal":
        """u(t) = (cos t, sin t, 0.3) on su(2)."""
        return cls.harmonic(
            amplitudes=[[1.0], [1.0], [0.0]],
            frequencies=[[1.0], [1.0], [0.0]],
            phases=[[0.0], [-np.pi / 2], [0.0]],
            offsets=[0.0, 0.0, 0.3],
            label="su2_three_harmonic",
        )

    @classmethod
    def random_harmonic(cls, n: int, harmonics: int = 3, amplitude: float = 0.5, seed: int = 0) -> "ControlSignal":
        """
        Seeded random sum of cosines with sup-norm at most `amplitude` per channel.

        Args:
            n: Number of channels
            harmonics: Harmonics per channel
            amplitude: Bound on |u^mu(t)|
            seed: Seed of numpy's default generator

        Returns:
            Analytic ControlSignal
        """
        rng = np.random.default_rng(seed)
        weights = rng.uniform(-1.0, 1.0, size=(n, harmonics))
        amplitudes = amplitude * weights / np.sum(np.abs(weights), axis=1, keepdims=True)
        frequencies = rng.uniform(0.5, 3.0, size=(n, harmonics))
        phases = rng.uniform(0.0, 2 * np.pi, size=(n, harmonics))
        return cls.harmonic(amplitudes, frequencies, phases, label=f"random_harmonic(seed={seed})")

    # evaluation

    def __call__(self, t: float) -> np.ndarray:
        if self.kind == SAMPLED:
            index = max(int(np.searchsorted(self.times, t, side="right")) - 1, 0)
            return self.values[index].copy()
        return self.offsets + np.sum(self.amplitudes * np.cos(self.frequencies * t + self.phases), axis=1)

    def sample(self, times: Sequence[float]) -> np.ndarray:
        """Values at each time, shape (len(times), n_channels)."""
        return np.array([self(t) for t in times]).reshape(len(times), self.n_channels)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """
    Wei-Norman parameters along an integration grid.

    Attributes:
        times: Accepted node times.
        gammas: Chart parameters at the nodes, shape (m, n).
        controls: u at the nodes, shape (m, n).
        dets: det Xi at the nodes.
        rates: gamma' = Xi^{-1} u evaluated at the nodes, shape (m, n).
        status: COMPLETED or ABORTED.
        chart: Chart the parameters live in.
        singularity: Abort details (time, gamma, det) for aborted runs.
    """
    times: np.ndarray
    gammas: np.ndarray
    controls: np.ndarray
    dets: np.ndarray
    rates: np.ndarray
    status: str
    chart: ChartSequence
    singularity: Optional[ChartSingularityError] = None

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED

    @property
    def abort_time(self) -> Optional[float]:
        return self.singularity.t if self.singularity is not None else None

    def status_dict(self) -> Dict[str, Any]:
        status: Dict[str, Any] = {"status": self.status}
        if self.singularity is not None:
            status.update({
                "t_abort": self.singularity.t,
                "gamma_abort": self.singularity.gamma.tolist(),
                "det_abort": self.singularity.det,
            })
        return status


@dataclass
class UnitaryPath:
    """U(t) on a time grid."""
    times: np.ndarray
    unitaries: np.ndarray

    def unitarity_drift(self) -> float:
        return max((_unitarity_error(U) for U in self.unitaries), default=0.0)

    def special_drift(self) -> float:
        return max((abs(np.linalg.det(U) - 1.0) for U in self.unitaries), default=0.0)


@dataclass
class EquivalenceReport:
    """Comparison of the Wei-Norman and reference routes on one grid."""
    discrepancy: float
    time_of_max: float
    product_unitarity_drift: float
    reference_unitarity_drift: float
    special_unitarity_drift: float
    status: str
    abort_time: Optional[float] = None
    samples: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "discrepancy": self.discrepancy,
            "time_of_max": self.time_of_max,
            "product_unitarity_drift": self.product_unitarity_drift,
            "reference_unitarity_drift": self.reference_unitarity_drift,
            "special_unitarity_drift": self.special_unitarity_drift,
            "status": self.status,
            "abort_time": self.abort_time,
            "samples": self.samples,
        }


@dataclass
class ConvergenceStudy:
    """Discrepancy per step size and the ratios between consecutive halvings."""
    dts: List[float]
    discrepancies: List[float]
    ratios: List[float] = field(default_factory=list)

    def rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.dts, self.discrepancies))


def _unitarity_error(U: np.ndarray) -> float:
    return float(np.linalg.norm(U @ U.conj().T - np.eye(U.shape[0])))


# ---------------------------------------------------------------------------
# Matrix exponential oracle (Pade 13 with scaling and squaring)
# ---------------------------------------------------------------------------

_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0,
    40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def matrix_exp_oracle(G: np.ndarray) -> np.ndarray:
    """
    e^G by the degree-13 diagonal Pade approximant with scaling and squaring.

    Args:
        G: Square matrix with finite entries

    Returns:
        e^G (complex if G is complex)

    Raises:
        ValueError: Non-square or non-finite input
    """
    G = np.asarray(G)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {G.shape}")
    if not np.all(np.isfinite(G)):
        raise ValueError("matrix exponential of a non-finite matrix")
    dtype = np.result_type(G.dtype, float)
    G = G.astype(dtype)
    n = G.shape[0]
    norm = np.linalg.norm(G, 1)
    if norm == 0:
        return np.eye(n, dtype=dtype)
    squarings = max(0, int(math.ceil(math.log2(norm / _THETA13))))
    A = G / 2.0 ** squarings

    b = _PADE13
    identity = np.eye(n, dtype=dtype)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A2 @ A4
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * identity)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * identity
    result = scipy.linalg.solve(V - U, V + U)
    for _ in range(squarings):
        result = result @ result
    return result


# ---------------------------------------------------------------------------
# Integration routes
# ---------------------------------------------------------------------------

def time_grid(t_start: float, t_end: float, dt: float) -> np.ndarray:
    """
    Uniform grid from t_start to t_end with the smallest step count whose
    step does not exceed dt.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end > t_start:
        raise ValueError(f"t_end must exceed t_start (got {t_start}, {t_end})")
    steps = max(1, int(math.ceil((t_end - t_start) / dt - 1e-9)))
    h = (t_end - t_start) / steps
    return t_start + h * np.arange(steps + 1)


def integrate_gamma(
    controls: ControlSignal,
    chart: ChartSequence,
    tensor: StructureTensor,
    t_span: Tuple[float, float],
    dt: float,
    singularity_threshold: Optional[float] = None,
    start: Optional[Tuple[float, Sequence[float]]] = None,
    context: Optional[WeiNormanContext] = None,
) -> Trajectory:
    """
    Classical RK4 on gamma' = Xi(gamma)^{-1} u(t).

    The run aborts (status ABORTED, no exception) when |det Xi| drops to the
    singularity threshold at any stage, or when det Xi changes sign between
    consecutive nodes; in the latter case the abort time is the linear
    interpolation of the zero crossing.

    Args:
        controls: Control signal with n channels
        chart: Chart sequence
        tensor: Structure constants
        t_span: (t0, t1)
        dt: Maximum step size
        singularity_threshold: Abort threshold on |det Xi|
        start: Optional restart state (t_start, gamma0); default (t0, 0)
        context: Prebuilt context for the same tensor and chart

    Returns:
        Trajectory

    Raises:
        ChartOriginError: Starting at gamma = 0 in a chart singular there
        ChartSingularityError: Restart state already singular
    """
    if context is None:
        context = context_for(tensor, chart, singularity_threshold)
    elif singularity_threshold is not None and singularity_threshold != context.singularity_threshold:
        raise ValueError("singularity_threshold conflicts with the supplied context")
    n = context.n
    if controls.n_channels != n:
        raise ControlSignalError(f"controls have {controls.n_channels} channels, algebra dimension is {n}")

    t0, t1 = t_span
    if start is None:
        t_start, gamma = float(t0), np.zeros(n)
        if context.singular_at_origin:
            logger.error("Chart singular at the origin", extra={"chart": chart.to_text()})
            raise ChartOriginError(
                f"chart {chart.to_text()} is singular at gamma = 0; start in a different chart or "
                f"restart from chart coordinates at t > t0"
            )
    else:
        t_start, gamma = float(start[0]), np.array(start[1], dtype=float)
        if gamma.shape != (n,):
            raise ValueError(f"restart gamma must have length {n}")

    grid = time_grid(t_start, t1, dt)
    h = grid[1] - grid[0]
    logger.info("Integrating Wei-Norman parameters", extra={
        "chart": chart.to_text(), "n": n, "steps": len(grid) - 1, "h": h, "t_start": t_start,
    })

    times: List[float] = []
    gammas: List[np.ndarray] = []
    values: List[np.ndarray] = []
    dets: List[float] = []
    rates: List[np.ndarray] = []
    singularity: Optional[ChartSingularityError] = None

    for step, t in enumerate(grid):
        u = controls(t)
        try:
            k1, det = context.rhs_with_det(gamma, u, t=t)
        except ChartSingularityError as exc:
            if step == 0 and start is not None:
                raise
            singularity = exc
            break

        if dets and np.sign(det) != np.sign(dets[-1]):
            fraction = dets[-1] / (dets[-1] - det)
            t_cross = times[-1] + fraction * (t - times[-1])
            gamma_cross = gammas[-1] + fraction * (gamma - gammas[-1])
            logger.warning("det Xi changed sign between nodes", extra={"t_cross": t_cross})
            singularity = ChartSingularityError(gamma_cross, 0.0, t=t_cross)
            break

        times.append(float(t))
        gammas.append(gamma.copy())
        values.append(u)
        dets.append(det)
        rates.append(k1)
        if step == len(grid) - 1:
            break

        try:
            k2 = context.rhs(gamma + 0.5 * h * k1, controls(t + 0.5 * h), t=t + 0.5 * h)
            k3 = context.rhs(gamma + 0.5 * h * k2, controls(t + 0.5 * h), t=t + 0.5 * h)
            k4 = context.rhs(gamma + h * k3, controls(t + h), t=t + h)
        except ChartSingularityError as exc:
            singularity = exc
            break
        gamma = gamma + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    status = COMPLETED if singularity is None else ABORTED
    if singularity is not None:
        logger.warning("Integration aborted at chart singularity", extra=singularity.to_dict())
    return Trajectory(
        times=np.array(times),
        gammas=np.array(gammas).reshape(len(times), n),
        controls=np.array(values).reshape(len(times), n),
        dets=np.array(dets),
        rates=np.array(rates).reshape(len(times), n),
        status=status,
        chart=chart,
        singularity=singularity,
    )


def reference_propagator(
    controls: ControlSignal,
    basis: LieBasis,
    t_span: Tuple[float, float],
    dt: float,
    U0: Optional[np.ndarray] = None,
) -> UnitaryPath:
    """
    Exponential midpoint rule U_{k+1} = exp(h G(t_k + h/2)) U_k.

    Args:
        controls: Control signal with n channels
        basis: Basis defining G(t) = u^mu(t) A_mu
        t_span: (t0, t1)
        dt: Maximum step size
        U0: Initial unitary (identity by default)

    Returns:
        UnitaryPath on the same grid as `integrate_gamma`
    """
    if controls.n_channels != basis.dim_algebra:
        raise ControlSignalError(
            f"controls have {controls.n_channels} channels, algebra dimension is {basis.dim_algebra}"
        )
    grid = time_grid(t_span[0], t_span[1], dt)
    h = grid[1] - grid[0]
    N = basis.dim_defining
    U = np.eye(N, dtype=complex) if U0 is None else np.array(U0, dtype=complex)
    unitaries = [U]
    for t in grid[:-1]:
        generator = algebra_element(basis, controls(t + 0.5 * h))
        U = matrix_exp_oracle(h * generator) @ U
        unitaries.append(U)
    return UnitaryPath(times=grid, unitaries=np.array(unitaries))


def reconstruct_unitary(basis: LieBasis, chart: ChartSequence, gamma: Sequence[float]) -> np.ndarray:
    """
    exp(gamma^1 A_s1) ... exp(gamma^n A_sn), left to right.

    Args:
        basis: Basis
        chart: Chart sequence
        gamma: Chart parameters

    Returns:
        Complex N x N special unitary matrix
    """
    chart.validate(basis.dim_algebra)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (basis.dim_algebra,):
        raise ValueError(f"gamma must have length {basis.dim_algebra}, got shape {gamma.shape}")
    result = np.eye(basis.dim_defining, dtype=complex)
    for index, value in zip(chart.indices, gamma):
        result = result @ matrix_exp_oracle(value * basis.generators[index - 1])
    return result


def compare_paths(basis: LieBasis, trajectory: Trajectory, reference: UnitaryPath) -> EquivalenceReport:
    """Discrepancy of the reconstructed products against a reference path on the same grid."""
    count = len(trajectory.times)
    if count and not np.allclose(trajectory.times, reference.times[:count], rtol=0, atol=1e-12):
        raise ValueError("trajectory and reference path use different grids")
    products = [reconstruct_unitary(basis, trajectory.chart, gamma) for gamma in trajectory.gammas]
    errors = [float(np.linalg.norm(P - R)) for P, R in zip(products, reference.unitaries[:count])]
    worst = int(np.argmax(errors)) if errors else 0
    product_path = UnitaryPath(trajectory.times, np.array(products))
    reference_part = UnitaryPath(reference.times[:count], reference.unitaries[:count])
    return EquivalenceReport(
        discrepancy=errors[worst] if errors else 0.0,
        time_of_max=float(trajectory.times[worst]) if errors else 0.0,
        product_unitarity_drift=product_path.unitarity_drift(),
        reference_unitarity_drift=reference_part.unitarity_drift(),
        special_unitarity_drift=max(product_path.special_drift(), reference_part.special_drift()),
        status=trajectory.status,
        abort_time=trajectory.abort_time,
        samples=count,
    )


def verify_equivalence(
    controls: ControlSignal,
    basis: LieBasis,
    chart: ChartSequence,
    tensor: StructureTensor,
    t_span: Tuple[float, float],
    dt: float,
    singularity_threshold: Optional[float] = None,
    context: Optional[WeiNormanContext] = None,
) -> EquivalenceReport:
    """
    Run both routes on one grid and report max_t ||U_product(t) - U_reference(t)||_F.

    Aborted runs yield a partial report up to the abort time.
    """
    trajectory = integrate_gamma(controls, chart, tensor, t_span, dt, singularity_threshold, context=context)
    reference = reference_propagator(controls, basis, t_span, dt)
    report = compare_paths(basis, trajectory, reference)
    logger.info("Equivalence check finished", extra=report.to_dict())
    return report


def convergence_study(
    controls: ControlSignal,
    basis: LieBasis,
    chart: ChartSequence,
    tensor: StructureTensor,
    t_span: Tuple[float, float],
    dts: Sequence[float],
) -> ConvergenceStudy:
    """
    Discrepancy between the two routes for each step size.

    Ratios are discrepancy[k] / discrepancy[k+1]; halving dt for a
    second-order reference route gives ratios near 4.
    """
    context = context_for(tensor, chart)
    discrepancies = [
        verify_equivalence(controls, basis, chart, tensor, t_span, dt, context=context).discrepancy
        for dt in dts
    ]
    ratios = [coarse / fine if fine > 0 else float("inf") for coarse, fine in zip(discrepancies, discrepancies[1:])]
    logger.info("Convergence study finished", extra={"dts": list(dts), "ratios": ratios})
    return ConvergenceStudy(dts=list(dts), discrepancies=discrepancies, ratios=ratios)


def regular_random_controls(
    context: WeiNormanContext,
    t_span: Tuple[float, float],
    dt: float,
    seed: int = 0,
    harmonics: int = 3,
    amplitude: float = 0.5,
    min_det: float = 0.1,
    max_attempts: int = 20,
) -> Tuple[ControlSignal, int]:
    """
    Random harmonic controls whose trajectory keeps |det Xi| >= min_det.

    Seeds seed, seed + 1, ... are tried in turn.

    Returns:
        (controls, seed actually used)
    """
    for attempt in range(max_attempts):
        candidate_seed = seed + attempt
        controls = ControlSignal.random_harmonic(context.n, harmonics, amplitude, candidate_seed)
        trajectory = integrate_gamma(controls, context.chart, context.tensor, t_span, dt, context=context)
        smallest = float(np.min(np.abs(trajectory.dets))) if len(trajectory.dets) else 0.0
        if trajectory.completed and smallest >= min_det:
            return controls, candidate_seed
        logger.warning("Random controls approach a chart singularity, reseeding",
                       extra={"seed": candidate_seed, "min_det": smallest})
    raise ControlSignalError(f"no regular random controls found in {max_attempts} seeds starting at {seed}")
