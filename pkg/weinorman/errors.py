"""
Error types for the Wei-Norman toolkit.

Every domain failure derives from WeiNormanError so callers (the CLI in
particular) can map failures to exit codes without string matching.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np


class WeiNormanError(Exception):
    """Base class for all toolkit errors."""


class BasisValidationError(WeiNormanError, ValueError):
    """A LieBasis invariant does not hold or a basis file is malformed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedBasisError(BasisValidationError):
    """Unknown built-in basis label."""

    def __init__(self, label: str, supported: Sequence[str] = ()):
        self.label = label
        hint = f" (supported: {', '.join(supported)})" if supported else ""
        super().__init__(f"unsupported basis '{label}'{hint}")


class ClosureError(WeiNormanError):
    """The bracket of two generators leaves the span of the basis."""

    def __init__(self, pair: Tuple[int, int], residual: float):
        self.pair = pair
        self.residual = residual
        super().__init__(
            f"basis not closed under bracket: worst pair {pair} has residual {residual:.3e}"
        )


class SpectrumError(WeiNormanError):
    """Root finding or spectrum validation failed."""

    def __init__(self, message: str, residuals: Optional[Sequence[float]] = None):
        self.residuals = list(residuals) if residuals is not None else []
        super().__init__(message)


class BetaSolveError(WeiNormanError):
    """The confluent interpolation system could not produce real coefficients."""

    def __init__(self, message: str, condition: Optional[float] = None, imag_residue: Optional[float] = None):
        self.condition = condition
        self.imag_residue = imag_residue
        super().__init__(message)


class ChartSingularityError(WeiNormanError):
    """det Xi fell to (or through) zero: the chart cannot be inverted here."""

    def __init__(self, gamma: Sequence[float], det: float, t: Optional[float] = None):
        self.gamma = np.asarray(gamma, dtype=float).copy()
        self.det = float(det)
        self.t = t
        where = f" at t={t:.6g}" if t is not None else ""
        super().__init__(
            f"chart singularity{where}: |det Xi| = {abs(self.det):.3e}, gamma = {np.array2string(self.gamma, precision=6)}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"t": self.t, "gamma": self.gamma.tolist(), "det": self.det}


class ChartOriginError(WeiNormanError):
    """The chart is singular at the origin, so integration cannot start there."""


class ControlSignalError(WeiNormanError, ValueError):
    """Malformed control samples, presets or files."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GoldenSuiteFailure(WeiNormanError):
    """One or more golden-value checks failed."""

    def __init__(self, failures: List[str]):
        self.failures = failures
        super().__init__(f"{len(failures)} golden item(s) failed: {', '.join(failures)}")
