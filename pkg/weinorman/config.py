"""
Configuration for the Wei-Norman toolkit.

Numerical tolerances and run defaults are read once from the environment
(optionally populated from a `.env` file) and validated with pydantic.
Every variable uses the `WEINORMAN_` prefix, e.g.

    WEINORMAN_SINGULARITY_THRESHOLD=1e-6
    WEINORMAN_LOG_LEVEL=DEBUG
"""

import os
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator, model_validator

ENV_PREFIX = "WEINORMAN_"


class Settings(BaseModel):
    """Tolerances and defaults shared by every module."""

    # LieBasis invariants (entrywise)
    skew_tol: float = Field(1e-12, gt=0)
    # structure tensor: closure residual, Jacobi residual, integer snapping
    structure_tol: float = Field(1e-10, gt=0)
    closure_error_tol: float = Field(1e-8, gt=0)
    structure_snap_tol: float = Field(1e-10, ge=0)
    # spectra
    char_poly_snap_tol: float = Field(1e-9, ge=0)
    eig_real_tol: float = Field(1e-9, gt=0)
    cluster_tol: float = Field(1e-7, gt=0)
    char_residual_tol: float = Field(1e-8, gt=0)
    # beta coefficients
    beta_imag_tol: float = Field(1e-10, gt=0)
    beta_max_condition: float = Field(1e14, gt=1)
    recurrence_terms: int = Field(40, ge=1)
    # charts
    singularity_threshold: float = Field(1e-8, ge=0)
    log_level: str = "INFO"

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        return value.upper()


def _read_environment() -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip():
            values[name] = raw.strip()
    return values


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Load settings from `.env` and the process environment.

    Returns:
        Validated Settings instance (cached for the process lifetime)
    """
    load_dotenv()
    return Settings(**_read_environment())


class RunConfig(BaseModel):
    """
    Configuration of a single CLI run.

    Attributes:
        basis: Built-in basis label or path to a custom-basis file.
        chart: 1-based generator indices; None selects the canonical chart.
        controls: Preset spec or path to a controls CSV file.
        t0: Start time.
        t1: End time.
        dt: Fixed step.
        singularity_threshold: Abort threshold on |det Xi|.
        output_dir: Directory receiving the run artifacts.
        seed: Seed for randomized presets.
        verify: Also run the reference propagator and report the discrepancy.
    """

    basis: str = "su2_pauli_half"
    chart: Optional[List[int]] = None
    controls: str = "zero"
    t0: float = 0.0
    t1: float = 1.0
    dt: float = Field(1e-3, gt=0)
    singularity_threshold: float = Field(default_factory=lambda: get_settings().singularity_threshold, ge=0)
    output_dir: Path = Path("out")
    seed: int = 0
    verify: bool = False

    @field_validator("chart")
    @classmethod
    def _positive_indices(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and any(index < 1 for index in value):
            raise ValueError(f"chart indices are 1-based, got {value}")
        return value

    @model_validator(mode="after")
    def _ordered_span(self) -> "RunConfig":
        if not self.t1 > self.t0:
            raise ValueError(f"t1 must exceed t0 (t0={self.t0}, t1={self.t1})")
        return self

    def echo(self) -> Dict[str, Any]:
        """JSON-friendly copy for report.json."""
        return self.model_dump(mode="json")
