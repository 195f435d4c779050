"""
File formats: custom bases, controls, trajectories and JSON reports.

Custom-basis text format::

    # comments and blank lines are ignored
    label: my_basis
    N: 2
    n: 3
    generator:
    0,0 0,0.5
    0,0.5 0,0
    generator:
    ...

Each generator block holds N rows of N whitespace-separated "re,im" entries.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from .adjoint_exponential import AdjointExponentialTable
from .algebra_core import (
    BUILTIN_BASES,
    LieBasis,
    StructureTensor,
    builtin_basis,
    closure_residuals,
    jacobi_residual,
)
from .errors import BasisValidationError, ControlSignalError, UnsupportedBasisError, WeiNormanError
from .propagation import ControlSignal, Trajectory

PathLike = Union[str, Path]

LEFT_HOLD_NOTE = ("# left-hold: u(t) equals the row with the largest t not after the query time; "
                  "the first and last rows extend to the whole time line")


def _number(value: float) -> str:
    """17 significant digits: exact round trip through text."""
    return format(float(value), ".17g")


# ---------------------------------------------------------------------------
# Bases
# ---------------------------------------------------------------------------

def _parse_complex(token: str, line: int) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise BasisValidationError(f"entry '{token}' is not of the form re,im", line=line)
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise BasisValidationError(f"entry '{token}' is not numeric", line=line) from None


def _header_int(value: str, key: str, line: int) -> int:
    try:
        number = int(value)
    except ValueError:
        raise BasisValidationError(f"{key} must be an integer, got '{value}'", line=line) from None
    if number < 1:
        raise BasisValidationError(f"{key} must be positive, got {number}", line=line)
    return number


def parse_basis_text(text: str, default_label: str = "custom") -> LieBasis:
    """
    Parse the custom-basis text format.

    Args:
        text: File contents
        default_label: Label used when the file has no `label:` line

    Returns:
        Validated LieBasis

    Raises:
        BasisValidationError: Malformed text (with line number) or a violated invariant
    """
    label = default_label
    N: Optional[int] = None
    n: Optional[int] = None
    generators: List[List[List[complex]]] = []
    block_lines: List[int] = []

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if sep and key in ("label", "N", "n", "generator"):
            value = value.strip()
            if key == "label":
                label = value or label
            elif key == "generator":
                if N is None:
                    raise BasisValidationError("generator block before the N: header", line=line_number)
                if generators and len(generators[-1]) != N:
                    raise BasisValidationError(
                        f"generator {len(generators)} has {len(generators[-1])} rows, expected {N}", line=line_number
                    )
                generators.append([])
                block_lines.append(line_number)
            elif key == "N":
                N = _header_int(value, "N", line_number)
            else:
                n = _header_int(value, "n", line_number)
            continue

        if not generators:
            raise BasisValidationError(f"unexpected content '{line}'", line=line_number)
        row = [_parse_complex(token, line_number) for token in line.split()]
        if len(row) != N:
            raise BasisValidationError(f"row has {len(row)} entries, expected {N}", line=line_number)
        if len(generators[-1]) == N:
            raise BasisValidationError(f"generator {len(generators)} has more than {N} rows", line=line_number)
        generators[-1].append(row)

    if N is None or n is None:
        raise BasisValidationError("missing N: or n: header")
    if generators and len(generators[-1]) != N:
        raise BasisValidationError(
            f"generator {len(generators)} has {len(generators[-1])} rows, expected {N}", line=block_lines[-1]
        )
    if len(generators) != n:
        raise BasisValidationError(f"header declares n = {n} generators, found {len(generators)}")
    return LieBasis(label, np.array(generators, dtype=complex))


def load_basis_file(path: PathLike) -> LieBasis:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise BasisValidationError(f"cannot read basis file {path}: {exc}") from exc
    try:
        basis = parse_basis_text(text, default_label=path.stem)
    except BasisValidationError as exc:
        logger.error("Invalid basis file", extra={"path": str(path), "error": str(exc)})
        raise
    logger.info("Loaded custom basis", extra={"path": str(path), "N": basis.dim_defining, "n": basis.dim_algebra})
    return basis


def write_basis_file(basis: LieBasis, path: PathLike) -> None:
    lines = [f"label: {basis.label}", f"N: {basis.dim_defining}", f"n: {basis.dim_algebra}"]
    for generator in basis.generators:
        lines.append("generator:")
        for row in generator:
            lines.append(" ".join(f"{_number(z.real)},{_number(z.imag)}" for z in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_basis(spec: str) -> LieBasis:
    """
    Resolve a `--basis` value: a built-in label or a path to a basis file.

    Raises:
        UnsupportedBasisError: Neither a known label nor an existing file
    """
    path = Path(spec)
    if path.suffix and path.exists():
        return load_basis_file(path)
    try:
        return builtin_basis(spec)
    except UnsupportedBasisError:
        if path.exists():
            return load_basis_file(path)
        raise


# ---------------------------------------------------------------------------
# Controls
# ---------------------------------------------------------------------------

def write_controls_csv(times: Sequence[float], values: np.ndarray, path: PathLike) -> None:
    """Write samples in the controls format (left-hold note, header, 17 digits)."""
    values = np.asarray(values, dtype=float)
    n = values.shape[1]
    with open(path, "w", newline="") as handle:
        handle.write(LEFT_HOLD_NOTE + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t"] + [f"u_{i}" for i in range(1, n + 1)])
        for t, row in zip(times, values):
            writer.writerow([_number(t)] + [_number(v) for v in row])


def read_controls_csv(path: PathLike) -> ControlSignal:
    """
    Load a controls file as a piecewise-constant (left-hold) signal.

    Raises:
        ControlSignalError: Malformed header or rows (with line number)
    """
    path = Path(path)
    times: List[float] = []
    rows: List[List[float]] = []
    header: Optional[List[str]] = None
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ControlSignalError(f"cannot read controls file {path}: {exc}") from exc

    for line_number, record in enumerate(csv.reader(lines), start=1):
        if not record or record[0].lstrip().startswith("#"):
            continue
        if header is None:
            header = [cell.strip() for cell in record]
            expected = ["t"] + [f"u_{i}" for i in range(1, len(header))]
            if len(header) < 2 or header != expected:
                raise ControlSignalError(f"header must be t,u_1,...,u_n, got {','.join(header)}", line=line_number)
            continue
        if len(record) != len(header):
            raise ControlSignalError(f"expected {len(header)} columns, got {len(record)}", line=line_number)
        try:
            numbers = [float(cell) for cell in record]
        except ValueError:
            raise ControlSignalError(f"non-numeric value in row {record}", line=line_number) from None
        if times and numbers[0] <= times[-1]:
            raise ControlSignalError(f"time {numbers[0]} does not increase", line=line_number)
        times.append(numbers[0])
        rows.append(numbers[1:])

    if header is None or not rows:
        raise ControlSignalError(f"controls file {path} has no samples")
    return ControlSignal.from_samples(times, rows, label=str(path))


def resolve_controls(spec: str, n: int, seed: int = 0) -> ControlSignal:
    """
    Resolve a `--controls` value.

    Accepts `zero`, `constant:u1,...,un`, `su2_three_harmonic`,
    `random_harmonic` (seeded) or a CSV path.
    """
    if spec == "zero":
        return ControlSignal.zero(n)
    if spec.startswith("constant:"):
        try:
            values = [float(part) for part in spec.split(":", 1)[1].split(",")]
        except ValueError:
            raise ControlSignalError(f"constant controls must be numbers, got '{spec}'") from None
        if len(values) != n:
            raise ControlSignalError(f"constant controls need {n} values, got {len(values)}")
        return ControlSignal.constant(values)
    if spec == "su2_three_harmonic":
        if n != 3:
            raise ControlSignalError(f"su2_three_harmonic needs a 3-dimensional algebra, got n = {n}")
        return ControlSignal.su2_three_harmonic()
    if spec == "random_harmonic":
        return ControlSignal.random_harmonic(n, seed=seed)
    if Path(spec).exists():
        controls = read_controls_csv(spec)
        if controls.n_channels != n:
            raise ControlSignalError(f"controls file has {controls.n_channels} channels, algebra dimension is {n}")
        return controls
    raise ControlSignalError(f"unknown controls '{spec}' (not a preset and no such file)")


# ---------------------------------------------------------------------------
# Trajectories and reports
# ---------------------------------------------------------------------------

def write_trajectory_csv(trajectory: Trajectory, path: PathLike) -> None:
    """Columns t, gamma_1..gamma_n, u_1..u_n, det_xi."""
    n = trajectory.gammas.shape[1]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t"] + [f"gamma_{i}" for i in range(1, n + 1)]
                        + [f"u_{i}" for i in range(1, n + 1)] + ["det_xi"])
        for t, gamma, u, det in zip(trajectory.times, trajectory.gammas, trajectory.controls, trajectory.dets):
            writer.writerow([_number(t)] + [_number(v) for v in gamma] + [_number(v) for v in u] + [_number(det)])


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def write_json(payload: Dict[str, Any], path: PathLike) -> None:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")


def structure_tensor_payload(basis: LieBasis, tensor: StructureTensor) -> Dict[str, Any]:
    return {
        "basis": basis.label,
        "N": basis.dim_defining,
        "n": basis.dim_algebra,
        "convention": "[A_i, A_j] = sum_k c^k_ij A_k; c^k_ji = -c^k_ij; indices 1-based",
        "triplets": [
            {"k": k, "i": i, "j": j, "value": value}
            for k, i, j, value in tensor.nonzero_triplets(upper_only=True)
        ],
        "max_closure_residual": float(np.max(closure_residuals(basis, tensor))),
        "jacobi_residual": jacobi_residual(tensor),
    }


def _complex_dict(value: complex) -> Dict[str, float]:
    return {"re": float(value.real), "im": float(value.imag)}


def spectra_payload(table: AdjointExponentialTable, gamma_grid: Sequence[float] = ()) -> Dict[str, Any]:
    """
    Per-generator characteristic polynomials and eigenvalue multisets.

    `monic_coefficients` are p_0..p_{n-1} of det(sI - M_i) = s^n + p_{n-1} s^{n-1} + ... + p_0;
    `cayley_hamilton` are a_k = -p_k.
    """
    generators = []
    for i in range(1, table.n + 1):
        spec = table.spectrum(i)
        entry: Dict[str, Any] = {
            "generator": i,
            "monic_coefficients": spec.monic.tolist(),
            "cayley_hamilton": spec.char_poly.tolist(),
            "eigenvalues": [dict(_complex_dict(root), multiplicity=m) for root, m in spec.roots],
        }
        if gamma_grid:
            entry["betas"] = [{"gamma": float(g), "beta": table.beta(i, g).beta.tolist()} for g in gamma_grid]
        generators.append(entry)
    return {"basis": table.tensor.label, "n": table.n, "generators": generators}


def builtin_labels() -> Tuple[str, ...]:
    return tuple(BUILTIN_BASES)
