"""
Command-line interface.

    weinorman derive --basis su3_cartan --out out/
    weinorman simulate --basis su2_pauli_half --controls su2_three_harmonic --t1 1 --verify
    weinorman verify-golden

Exit codes: 0 success, 2 validation error, 3 singularity abort, 4 golden-suite failure.
"""

import argparse
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import psutil
from loguru import logger
from pydantic import ValidationError

from .adjoint_exponential import AdjointExponentialTable
from .algebra_core import LieBasis, compute_structure_tensor
from .config import RunConfig, get_settings
from .errors import WeiNormanError
from .golden import run_golden_suite
from .io_formats import (
    load_basis,
    resolve_controls,
    spectra_payload,
    structure_tensor_payload,
    write_controls_csv,
    write_json,
    write_trajectory_csv,
)
from .propagation import compare_paths, integrate_gamma, reference_propagator, time_grid
from .wei_norman import ChartSequence, context_for

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SINGULARITY = 3
EXIT_GOLDEN = 4


def configure_logging(verbose: bool = False) -> None:
    logger.remove()
    level = "DEBUG" if verbose else get_settings().log_level
    logger.add(sys.stderr, level=level)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weinorman",
        description="Wei-Norman product-of-exponentials toolkit for SU(N) control systems.",
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    commands = parser.add_subparsers(dest="command", required=True)

    derive = commands.add_parser("derive", help="Structure constants and adjoint spectra of a basis.")
    derive.add_argument("--basis", default="su2_pauli_half", help="Built-in label or custom-basis file.")
    derive.add_argument("--out", default="out", help="Output directory.")
    derive.add_argument(
        "--gamma-grid", default="",
        help="Comma-separated gamma values at which beta coefficients are added to spectra.json.",
    )

    simulate = commands.add_parser("simulate", help="Integrate the Wei-Norman parameters for given controls.")
    simulate.add_argument("--basis", default="su2_pauli_half", help="Built-in label or custom-basis file.")
    simulate.add_argument("--chart", default="canonical", help="Generator indices, e.g. 3,2,3, or canonical/zyz.")
    simulate.add_argument(
        "--controls", default="zero",
        help="zero, constant:u1,...,un, su2_three_harmonic, random_harmonic or a controls CSV path.",
    )
    simulate.add_argument("--t0", type=float, default=0.0)
    simulate.add_argument("--t1", type=float, default=1.0)
    simulate.add_argument("--dt", type=float, default=1e-3)
    simulate.add_argument("--sing-threshold", type=float, default=None, help="Abort threshold on |det Xi|.")
    simulate.add_argument("--verify", action="store_true", help="Compare against the reference propagator.")
    simulate.add_argument("--out", default="out", help="Output directory.")
    simulate.add_argument("--seed", type=int, default=0, help="Seed for randomized control presets.")
    simulate.add_argument("--write-controls", default=None, help="Also dump the controls on the run grid.")

    golden = commands.add_parser("verify-golden", help="Check every published table.")
    golden.add_argument("--seed", type=int, default=0)
    golden.add_argument("--json", default=None, help="Write the item table as JSON.")
    return parser


def _resolve_chart(text: str, basis: LieBasis) -> ChartSequence:
    if text.strip().lower() == "canonical":
        return ChartSequence.canonical(basis.dim_algebra)
    chart = ChartSequence.parse(text)
    chart.validate(basis.dim_algebra)
    return chart


def _gamma_grid(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"--gamma-grid must be comma-separated numbers, got '{text}'") from None


def _metadata(started: float) -> Dict[str, Any]:
    """Host and timing details; the only non-deterministic part of report.json."""
    memory = psutil.virtual_memory()
    return {
        "finished_at": datetime.now(timezone.utc).isoformat(),
        "runtime_seconds": time.perf_counter() - started,
        "python": platform.python_version(),
        "platform": platform.platform(),
        "cpu_count": psutil.cpu_count(logical=True),
        "total_memory_gb": memory.total / (1024 ** 3),
        "process_rss_mb": psutil.Process().memory_info().rss / (1024 ** 2),
    }


def cmd_derive(args: argparse.Namespace) -> int:
    """Write structure_tensor.json and spectra.json for a basis."""
    basis = load_basis(args.basis)
    gamma_grid = _gamma_grid(args.gamma_grid)
    tensor = compute_structure_tensor(basis)
    table = AdjointExponentialTable(tensor)
    structure = structure_tensor_payload(basis, tensor)
    spectra = spectra_payload(table, gamma_grid)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(structure, out / "structure_tensor.json")
    write_json(spectra, out / "spectra.json")
    logger.info("Derivation written", extra={
        "basis": basis.label, "triplets": len(structure["triplets"]), "out": str(out),
    })
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    """Integrate gamma, write trajectory.csv and report.json."""
    started = time.perf_counter()
    config = RunConfig(
        basis=args.basis,
        controls=args.controls,
        t0=args.t0,
        t1=args.t1,
        dt=args.dt,
        output_dir=Path(args.out),
        seed=args.seed,
        verify=args.verify,
        **({} if args.sing_threshold is None else {"singularity_threshold": args.sing_threshold}),
    )
    basis = load_basis(config.basis)
    chart = _resolve_chart(args.chart, basis)
    config = config.model_copy(update={"chart": list(chart.indices)})
    controls = resolve_controls(config.controls, basis.dim_algebra, seed=config.seed)
    tensor = compute_structure_tensor(basis)
    context = context_for(tensor, chart, config.singularity_threshold)

    t_span = (config.t0, config.t1)
    trajectory = integrate_gamma(controls, chart, tensor, t_span, config.dt, context=context)

    report: Dict[str, Any] = {
        "status": trajectory.status_dict(),
        "basis": basis.label,
        "chart": chart.to_text(),
        "samples": len(trajectory.times),
        "final_gamma": trajectory.gammas[-1].tolist() if len(trajectory.times) else [],
        "config": config.echo(),
    }
    if config.verify:
        reference = reference_propagator(controls, basis, t_span, config.dt)
        equivalence = compare_paths(basis, trajectory, reference)
        report["verification"] = equivalence.to_dict()
        report["discrepancy"] = equivalence.discrepancy

    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(trajectory, out / "trajectory.csv")
    if args.write_controls:
        grid = time_grid(config.t0, config.t1, config.dt)
        write_controls_csv(grid, controls.sample(grid), args.write_controls)
    report["metadata"] = _metadata(started)
    write_json(report, out / "report.json")

    if not trajectory.completed:
        logger.warning("Simulation aborted at a chart singularity", extra=trajectory.status_dict())
        return EXIT_SINGULARITY
    logger.info("Simulation finished", extra={"samples": len(trajectory.times), "out": str(out)})
    return EXIT_OK


def cmd_verify_golden(args: argparse.Namespace) -> int:
    """Run the golden suite and print the per-item table."""
    report = run_golden_suite(seed=args.seed)
    print(report.table())
    if args.json:
        write_json(report.to_dict(), args.json)
    if not report.passed:
        logger.error("Golden suite failed", extra={"failures": report.failures})
        return EXIT_GOLDEN
    return EXIT_OK


COMMANDS = {
    "derive": cmd_derive,
    "simulate": cmd_simulate,
    "verify-golden": cmd_verify_golden,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, WeiNormanError, ValueError, IndexError) as exc:
        logger.error("Command failed", extra={"command": args.command, "error": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
