#!/usr/bin/env python3
"""Dense coding CLI - NME bases, analyses, Monte Carlo runs and parameter sweeps."""

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from src.calculator import SWEEP_COLUMNS, BasisReport, DenseCodingCalculator, SweepRow
from src.config import (
    CSV_SIGNIFICANT_DIGITS,
    DEFAULT_SCHEME,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    MAX_DIMENSION,
    SUPPORTED_SCHEMES,
)
from src.parsing import ParameterParser
from src.protocol import AnalysisReport, ProtocolConfig
from src.states import SchmidtState

logger = logging.getLogger("densecode.cli")

_values = ParameterParser()

REPORT_COLUMNS = (
    "d",
    "D",
    "scheme",
    "entropy_ebits",
    "paper_bound",
    "achievable_gamma",
    "residual_probability",
    "optimized_gamma",
    "linearly_independent",
    "mc_rate",
    "mc_stderr",
    "conclusive",
    "misdecoded",
    "trials",
    "seed",
)


def _flag(convert: Callable[[str], Any], name: str) -> Callable[[str], Any]:
    """Wrap a parser method so argparse reports its message as a usage error."""

    def parse(text: str) -> Any:
        try:
            return convert(text)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from None

    parse.__name__ = name
    return parse


def _bounded_int(low: int, high: Optional[int] = None) -> Callable[[str], int]:
    def convert(text: str) -> int:
        value = _values.int_list(text)
        if len(value) != 1:
            raise ValueError(f"Expected a single integer, got {text!r}")
        if value[0] < low or (high is not None and value[0] > high):
            bound = f"[{low}, {high}]" if high is not None else f">= {low}"
            raise ValueError(f"Value {value[0]} must be {bound}")
        return value[0]

    return _flag(convert, "int")


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"
    if isinstance(value, complex):
        return f"{value.real:.{CSV_SIGNIFICANT_DIGITS}g}{value.imag:+.{CSV_SIGNIFICANT_DIGITS}g}i"
    return str(value)


def _to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_value(v) for v in row])
    return buffer.getvalue()


def _to_json(data: Any) -> str:
    return json.dumps(data, indent=2) + "\n"


def _report_row(report: AnalysisReport) -> List[Any]:
    config = report.config
    stats = report.simulation
    values: Dict[str, Any] = {
        "d": config.d,
        "D": config.D,
        "scheme": config.scheme,
        "entropy_ebits": report.entropy_ebits,
        "paper_bound": report.paper_bound,
        "achievable_gamma": report.achievable_gamma,
        "residual_probability": report.residual_probability,
        "optimized_gamma": report.optimized_gamma,
        "linearly_independent": report.linearly_independent,
        "mc_rate": stats.success_rate if stats else None,
        "mc_stderr": stats.stderr if stats else None,
        "conclusive": stats.conclusive if stats else None,
        "misdecoded": stats.misdecoded if stats else None,
        "trials": stats.trials if stats else 0,
        "seed": config.seed,
    }
    return [values[column] for column in REPORT_COLUMNS]


def _report_text(report: AnalysisReport) -> str:
    config = report.config
    spectrum = ", ".join(f"{p:.6g}" for p in config.spectrum)
    lines = [
        f"Scheme: {config.scheme}  d={config.d}  D={config.D}",
        f"Spectrum: ({spectrum})",
        f"Entanglement: {report.entropy_ebits:.6f} ebits",
        f"Gram spectrum: min {min(report.gram_spectrum):.6g}, max {max(report.gram_spectrum):.6g}",
        f"Linearly independent: {'yes' if report.linearly_independent else 'no'}",
        f"Average-success bound: {report.paper_bound:.10f}",
        f"Achievable (uniform): {report.achievable_gamma:.10f}",
        f"Achievable (optimized): {report.optimized_gamma:.10f}",
        "Per-subspace gamma: " + ", ".join(f"{g:.6f}" for g in report.per_subspace_gamma),
        f"Residual probability: {report.residual_probability:.6g}",
    ]
    stats = report.simulation
    if stats is not None:
        deviation = (
            (stats.success_rate - report.achievable_gamma) / stats.stderr if stats.stderr else 0.0
        )
        lines += [
            f"Monte Carlo: {stats.success_rate:.6f} +/- {stats.stderr:.6f} "
            f"({stats.conclusive}/{stats.trials} conclusive, seed {stats.seed})",
            f"Deviation from achievable: {deviation:+.2f} sigma",
            f"Misdecoded: {stats.misdecoded}",
            f"Residual outcomes: {stats.residual}",
        ]
    return "\n".join(lines) + "\n"


def _render_report(report: AnalysisReport, fmt: str) -> str:
    if fmt == "json":
        return _to_json(report.to_dict())
    if fmt == "csv":
        return _to_csv(REPORT_COLUMNS, [_report_row(report)])
    return _report_text(report)


def _render_sweep(rows: List[SweepRow], axis: str, fmt: str) -> str:
    if fmt == "json":
        return _to_json({"axis": axis, "rows": [row.to_dict() for row in rows]})
    table = [[getattr(row, column) for column in SWEEP_COLUMNS] for row in rows]
    if fmt == "csv":
        return _to_csv(SWEEP_COLUMNS, table)
    cells = [list(SWEEP_COLUMNS)] + [[_format_value(v) for v in row] for row in table]
    widths = [max(len(row[i]) for row in cells) for i in range(len(SWEEP_COLUMNS))]
    return "".join(
        "  ".join(cell.rjust(width) for cell, width in zip(row, widths)).rstrip() + "\n"
        for row in cells
    )


def _render_basis(report: BasisReport, fmt: str) -> str:
    if fmt == "json":
        return _to_json(report.to_dict())
    labels = ("00", "01", "10", "11")
    if fmt == "csv":
        header = ["vector"] + [f"c{label}" for label in labels] + ["entropy_ebits"]
        rows = [
            [f"psi{i + 1}"] + [complex(z) for z in vector] + [entropy]
            for i, (vector, entropy) in enumerate(zip(report.vectors, report.entropies))
        ]
        return _to_csv(header, rows)

    def show(z: complex) -> str:
        return f"{z.real:+.6f}{z.imag:+.6f}i"

    lines = [f"NME basis for ell={_format_value(report.ell)}, p={_format_value(report.p)}"]
    for i, (vector, entropy) in enumerate(zip(report.vectors, report.entropies)):
        amplitudes = "  ".join(f"{label}:{show(z)}" for label, z in zip(labels, vector))
        lines.append(f"psi{i + 1}  {amplitudes}  entropy={entropy:.6f}")
    lines.append("Overlaps |<psi_i|psi_j>|:")
    for row in report.overlaps:
        lines.append("  " + "  ".join(f"{abs(z):.3e}" for z in row))
    lines.append(f"Completeness residual: {report.completeness_residual:.3e}")
    return "\n".join(lines) + "\n"


def _resolve_config(args: argparse.Namespace) -> ProtocolConfig:
    """Build the protocol configuration from flags; every failure is a usage error."""
    parser: argparse.ArgumentParser = args.subparser
    sources = [args.me, args.spectrum is not None, args.ell is not None]
    if sum(sources) > 1:
        parser.error("use only one of --spectrum, --me or --ell")
    if args.me:
        if args.D is None:
            parser.error("--me requires --D")
        spectrum = SchmidtState.uniform(args.D).spectrum
    elif args.spectrum is not None:
        spectrum = args.spectrum
        if args.D is not None and args.D != len(spectrum):
            parser.error(f"--spectrum has {len(spectrum)} entries but --D is {args.D}")
    elif args.ell is not None:
        if args.D not in (None, 2):
            parser.error("--ell describes a two-qubit resource; --D must be 2")
        spectrum = SchmidtState.from_ell(args.ell).spectrum
    else:
        parser.error("one of --spectrum, --me or --ell is required")

    try:
        config = ProtocolConfig(
            d=args.d if args.d is not None else len(spectrum),
            spectrum=tuple(spectrum),
            trials=args.trials,
            seed=args.seed,
            scheme=args.scheme,
            workers=args.workers,
        )
    except ValueError as e:
        parser.error(str(e))
    return config


def cmd_basis(args: argparse.Namespace, calculator: DenseCodingCalculator) -> str:
    report = calculator.basis_report(args.ell, args.p)
    return _render_basis(report, args.format or "text")


def cmd_analyze(args: argparse.Namespace, calculator: DenseCodingCalculator) -> str:
    config = _resolve_config(args)
    report = calculator.analyze(config, include_simulation=config.trials > 0)
    return _render_report(report, args.format or "text")


def cmd_simulate(args: argparse.Namespace, calculator: DenseCodingCalculator) -> str:
    if args.trials < 1:
        args.subparser.error("simulate needs --trials >= 1")
    config = _resolve_config(args)
    report = calculator.analyze(config, include_simulation=True)
    return _render_report(report, args.format or "text")


def cmd_sweep(args: argparse.Namespace, calculator: DenseCodingCalculator) -> str:
    parser: argparse.ArgumentParser = args.subparser
    if args.axis == "ell":
        if args.range is None:
            parser.error("--axis ell requires --range start:stop:steps")
        if args.d not in (None, 2):
            parser.error("--axis ell sweeps the qubit channel; --d must be 2")
        if args.me:
            parser.error("--axis ell sweeps partially entangled qubits; --me does not apply")
        if args.list is not None:
            parser.error("--list is for --axis D; use --range with --axis ell")
        rows = calculator.sweep_ell(
            args.range, trials=args.trials, seed=args.seed,
            scheme=args.scheme, workers=args.workers,
        )
    else:
        if args.list is None:
            parser.error("--axis D requires --list of dimensions")
        if not args.me:
            parser.error("--axis D sweeps maximally entangled resources; pass --me")
        if args.range is not None:
            parser.error("--range is for --axis ell; use --list with --axis D")
        bad = [D for D in args.list if not 2 <= D <= MAX_DIMENSION]
        if bad:
            parser.error(f"--list dimensions must lie in [2, {MAX_DIMENSION}], got {bad}")
        rows = calculator.sweep_dimension(
            args.d if args.d is not None else 2,
            args.list, trials=args.trials, seed=args.seed,
            scheme=args.scheme, workers=args.workers,
        )
    return _render_sweep(rows, args.axis, args.format or "csv")


def _add_output_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("csv", "json", "text"), default=None,
                     help="Output format (default: text, csv for sweep)")
    sub.add_argument("--output", "-o", type=Path, default=None,
                     help="Write to PATH instead of standard output")
    sub.add_argument("--verbose", "-v", action="count", default=0,
                     help="Log progress to stderr (-vv for debug)")


def _add_run_flags(sub: argparse.ArgumentParser, trials: int) -> None:
    sub.add_argument("--d", type=_bounded_int(2, MAX_DIMENSION), default=None, metavar="DIM",
                     help="Message dimension; d^2 messages (default: D)")
    sub.add_argument("--scheme", choices=sorted(SUPPORTED_SCHEMES), default=DEFAULT_SCHEME,
                     help="Encoding scheme")
    sub.add_argument("--trials", type=_bounded_int(0), default=trials,
                     help=f"Monte Carlo trials (default: {trials})")
    sub.add_argument("--seed", type=_bounded_int(0, 2**64 - 1), default=DEFAULT_SEED,
                     help="64-bit simulation seed")
    sub.add_argument("--workers", type=_bounded_int(1), default=1,
                     help="Worker threads for simulation; results do not depend on it")
    sub.add_argument("--me", action="store_true",
                     help="Use the maximally entangled spectrum")


def _add_resource_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--D", type=_bounded_int(2, MAX_DIMENSION), default=None,
                     metavar="RESOURCE_DIM",
                     help="Resource local dimension (must match --spectrum)")
    sub.add_argument("--spectrum", type=_flag(_values.spectrum, "spectrum"), default=None,
                     help="Comma-separated Schmidt coefficients p_0,...,p_{D-1}")
    sub.add_argument("--ell", type=_flag(_values.complex_value, "complex"), default=None,
                     help="Qubit channel L(|00> + ell|11>)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Probabilistic dense coding with non-maximally entangled resources",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
        epilog="""
Examples:
  # NME basis and its entropies
  %(prog)s basis --ell 0.5 --p 0.5

  # Bound and achievable rate for a partially entangled qubit pair
  %(prog)s analyze --d 2 --spectrum 0.8,0.2

  # Monte Carlo check, JSON report
  %(prog)s simulate --d 2 --spectrum 0.8,0.2 --trials 100000 --seed 7 --format json

  # Success rate against resource dimension for maximally entangled states
  %(prog)s sweep --axis D --list 2,3,4,6 --d 2 --me

Encoding schemes:
  weyl   shift/clock products U^m V^n, any d
  pauli  I, sigma_x, i sigma_y, sigma_z (d = D = 2)
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    basis = commands.add_parser(
        "basis", help="Print the NME basis for (ell, p)", allow_abbrev=False
    )
    basis.add_argument("--ell", type=_flag(_values.complex_value, "complex"), required=True,
                       help="Complex parameter ell as re[+imi]")
    basis.add_argument("--p", type=_flag(_values.complex_value, "complex"), required=True,
                       help="Complex parameter p as re[+imi]")
    _add_output_flags(basis)
    basis.set_defaults(handler=cmd_basis, subparser=basis)

    analyze = commands.add_parser(
        "analyze", help="Analytic report for one configuration", allow_abbrev=False
    )
    _add_resource_flags(analyze)
    _add_run_flags(analyze, trials=0)
    _add_output_flags(analyze)
    analyze.set_defaults(handler=cmd_analyze, subparser=analyze)

    simulate = commands.add_parser(
        "simulate", help="Monte Carlo run with analytic comparison", allow_abbrev=False
    )
    _add_resource_flags(simulate)
    _add_run_flags(simulate, trials=DEFAULT_TRIALS)
    _add_output_flags(simulate)
    simulate.set_defaults(handler=cmd_simulate, subparser=simulate)

    sweep = commands.add_parser(
        "sweep", help="CSV sweep over ell or D", allow_abbrev=False
    )
    sweep.add_argument("--axis", choices=("ell", "D"), required=True, help="Swept parameter")
    sweep.add_argument("--range", type=_flag(_values.float_range, "range"), default=None,
                       help="start:stop:steps for --axis ell")
    sweep.add_argument("--list", type=_flag(_values.int_list, "list"), default=None,
                       help="Comma-separated dimensions for --axis D")
    _add_run_flags(sweep, trials=0)
    _add_output_flags(sweep)
    sweep.set_defaults(handler=cmd_sweep, subparser=sweep)

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", output)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns the process exit code (usage errors exit 2 via argparse)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    calculator = DenseCodingCalculator()
    try:
        text = args.handler(args, calculator)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        print(f"Unexpected error: {e}", file=sys.stderr)
        return 1

    try:
        _emit(text, args.output)
    except OSError as e:
        print(f"Error writing output: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
