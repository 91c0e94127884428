#!/usr/bin/env python3

import sys
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import replace
from typing import List

import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import Progress, SpinnerColumn, TextColumn, BarColumn, TaskProgressColumn
from rich.table import Table

from .config import Config, CliConfig, load_config_file, log_level_from_env
from .core import utils
from .core.asymptotics import PhaseData, pole_expansion, pole_implicit, predicted_residue_sign
from .core.connection import Params, connection_constants, connection_data
from .core.errors import (DomainError, NotSingularRegime, NumericalFailure, OutOfSpanError,
                          ParameterError, PoleError)
from .core.piv_ode import Branch, OdeSettings, PoleMethod, PoleRecord, integrate
from .core.specfun import pcf_d, pcf_d_prime
from .core.validation import compare_poles, residual_scan, residue_audit

# stdout carries only the data document
console = Console(stderr=True)
logger = logging.getLogger(__name__)

CLASSIFY_HEADER = ('alpha', 'kappa', 'kappa_star', 'rho_re', 'rho_im', 'abs_rho', 'regime', 'b', 'psi')

EXIT_OK = 0
EXIT_INTERRUPTED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4


class ValidationFailed(Exception):
    """Acceptance check of the validate command did not hold."""


def setup_logging(verbose: bool) -> None:
    level = 'INFO' if verbose else log_level_from_env()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def build_config(args: argparse.Namespace) -> CliConfig:
    """Defaults < config file < flags."""
    file_values = load_config_file(args.config) if args.config else None
    return CliConfig.merge(vars(args), file_values)


def ode_settings(config: CliConfig) -> OdeSettings:
    return OdeSettings(rtol=config.rtol, atol=config.atol, x_start=config.x_start)


def emit(text: str, config: CliConfig) -> None:
    if config.output_path:
        utils.write_output(text, config.output_path)
        console.print(f"[{Config.COLORS['success']}]Wrote {config.output_path}[/{Config.COLORS['success']}]")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _classify_row(alpha: float, kappa: float) -> dict:
    data = connection_data(Params(alpha, kappa)).to_dict()
    return {'alpha': alpha, 'kappa': kappa, **data}


def handle_classify(args: argparse.Namespace, config: CliConfig) -> int:
    """Handle the classify command."""
    kappas = args.sweep if args.sweep else [config.kappa]
    # hypothesis check up front so a bad alpha fails before any work is queued
    Params(config.alpha, kappas[0])

    if len(kappas) == 1:
        rows = [_classify_row(config.alpha, kappas[0])]
    else:
        rows = [None] * len(kappas)
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=console,
            disable=not args.verbose,
        ) as progress:
            task = progress.add_task(f"Classifying {len(kappas)} amplitudes", total=len(kappas))
            with ThreadPoolExecutor(max_workers=min(8, len(kappas))) as pool:
                futures = {pool.submit(_classify_row, config.alpha, k): i for i, k in enumerate(kappas)}
                for future in as_completed(futures):
                    rows[futures[future]] = future.result()
                    progress.update(task, advance=1)

    if args.verbose:
        table = Table(title=f"alpha = {config.alpha:g}")
        for column in ('kappa', 'kappa_star', 'abs_rho', 'regime', 'b', 'psi'):
            table.add_column(column)
        for row in rows:
            table.add_row(*[utils.optional_cell(row.get(c)) for c in ('kappa', 'kappa_star', 'abs_rho', 'regime', 'b', 'psi')])
        console.print(table)

    if config.output_format == 'json':
        doc = rows[0] if len(rows) == 1 else {'alpha': config.alpha, 'results': rows}
        emit(utils.json_document(doc), config)
    else:
        emit(utils.tsv_document(CLASSIFY_HEADER, [[utils.optional_cell(r.get(c)) for c in CLASSIFY_HEADER]
                                                  for r in rows]), config)
    return EXIT_OK


def handle_solve(args: argparse.Namespace, config: CliConfig) -> int:
    """Handle the solve command."""
    params = Params(config.alpha, config.kappa)
    console.print(f"[{Config.COLORS['info']}]Integrating alpha={config.alpha:g}, kappa={config.kappa:g} "
                  f"from x={config.x_start:g} to x={config.x_end:g}[/{Config.COLORS['info']}]")
    traj = integrate(params, ode_settings(config), x_end=config.x_end)

    if args.verbose:
        table = Table(title=f"{len(traj.poles)} poles")
        table.add_column("x_pole")
        table.add_column("residue")
        table.add_column("slope")
        for pole in traj.poles:
            table.add_row(f"{pole.x_pole:.12g}", f"{pole.residue_sign:+d}", f"{pole.slope:.12g}")
        console.print(table)

    emit(utils.json_document(traj.to_dict()) if config.output_format == 'json' else traj.to_tsv(), config)
    return EXIT_OK


def _predicted_records(phase: PhaseData, n_min: int, n_max: int, method: PoleMethod) -> List[PoleRecord]:
    locate = pole_implicit if method is PoleMethod.IMPLICIT_PHASE else pole_expansion
    records = []
    for n in range(n_min, n_max + 1):
        for branch in (Branch.PLUS, Branch.MINUS):
            sign = predicted_residue_sign(branch)
            records.append(PoleRecord(locate(n, branch, phase), sign, float(sign), method, n, branch))
    return records


def handle_poles(args: argparse.Namespace, config: CliConfig) -> int:
    """Handle the poles command."""
    params = Params(config.alpha, config.kappa)
    phase = PhaseData.from_connection(connection_constants(params))
    n_min, n_max = args.n
    if not 1 <= n_min <= n_max:
        raise ParameterError(f"invalid pole index range [{n_min}, {n_max}]")

    if args.method in ('implicit', 'expansion'):
        method = PoleMethod(args.method)
        records = _predicted_records(phase, n_min, n_max, method)
        if config.output_format == 'json':
            emit(utils.json_document({'method': method.value, 'poles': [r.to_dict() for r in records]}), config)
        else:
            emit(utils.tsv_document(PoleRecord.TSV_HEADER, [r.to_row() for r in records]), config)
        return EXIT_OK

    comparison = compare_poles(params, (n_min, n_max), ode_settings(config))
    if args.verbose:
        console.print(f"[{Config.COLORS['info']}]max |x_ode - x_implicit| = {comparison.max_d_oi():.3g}[/{Config.COLORS['info']}]")

    if args.method == 'ode':
        records = [replace(r.ode_pole, index_n=r.n, branch=r.branch) for r in comparison.rows]
        if config.output_format == 'json':
            emit(utils.json_document({'method': PoleMethod.ODE_DETECTED.value,
                                      'poles': [r.to_dict() for r in records]}), config)
        else:
            emit(utils.tsv_document(PoleRecord.TSV_HEADER, [r.to_row() for r in records]), config)
    else:
        emit(utils.json_document(comparison.to_dict()) if config.output_format == 'json' else comparison.to_tsv(),
             config)
    return EXIT_OK


def validation_grid(x_end: float, step: float) -> List[float]:
    """Uniform grid from x_end up to the validation ceiling."""
    x_max = Config.VALIDATE_X_MAX
    if not x_end < x_max:
        raise ParameterError(f"x_end={x_end:g} must lie below {x_max:g} for validation")
    if not step > 0.0:
        raise ParameterError(f"grid step must be positive, got {step:g}")
    count = int(round((x_max - x_end) / step)) + 1
    return [float(x) for x in np.linspace(x_end, x_max, count)]


def handle_validate(args: argparse.Namespace, config: CliConfig) -> int:
    """Handle the validate command."""
    params = Params(config.alpha, config.kappa)
    # regime gate before the integration starts
    connection_constants(params)
    grid = validation_grid(config.x_end, args.grid_step)
    traj = integrate(params, ode_settings(config), x_end=config.x_end)
    report = residual_scan(params, grid, trajectory=traj)
    audit = residue_audit(traj)

    if args.verbose:
        table = Table(title="Validation summary")
        table.add_column("check")
        table.add_column("value")
        table.add_row("checkpoints", str(len(report.checkpoints)))
        table.add_row("included", str(len(report.included)))
        table.add_row("max scaled residual", f"{report.max_scaled_residual():.6g}")
        table.add_row("poles audited", str(audit.n_poles))
        table.add_row("residue violations", str(len(audit.violations)))
        console.print(table)
    for violation in audit.violations:
        logger.warning("residue audit: %s", violation)

    if config.output_format == 'json':
        doc = report.to_dict()
        doc['residue_audit'] = audit.to_dict()
        emit(utils.json_document(doc), config)
    else:
        emit(report.to_tsv(), config)

    if not report.passes(Config.RESIDUAL_BOUND):
        raise ValidationFailed(
            f"max scaled residual {report.max_scaled_residual():.6g} exceeds {Config.RESIDUAL_BOUND:g}"
        )
    console.print(f"[{Config.COLORS['success']}]All scaled residuals within {Config.RESIDUAL_BOUND:g}"
                  f"[/{Config.COLORS['success']}]")
    return EXIT_OK


def handle_pcf(args: argparse.Namespace, config: CliConfig) -> int:
    """Handle the pcf command."""
    value = pcf_d(args.nu, args.z)
    deriv = pcf_d_prime(args.nu, args.z)
    if config.output_format == 'json':
        emit(utils.json_document({'nu': args.nu, 'z': args.z, 'd': value, 'd_prime': deriv}), config)
    else:
        emit(utils.tsv_document(('nu', 'z', 'd', 'd_prime'),
                                [[utils.format_float(args.nu), utils.format_float(args.z),
                                  utils.format_float(value), utils.format_float(deriv)]]), config)
    return EXIT_OK


def _add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--output-format', choices=['tsv', 'json'],
                        help='Document format on stdout (default: tsv)')
    parser.add_argument('--json', dest='output_format', action='store_const', const='json',
                        help='Shorthand for --output-format json')
    parser.add_argument('-o', '--output', dest='output_path',
                        help='Write the document to this file instead of stdout')


def _add_problem_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--alpha', type=float, help='PIV parameter alpha (beta is fixed to 0)')
    parser.add_argument('--kappa', type=float, help='Boundary amplitude kappa')
    parser.add_argument('--x-start', type=float, help=f'Seed abscissa (default: {Config.X_START:g})')
    parser.add_argument('--x-end', type=float, help=f'Final abscissa (default: {Config.X_END:g})')
    parser.add_argument('--rtol', type=float, help=f'Relative tolerance (default: {Config.RTOL:g})')
    parser.add_argument('--atol', type=float, help=f'Absolute tolerance (default: {Config.ATOL:g})')
    _add_output_args(parser)


def create_parser() -> argparse.ArgumentParser:
    """Create and return the argument parser."""
    parser = argparse.ArgumentParser(
        description="Clarkson-McLeod Tools - integrate and validate PIV Clarkson-McLeod solutions",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )

    parser.add_argument('--version', action='version',
                        version=f'Clarkson-McLeod Tools v{Config.VERSION}')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='Print progress and summary tables on stderr')
    parser.add_argument('--config', help='key=value file with default parameters (flags take precedence)')

    subparsers = parser.add_subparsers(dest='command', required=True)

    # Classify command
    classify_parser = subparsers.add_parser('classify', help='Connection constants and regime of (alpha, kappa)')
    _add_problem_args(classify_parser)
    classify_parser.add_argument('--sweep', nargs='+', type=float, metavar='KAPPA',
                                 help='Classify several amplitudes concurrently')

    # Solve command
    solve_parser = subparsers.add_parser('solve', help='Integrate from the boundary seed through the pole field')
    _add_problem_args(solve_parser)

    # Poles command
    poles_parser = subparsers.add_parser('poles', help='Predicted and integrated pole locations')
    _add_problem_args(poles_parser)
    poles_parser.add_argument('--n', nargs=2, type=int, default=[5, 12], metavar=('NMIN', 'NMAX'),
                              help='Pole index range (default: 5 12)')
    poles_parser.add_argument('--method', choices=['ode', 'implicit', 'expansion', 'all'], default='all',
                              help='Which columns to compute (default: all)')

    # Validate command
    validate_parser = subparsers.add_parser('validate', help='Residual scan against the singular asymptotics')
    _add_problem_args(validate_parser)
    validate_parser.add_argument('--grid-step', type=float, default=Config.VALIDATE_GRID_STEP,
                                 help=f'Checkpoint spacing (default: {Config.VALIDATE_GRID_STEP:g})')

    # Pcf command
    pcf_parser = subparsers.add_parser('pcf', help='Parabolic cylinder function D_nu(z) and its derivative')
    pcf_parser.add_argument('--nu', type=float, required=True, help='Order nu')
    pcf_parser.add_argument('--z', type=float, required=True, help='Argument z >= 0')
    _add_output_args(pcf_parser)

    return parser


HANDLERS = {
    'classify': handle_classify,
    'solve': handle_solve,
    'poles': handle_poles,
    'validate': handle_validate,
    'pcf': handle_pcf,
}


def run(args: argparse.Namespace) -> int:
    """Dispatch a parsed command and map failures onto exit codes."""
    try:
        try:
            config = build_config(args)
        except (OSError, ValueError) as e:
            console.print(f"[red]Invalid configuration: {str(e)}[/red]")
            return EXIT_INVALID
        return HANDLERS[args.command](args, config)

    except (ParameterError, NotSingularRegime, DomainError, PoleError, OutOfSpanError) as e:
        console.print(f"[red]Error: {str(e)}[/red]")
        return EXIT_INVALID
    except NumericalFailure as e:
        console.print(f"[red]Numerical failure: {str(e)}[/red]")
        return EXIT_NUMERICAL
    except ValidationFailed as e:
        console.print(f"[red]Validation failed: {str(e)}[/red]")
        return EXIT_VALIDATION
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled by user[/yellow]")
        return EXIT_INTERRUPTED


def main(args: List[str] = None) -> None:
    """Main entry point for the CLI."""
    parser = create_parser()
    args = parser.parse_args(args)
    setup_logging(args.verbose)

    try:
        code = run(args)
    except Exception as e:
        console.print(f"[red]Unexpected error: {str(e)}[/red]")
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
