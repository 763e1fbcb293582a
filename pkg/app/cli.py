"""pad-sim command group: one subcommand per figure plus a single-point query."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Optional, Sequence

import click

from app.config import APP_TITLE, APP_VERSION, OUTPUT_DIR_ENV, logger
from backend.figures.config import OUTPUT_FORMATS
from backend.figures.figure_runner import TABLE_RUNNERS, run_point_query
from backend.figures.figure_spec import FigureSpec, build_figure_spec
from backend.figures.table_writer import render_record, render_table, write_text
from core.errors import NumericalError, PadSimError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


def _parse_grid(ctx, param, values: Iterable[str]) -> Optional[Dict[str, str]]:
    grid = {}
    for item in values:
        axis, sep, spec = item.partition('=')
        if not sep or not axis.strip():
            raise click.BadParameter(f"'{item}' is not axis=start:stop:count[:log]", ctx=ctx, param=param)
        grid[axis.strip()] = spec.strip()
    return grid or None


def common_options(command: Callable) -> Callable:
    """Options every figure accepts; anything left unset falls through to the config file and defaults."""
    options = [
        click.option('--p', type=int, help="Auxiliary / target photon number."),
        click.option('--w', type=int, help="Window half-width of the test ensemble."),
        click.option('--delta', type=float, help="Acceptance radius."),
        click.option('--eta', type=float, help="Homodyne efficiency."),
        click.option('--omega', type=float, help="Beam-splitter angle (reflectivity cos²ω)."),
        click.option('--lambda', 'lambda_', type=float, help="Phase applied to mode b."),
        click.option('--theta', type=float, help="Local-oscillator phase of the x detector."),
        click.option('--phi', type=float, help="Local-oscillator phase of the y detector."),
        click.option('--grid', multiple=True, callback=_parse_grid,
                     help="Sampled axis as axis=start:stop:count[:log]; repeatable."),
        click.option('--format', 'format_', type=click.Choice(OUTPUT_FORMATS), help="Output format."),
        click.option('--out', 'output_path', type=click.Path(dir_okay=False, path_type=Path),
                     help="Output file; defaults to $PAD_SIM_OUTPUT_DIR/<figure>.<format>, else stdout."),
        click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False, path_type=Path),
                     help="key=value configuration file."),
        click.option('--jobs', type=int, help="Worker processes for grid evaluation."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _overrides(params: Dict[str, Any]) -> Dict[str, Any]:
    renamed = {'lambda_': 'lambda', 'format_': 'format', 'n': 'n_values', 'rate': 'rates'}
    overrides = {}
    for key, value in params.items():
        if value is None or value == ():
            continue
        overrides[renamed.get(key, key)] = list(value) if isinstance(value, tuple) else value
    return overrides


def _destination(spec: FigureSpec) -> Optional[Path]:
    if spec.output_path is not None:
        return spec.output_path
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if directory:
        return Path(directory) / f"{spec.figure}.{spec.format}"
    return None


def _run(figure: str, params: Dict[str, Any]) -> None:
    config_path = params.pop('config_path', None)
    spec = build_figure_spec(figure, _overrides(params), config_path)
    logger.info(f"Running {figure}")
    if figure == 'point-query':
        text = render_record(run_point_query(spec).model_dump(mode='json'), spec.format)
    else:
        text = render_table(TABLE_RUNNERS[figure](spec), spec.format)
    if write_text(text, _destination(spec)) is None:
        click.echo(text, nl=False)
    logger.info(f"Finished {figure}")


@click.group(name=APP_TITLE, help="Photon-added detection simulator: figure data and single-point queries.")
@click.version_option(version=APP_VERSION, message="%(prog)s %(version)s")
def cli():
    pass


@cli.command()
@common_options
@click.option('--n', type=int, multiple=True, help="Signal photon number; repeatable.")
def pxn(**params):
    """Harmonic-oscillator densities |⟨x|n⟩|² over an x grid."""
    _run('pxn', params)


@cli.command()
@common_options
@click.option('--n', type=int, multiple=True, help="Signal photon number; repeatable.")
def density(**params):
    """Per-component joint homodyne density along the x axis."""
    _run('density', params)


@cli.command('window-convergence')
@common_options
@click.option('--w-max', type=int, help="Largest window half-width.")
def window_convergence(**params):
    """Change of the fidelity as the test window widens."""
    _run('window-convergence', params)


@cli.command()
@common_options
@click.option('--rate', type=float, multiple=True, help="Probability rate R; repeatable.")
@click.option('--p-max', type=int, help="Largest target photon number.")
def rates(**params):
    """Acceptance radius and fidelity at fixed probability rates."""
    _run('rates', params)


@cli.command('equiv-efficiency')
@common_options
def equiv_efficiency(**params):
    """Efficiency of the ideal counter matching the lossy detector."""
    _run('equiv-efficiency', params)


@cli.command('detector-comparison')
@common_options
def detector_comparison(**params):
    """Lossy detector fidelity next to the ideal-but-inefficient counter."""
    _run('detector-comparison', params)


@cli.command('point-query')
@common_options
def point_query(**params):
    """One conditional-result evaluation with every parameter explicit."""
    _run('point-query', params)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command group and map failures onto exit codes."""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name=APP_TITLE, standalone_mode=False)
    except NumericalError as exc:
        logger.error(f"Numerical failure: {exc}")
        click.echo(f"Error: {exc}", err=True)
        return EXIT_NUMERICAL
    except (click.ClickException, PadSimError, ValueError) as exc:
        message = exc.format_message() if isinstance(exc, click.ClickException) else str(exc)
        click.echo(f"Error: {message}", err=True)
        return EXIT_USAGE
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    return rv if isinstance(rv, int) else EXIT_OK


__all__ = ["cli", "main"]
