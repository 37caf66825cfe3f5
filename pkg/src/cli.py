"""
Command-line interface for the truncated-exponential extrema toolkit.

This module provides the CLI using the Click framework: single solves, grid
tables, series coefficient dumps, closed-form minima and the built-in
reference verification.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
3 solver failure.
"""

import json
import sys
from typing import Dict, List, Optional, Union

import click

from . import __version__
from .models import (
    DomainError,
    ECaseParams,
    ExtremumSummary,
    Family,
    RootReport,
    SolverError,
    SolverSettings,
    TABLE_COLUMNS,
    TableRequest,
    UCaseParams,
)
from .s_case import min_ME, s_series_coeffs, solve_s
from .table import OUTPUT_FORMATS, TableGenerator, format_number, render_table
from .u_case import min_MG, solve_u, u_series_coeffs
from .verification import VerificationSuite


EXIT_VERIFY_FAILED = 1
EXIT_DOMAIN_ERROR = 2
EXIT_SOLVER_ERROR = 3

FAMILY_CHOICE = click.Choice([f.value for f in Family], case_sensitive=False)
FORMAT_CHOICE = click.Choice(list(OUTPUT_FORMATS))


class ResultsPrinter:
    """Status and record output for the command-line interface."""

    def display_progress(self, message: str):
        """Progress note on stderr, so stdout stays machine-readable."""
        click.echo(f"⏳ {message}", err=True)

    def display_error(self, error_message: str, exit_code: Optional[int] = None):
        """
        Display an error message.

        Args:
            error_message: Error message to display
            exit_code: Exit with this status when given
        """
        click.echo(f"❌ Error: {error_message}", err=True)
        if exit_code is not None:
            sys.exit(exit_code)

    def display_warning(self, warning_message: str):
        click.echo(f"⚠️  Warning: {warning_message}", err=True)

    def display_success(self, success_message: str):
        click.echo(f"✅ {success_message}")

    def display_record(self, record: Dict[str, object], fmt: str):
        """
        Print one structured record.

        Args:
            record: Field name to value; lists are rendered inline
            fmt: "table", "json" or "csv"
        """
        if fmt == "json":
            click.echo(json.dumps({k: _json_value(v) for k, v in record.items()}))
        elif fmt == "csv":
            click.echo(",".join(record))
            click.echo(",".join(_csv_cell(v) for v in record.values()))
        else:
            width = max(len(k) for k in record)
            for key, value in record.items():
                click.echo(f"{key:<{width}}  {_text_value(value)}")

    def run_guarded(self, action):
        """Run a command body, mapping library errors to exit codes."""
        try:
            action()
        except SolverError as e:
            detail = f" (last bracket {e.last_bracket})" if e.last_bracket else ""
            self.display_error(f"{e}{detail}", exit_code=EXIT_SOLVER_ERROR)
        except (DomainError, ValueError) as e:
            self.display_error(str(e), exit_code=EXIT_DOMAIN_ERROR)


def _text_value(value) -> str:
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_text_value(v) for v in value)
    return str(value)


def _csv_cell(value) -> str:
    if isinstance(value, (list, tuple)):
        return ";".join(_text_value(v) for v in value)
    return _text_value(value)


def _json_value(value):
    if isinstance(value, float):
        return float(format_number(value))
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def make_params(family: str, n: int, delta: float) -> Union[ECaseParams, UCaseParams]:
    """Validated parameter pair for the requested family."""
    if Family(family.upper()) is Family.E:
        return ECaseParams(n, delta)
    return UCaseParams(n, delta)


def root_record(family: str, n: int, delta: float, report: RootReport) -> Dict[str, object]:
    """Flatten a RootReport into an ordered output record."""
    low, high = report.bracket
    return {
        "family": family.upper(),
        "n": n,
        "delta": float(delta),
        "root": report.root,
        "residual": report.residual,
        "bracket_low": low,
        "bracket_high": high,
        "method": report.method.value,
        "iterations": report.iterations,
        "iterands": list(report.iterands),
    }


def summary_record(summary: ExtremumSummary) -> Dict[str, object]:
    return {
        "family": summary.family.value,
        "n": summary.n,
        "delta_star": summary.delta_star,
        "value_star": summary.value_star,
        "delta_low": summary.delta_bounds[0],
        "delta_high": summary.delta_bounds[1],
        "value_low": summary.value_bounds[0],
        "value_high": summary.value_bounds[1],
    }


def _parse_values(values: str) -> List[float]:
    try:
        return [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"Could not parse --values '{values}' as comma-separated numbers")


def _parse_columns(columns: str) -> List[str]:
    return [c.strip() for c in columns.split(",") if c.strip()]


# Click command group
@click.group()
def cli():
    """Maximizers, bounds and minima of truncated-exponential ratio families."""
    pass


@cli.command()
@click.argument("family", type=FAMILY_CHOICE)
@click.argument("n", type=int)
@click.argument("delta", type=float)
@click.option("--tol", default=1e-12, show_default=True, help="Residual tolerance")
@click.option("--max-iter", default=60, show_default=True, help="Iteration cap")
@click.option("--init", "initial", type=float, default=None, help="Explicit first iterand")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="table", show_default=True)
def solve(family: str, n: int, delta: float, tol: float, max_iter: int,
          initial: Optional[float], fmt: str):
    """Solve for the maximizer of one family member."""
    printer = ResultsPrinter()

    def action():
        params = make_params(family, n, delta)
        settings = SolverSettings(tol=tol, max_iter=max_iter)
        solver = solve_s if isinstance(params, ECaseParams) else solve_u
        report = solver(params, settings=settings, initial=initial)
        printer.display_record(root_record(family, n, delta, report), fmt)
        for warning in report.warnings:
            printer.display_warning(warning)

    printer.run_guarded(action)


@cli.command()
@click.argument("family", type=FAMILY_CHOICE)
@click.argument("n", type=int)
@click.option("--start", type=float, default=None, help="First delta of the grid")
@click.option("--stop", type=float, default=None, help="Last delta of the grid")
@click.option("--count", default=11, show_default=True, help="Number of grid points")
@click.option("--values", default=None, help="Explicit comma-separated delta values")
@click.option("--grid", "spacing", type=click.Choice(["lin", "log"]), default="lin",
              show_default=True, help="Grid spacing")
@click.option("--columns", default="root,lower,upper,max_value", show_default=True,
              help=f"Comma-separated subset of {','.join(TABLE_COLUMNS)}")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="table", show_default=True)
@click.option("--jobs", default=1, show_default=True, help="Worker processes")
@click.option("--tol", default=1e-12, show_default=True, help="Residual tolerance")
@click.option("--max-iter", default=60, show_default=True, help="Iteration cap")
@click.option("--output", "-o", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the table to this file instead of stdout")
def table(family: str, n: int, start: Optional[float], stop: Optional[float], count: int,
          values: Optional[str], spacing: str, columns: str, fmt: str, jobs: int,
          tol: float, max_iter: int, output: Optional[str]):
    """Tabulate roots, bounds and maximum values over a delta grid."""
    printer = ResultsPrinter()

    def action():
        column_list = _parse_columns(columns)
        if values is not None:
            request = TableRequest(family=Family(family.upper()), n=n,
                                   delta_grid=_parse_values(values), columns=column_list)
        elif start is not None and stop is not None:
            request = TableRequest.from_range(family.upper(), n, start, stop, count,
                                              spacing, column_list)
        else:
            raise DomainError("Provide either --values or both --start and --stop")
        if jobs < 1:
            raise DomainError("--jobs must be at least 1")

        generator = TableGenerator(
            settings=SolverSettings(tol=tol, max_iter=max_iter),
            jobs=jobs,
            show_progress=output is not None,
        )
        result = generator.generate(request)
        text = render_table(result.frame, fmt)

        if output is None:
            click.echo(text, nl=False)
        else:
            with open(output, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            printer.display_success(f"Wrote {len(result.frame)} rows to {output}")
        for warning in result.warnings:
            printer.display_warning(warning)

    printer.run_guarded(action)


@cli.command()
@click.argument("family", type=FAMILY_CHOICE)
@click.argument("n", type=int)
@click.option("--order", "-M", "order", default=5, show_default=True,
              help="Number of coefficients (1..12)")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
def series(family: str, n: int, order: int, fmt: str):
    """Dump exact reversion coefficients of the maximizer series."""
    printer = ResultsPrinter()

    def action():
        coeffs_of = s_series_coeffs if Family(family.upper()) is Family.E else u_series_coeffs
        coeffs = coeffs_of(n, order)
        if fmt == "json":
            click.echo(json.dumps({
                "family": family.upper(),
                "n": n,
                "argument_scale": str(coeffs.argument_scale),
                "coefficients": [str(c) for c in coeffs.coeffs],
                "decimal": [float(format_number(float(c))) for c in coeffs.coeffs],
            }))
            return
        click.echo(f"📊 {family.upper()}-family n={n}, argument = ({coeffs.argument_scale}) * y")
        for m, c in enumerate(coeffs.coeffs, start=1):
            click.echo(f"  {m:>2}  {str(c):>24}  {format_number(float(c))}")

    printer.run_guarded(action)


@cli.command(name="min")
@click.argument("family", type=FAMILY_CHOICE)
@click.argument("n", type=int)
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="table", show_default=True)
def min_command(family: str, n: int, fmt: str):
    """Closed-form minimum over delta of the maximum-value curve."""
    printer = ResultsPrinter()

    def action():
        summary = min_ME(n) if Family(family.upper()) is Family.E else min_MG(n)
        printer.display_record(summary_record(summary), fmt)

    printer.run_guarded(action)


@cli.command()
@click.option("--failures-only", is_flag=True, help="List only failing cases")
def verify(failures_only: bool):
    """Recompute every built-in reference value."""
    printer = ResultsPrinter()
    click.echo("🔍 Running reference verification...")

    report = None

    def action():
        nonlocal report
        report = VerificationSuite().run()

    printer.run_guarded(action)

    for outcome in report.outcomes:
        if failures_only and outcome.passed:
            continue
        status = "✅" if outcome.passed else "❌"
        click.echo(f"  {status} {outcome.case_id:<32} expected {_text_value(outcome.expected):<22} "
                   f"actual {_text_value(outcome.actual):<22} tol {outcome.tolerance:g}")

    failed = report.failed
    total = len(report.outcomes)
    if failed:
        printer.display_error(f"{len(failed)} of {total} cases failed",
                              exit_code=EXIT_VERIFY_FAILED)
    printer.display_success(f"All {total} reference cases passed")


@cli.command()
def version():
    """Show version information."""
    click.echo(f"Truncated Exponential Extrema v{__version__}")


if __name__ == '__main__':
    cli()
