#!/usr/bin/env python3
"""Implementation of the hfbem CLI: sweeps, the circle oracle, diagnostics and single solves."""
import dataclasses
from datetime import datetime
from typing import Annotated
from typing import Optional

import numpy as np
import typer
from rich.table import Table

from hfbem._console import console_factory
from hfbem._exceptions import HfbemError
from hfbem._exceptions import handle_exceptions
from hfbem._logging import init_logging
from hfbem._logging import logger
from hfbem._typer import AllowLargeOption
from hfbem._typer import ConfigFilenameOption
from hfbem._typer import DegreeOption
from hfbem._typer import FactorOption
from hfbem._typer import GeometryOption
from hfbem._typer import IncidenceOption
from hfbem._typer import LogLevelOption
from hfbem._typer import MethodOption
from hfbem._typer import OutputDirOption
from hfbem._typer import PpwOption
from hfbem._typer import RadiusOption
from hfbem._typer import WavenumberListOption
from hfbem._typer import WavenumberOption
from hfbem._typer import WorkersOption
from hfbem._typer import error_out
from hfbem.analytic import CircleSeriesSpec
from hfbem.analytic import circle_density_on_grid
from hfbem.config import load_sweep_config
from hfbem.constants import DEFAULT_PPW
from hfbem.experiments import ErrorRecord
from hfbem.experiments import GeometrySpec
from hfbem.experiments import SweepConfig
from hfbem.experiments import boundary_layer_diagnostic
from hfbem.experiments import run_sweep
from hfbem.experiments import shadow_decay
from hfbem.experiments import solve_single
from hfbem.experiments import strictly_decreasing
from hfbem.files import write_density_csv
from hfbem.files import write_galerkin_csv
from hfbem.galerkin import region_coefficient_norms
from hfbem.geometry import IncidentWave
from hfbem.geometry import make_circle
from hfbem.nystrom import build_grid
from hfbem.nystrom import slow_envelope
from hfbem.types import GeometryKind
from hfbem.types import Method

log = logger(__name__)


#################################################
# Utilities
def load_config_with_error_handling(filename: str) -> SweepConfig:
    """Perform error handling around opening a sweep configuration.

    Avoids the standard Typer error handling that is quite verbose.
    """
    try:
        return load_sweep_config(filename)
    except FileNotFoundError:
        message = f"failed to find {filename}"
    except HfbemError as ex:
        message = str(ex)
    except Exception as ex:
        message = f"unable to parse {filename}: {ex}"

    error_out(message)


def _value(x: float, spec: str = ".3e") -> str:
    return "-" if x is None or not np.isfinite(x) else format(x, spec)


def sweep_table(records: list[ErrorRecord]) -> Table:
    table = Table(
        highlight=True,
        expand=False,
        leading=0,
        show_header=True,
        show_edge=True,
    )
    for name in ["k", "d", "dim", "rel. L2 error", "log10 error", "status"]:
        table.add_column(name, justify="right", no_wrap=True, overflow="ignore")
    for r in records:
        status = f"[red]{r.status}[/red]" if r.failed else r.status
        if r.ill_conditioned and not r.failed:
            status += " (lstsq)"
        table.add_row(
            f"{r.k:g}",
            str(r.d),
            str(r.dim) if not r.failed else "-",
            _value(r.rel_l2_error),
            _value(r.log10_error, ".3f"),
            status,
        )
    return table


#################################################
# Top-level stuff
app = typer.Typer(
    no_args_is_help=True,
    help="Galerkin boundary element solver for high-frequency scattering by smooth convex obstacles.",
)
oracle = typer.Typer(
    name="oracle",
    no_args_is_help=True,
    help="Exact reference solutions.",
)
diag = typer.Typer(
    name="diag",
    no_args_is_help=True,
    help="Diagnostics of the total-field density.",
)
app.add_typer(oracle)
app.add_typer(diag)


@app.command("sweep", short_help="Run the error sweep over wavenumbers and degrees")
def sweep(
    config_file: ConfigFilenameOption,
    allow_large: AllowLargeOption = False,
    out: OutputDirOption = None,
    log_level: LogLevelOption = "info",
) -> None:
    init_logging(log_level)
    config = load_config_with_error_handling(config_file)
    if out is not None:
        config = dataclasses.replace(config, output_dir=out)
    if allow_large:
        config = dataclasses.replace(config, allow_large=True)

    starttime = datetime.now()
    try:
        records = run_sweep(config)
    except Exception as ex:
        handle_exceptions(ex)
    delta = datetime.now() - starttime
    log.info(f"Sweep took {delta.total_seconds()} seconds")

    console_factory().print(sweep_table(records))
    failed = sum(1 for r in records if r.failed)
    if failed:
        error_out(f"{failed} of {len(records)} cells failed, see {config.output_dir}/failures.csv")
    typer.echo(f"Wrote results to {config.output_dir}")


@oracle.command("circle", short_help="Write the exact circle density to a CSV file")
def oracle_circle(
    k: WavenumberOption,
    out: Annotated[str, typer.Option("--out", show_default=False, help="CSV file to write")],
    radius: RadiusOption = 1.0,
    incidence: IncidenceOption = (1.0, 0.0),
    ppw: PpwOption = DEFAULT_PPW,
    allow_large: AllowLargeOption = False,
    log_level: LogLevelOption = "info",
) -> None:
    init_logging(log_level)
    try:
        curve = make_circle(radius)
        wave = IncidentWave(incidence, k)
        grid = build_grid(curve, k, ppw, allow_large=allow_large)
        density = circle_density_on_grid(CircleSeriesSpec(radius=radius, k=k), grid, wave.alpha)
        envelope = slow_envelope(density, curve, wave)
        write_density_csv(out, grid.nodes, density.values, envelope.values)
    except Exception as ex:
        handle_exceptions(ex)
    typer.echo(f"Wrote {grid.n} samples to {out}")


@diag.command("layer", short_help="Measure how the shadow-boundary layer narrows with k")
def diag_layer(
    k: WavenumberOption,
    geometry: GeometryOption = GeometryKind.CIRCLE,
    factor: FactorOption = 8.0,
    ppw: PpwOption = DEFAULT_PPW,
    incidence: IncidenceOption = (1.0, 0.0),
    allow_large: AllowLargeOption = False,
    log_level: LogLevelOption = "info",
) -> None:
    init_logging(log_level)
    try:
        curve = GeometrySpec(kind=geometry).build()
        result = boundary_layer_diagnostic(
            curve, IncidentWave(incidence, k), factor=factor, ppw=ppw, allow_large=allow_large
        )
    except Exception as ex:
        handle_exceptions(ex)

    table = Table(show_header=True, show_edge=True, expand=False)
    for name in ["k", "layer width", "W(t1 + k^(-1/3))"]:
        table.add_column(name, justify="right", no_wrap=True)
    table.add_row(f"{result.k_low:g}", f"{result.width_low:.4e}", f"{result.weight_low:.4e}")
    table.add_row(f"{result.k_high:g}", f"{result.width_high:.4e}", f"{result.weight_high:.4e}")
    console = console_factory()
    console.print(table)
    console.print(f"width ratio {result.ratio:.3f} (k^(1/3) scaling predicts {result.predicted_ratio:.3f})")


@diag.command("shadow", short_help="Check that the deep-shadow density decays with k")
def diag_shadow(
    k: WavenumberListOption,
    geometry: GeometryOption = GeometryKind.CIRCLE,
    ppw: PpwOption = DEFAULT_PPW,
    incidence: IncidenceOption = (1.0, 0.0),
    allow_large: AllowLargeOption = False,
    log_level: LogLevelOption = "info",
) -> None:
    init_logging(log_level)
    try:
        curve = GeometrySpec(kind=geometry).build()
        samples = shadow_decay(curve, incidence, sorted(k), ppw=ppw, allow_large=allow_large)
    except Exception as ex:
        handle_exceptions(ex)

    table = Table(show_header=True, show_edge=True, expand=False)
    for name in ["k", "max |eta_slow|"]:
        table.add_column(name, justify="right", no_wrap=True)
    for sample in samples:
        table.add_row(f"{sample.k:g}", f"{sample.max_envelope:.4e}")
    console_factory().print(table)
    if not strictly_decreasing(samples):
        error_out("deep-shadow density does not decrease strictly with k")
    typer.echo("deep-shadow density decreases with k")


@app.command("solve", short_help="Solve once at a single wavenumber and degree")
def solve(
    k: WavenumberOption,
    degree: DegreeOption,
    method: MethodOption = Method.COV,
    geometry: GeometryOption = GeometryKind.CIRCLE,
    incidence: IncidenceOption = (1.0, 0.0),
    ppw: PpwOption = DEFAULT_PPW,
    dump_density: Annotated[
        Optional[str], typer.Option(show_default=False, help="CSV file for the Nystrom density")
    ] = None,
    dump_galerkin: Annotated[
        Optional[str], typer.Option(show_default=False, help="CSV file for the Galerkin approximation")
    ] = None,
    allow_large: AllowLargeOption = False,
    workers: WorkersOption = 1,
    log_level: LogLevelOption = "info",
) -> None:
    init_logging(log_level)
    try:
        config = SweepConfig(
            geometry=GeometrySpec(kind=geometry),
            incidence=incidence,
            ks=(k,),
            degrees=(degree,),
            method=method,
            ppw=ppw,
            allow_large=allow_large,
            workers=workers,
        )
        result = solve_single(config, k, degree, with_nystrom=dump_density is not None)
        curve = result.prepared.curve
        if dump_density is not None:
            envelope = slow_envelope(result.nystrom, curve, result.wave)
            write_density_csv(dump_density, result.nystrom.grid.nodes, result.nystrom.values, envelope.values)
        if dump_galerkin is not None:
            regions = result.solution.basis.partition.regions
            norms = region_coefficient_norms(result.solution)
            rows = [(i, r.name, r.a, r.b, float(n)) for i, (r, n) in enumerate(zip(regions, norms))]
            grid = result.approximation.grid
            write_galerkin_csv(dump_galerkin, grid.nodes, result.approximation.values, rows)
    except Exception as ex:
        handle_exceptions(ex)

    solution = result.solution
    typer.echo(
        f"{curve.name} k={k:g} {method.value} d={degree}: dim {solution.basis.dimension},"
        f" N={solution.grid.n}, condition {solution.condition:.3e}"
    )
    if solution.used_least_squares:
        typer.echo("Galerkin matrix was ill-conditioned; solved the least-squares problem")
    typer.echo(f"relative L2 error {result.rel_l2_error:.6e} (log10 L2 error {result.log10_error:.4f})")


if __name__ == "__main__":
    app()
