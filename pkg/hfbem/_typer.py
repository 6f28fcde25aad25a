"""Common extensions to Typer for local CLI use."""
from typing import Annotated
from typing import Optional

import typer
from rich.markup import escape

from hfbem._console import console_factory
from hfbem._logging import LogLevel
from hfbem.types import GeometryKind
from hfbem.types import Method

ENV_ALLOW_LARGE = "HFBEM_ALLOW_LARGE"
ENV_LOG_LEVEL = "LOG_LEVEL"
ENV_PPW = "HFBEM_PPW"

AllowLargeOption = Annotated[
    bool,
    typer.Option(
        "--allow-large",
        envvar=ENV_ALLOW_LARGE,
        help="Allow wavenumbers above 400 and grids above the node cap",
    ),
]
ConfigFilenameOption = Annotated[
    str,
    typer.Option(
        "--config",
        "-c",
        show_default=False,
        help="Sweep configuration file (key = value, or YAML)",
    ),
]
DegreeOption = Annotated[int, typer.Option("--degree", "-d", min=1, help="Polynomial degree on every region")]
FactorOption = Annotated[float, typer.Option("--factor", min=1.0, help="Ratio between the two wavenumbers compared")]
GeometryOption = Annotated[GeometryKind, typer.Option("--geometry", case_sensitive=False, help="Obstacle shape")]
IncidenceOption = Annotated[
    tuple[float, float],
    typer.Option("--incidence", help="Incidence direction (normalized)"),
]
LogLevelOption = Annotated[
    LogLevel,
    typer.Option(
        "--log",
        case_sensitive=False,
        envvar=ENV_LOG_LEVEL,
        help="Log level",
    ),
]
MethodOption = Annotated[Method, typer.Option("--method", case_sensitive=False, help="Galerkin approximation space")]
OutputDirOption = Annotated[
    Optional[str],
    typer.Option("--out", show_default=False, help="Output directory (overrides the configuration)"),
]
PpwOption = Annotated[
    float,
    typer.Option(
        "--ppw",
        min=1.0,
        envvar=ENV_PPW,
        help="Grid points per wavelength",
    ),
]
RadiusOption = Annotated[float, typer.Option("--radius", min=0.0, help="Circle radius")]
WavenumberOption = Annotated[float, typer.Option("--k", "-k", show_default=False, help="Wavenumber")]
WavenumberListOption = Annotated[list[float], typer.Option("--k", "-k", show_default=False, help="Wavenumber (repeat)")]
WorkersOption = Annotated[int, typer.Option("--workers", min=1, help="Threads used for matrix assembly")]


def error_out(message: str, exit_code: int = 1) -> None:
    """Print provided error message (with red ERROR prefix) and exit."""
    console_factory().print(f"[red]ERROR:[/red] {escape(message)}")
    raise typer.Exit(exit_code)
