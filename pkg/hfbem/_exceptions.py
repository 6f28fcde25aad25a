from typing import Optional

from hfbem._typer import error_out


class HfbemError(Exception):
    """Base class for all solver errors."""


class InvalidArgumentError(HfbemError, ValueError):
    """An argument is outside its documented domain."""


class NotConvexError(HfbemError):
    """The curve has non-positive curvature somewhere."""


class GeometryError(HfbemError):
    """The shadow geometry is degenerate (wrong number of tangency points)."""


class NumericError(HfbemError, ArithmeticError):
    """An iteration failed to converge."""


class ResourceError(HfbemError):
    """The requested discretization exceeds the configured resource caps."""

    def __init__(self, nodes: int, cap: int, reason: Optional[str] = None):
        message = reason or f"grid needs {nodes} nodes, above the cap of {cap}"
        message += "; use a smaller wavenumber or ppw, or pass --allow-large"
        super().__init__(message)
        self.nodes = nodes
        self.cap = cap


class AssemblyError(HfbemError):
    """A kernel evaluation produced a non-finite value."""

    def __init__(self, rows: list[int], cols: list[int]):
        pairs = ", ".join(f"({i}, {j})" for i, j in zip(rows[:5], cols[:5]))
        more = f" and {len(rows) - 5} more" if len(rows) > 5 else ""
        super().__init__(f"non-finite kernel values at node pairs {pairs}{more}")
        self.rows = rows
        self.cols = cols


class SolverError(HfbemError):
    """The Nystrom system is singular to working precision."""

    def __init__(self, k: float, condition: float):
        message = (
            f"Nystrom matrix is near-singular at k={k:g} (condition estimate {condition:.3e});"
            " k may be close to an interior Neumann eigenvalue"
        )
        super().__init__(message)
        self.k = k
        self.condition = condition


class ConfigurationError(HfbemError):
    """Parameters violate an ordering or a constraint, or a config file is malformed."""


class DiagnosticError(HfbemError):
    """A diagnostic could not detect the feature it measures."""


def handle_exceptions(ex: Exception, message: Optional[str] = None) -> None:
    """Process exception and print a more concise error."""
    error_out(message or str(ex) or type(ex).__name__)
