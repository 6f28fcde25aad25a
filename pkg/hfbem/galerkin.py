"""Discrete Galerkin projection of the Nystrom system onto a phase-extracted space."""
import dataclasses
import math
from typing import Optional

import numpy as np
import scipy.linalg

from hfbem._exceptions import InvalidArgumentError
from hfbem._logging import logger
from hfbem.constants import CONDITION_LIMIT
from hfbem.geometry import IncidentWave
from hfbem.geometry import ParametricBoundary
from hfbem.nystrom import DiscreteDensity
from hfbem.nystrom import NystromSystem
from hfbem.nystrom import PeriodicGrid
from hfbem.spaces import BasisSpec
from hfbem.spaces import sample_basis

log = logger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class GalerkinSolution:
    """Coefficients in the unit-normalized basis together with solve diagnostics."""

    basis: BasisSpec
    grid: PeriodicGrid
    coefficients: np.ndarray
    k: float
    condition: float
    residual: float
    projected_residual: float
    columns: np.ndarray
    norms: np.ndarray
    envelope: np.ndarray
    ill_conditioned: bool = False
    used_least_squares: bool = False

    def __post_init__(self):
        if self.coefficients.shape != (self.basis.dimension,):
            raise InvalidArgumentError(
                f"{self.coefficients.shape[0]} coefficients for a basis of dimension {self.basis.dimension}"
            )


def normalized_columns(basis: BasisSpec, grid: PeriodicGrid) -> tuple[np.ndarray, np.ndarray]:
    """Basis sampled at the grid nodes with every column scaled to unit discrete L2 norm, and the scales."""
    columns = sample_basis(basis, grid.nodes)
    norms = np.sqrt(grid.spacing * np.sum(np.abs(columns) ** 2, axis=0))
    empty = np.flatnonzero(norms == 0.0)
    if len(empty):
        raise InvalidArgumentError(
            f"{len(empty)} basis functions have no grid node in their support; refine the grid or lower k"
        )
    return columns / norms, norms


def galerkin_solve(
    curve: ParametricBoundary,
    wave: IncidentWave,
    basis: BasisSpec,
    system: NystromSystem,
    grid: PeriodicGrid,
) -> GalerkinSolution:
    """Solve B^H W (I - 2K_h) B c = B^H W f with W = h, falling back to least squares when ill-conditioned."""
    if not grid.matches(system.grid):
        raise InvalidArgumentError(f"grid with {grid.n} nodes is not the one the system was assembled on")
    if basis.dimension >= grid.n:
        raise InvalidArgumentError(f"basis dimension {basis.dimension} is not below the grid size {grid.n}")

    h = grid.spacing
    columns, norms = normalized_columns(basis, grid)
    envelope = np.zeros(grid.n, dtype=complex)
    rhs_vector = system.rhs
    if basis.sigma_beta is not None:
        envelope = basis.phase(grid.nodes) * np.asarray(basis.sigma_beta(grid.nodes), dtype=complex)
        rhs_vector = rhs_vector - system.matrix @ envelope

    applied = system.matrix @ columns
    matrix = h * (columns.conj().T @ applied)
    rhs = h * (columns.conj().T @ rhs_vector)
    condition = float(np.linalg.cond(matrix))
    ill_conditioned = not condition <= CONDITION_LIMIT
    if ill_conditioned:
        log.warning(
            f"Galerkin matrix at k={wave.k:g} (dim {basis.dimension}) has condition {condition:.3e};"
            " solving the least-squares problem instead"
        )
        root_h = math.sqrt(h)
        coefficients = scipy.linalg.lstsq(root_h * applied, root_h * rhs_vector)[0]
    else:
        q, r, perm = scipy.linalg.qr(matrix, pivoting=True)
        coefficients = np.empty(basis.dimension, dtype=complex)
        coefficients[perm] = scipy.linalg.solve_triangular(r, q.conj().T @ rhs)

    mismatch = applied @ coefficients - rhs_vector
    rhs_norm = np.linalg.norm(rhs)
    projected = float(np.linalg.norm(h * (columns.conj().T @ mismatch)) / rhs_norm) if rhs_norm else 0.0
    residual = float(np.linalg.norm(mismatch) / max(np.linalg.norm(rhs_vector), np.finfo(float).tiny))
    log.debug(
        f"Galerkin k={wave.k:g} dim={basis.dimension} on {curve.name}: condition {condition:.3e},"
        f" residual {residual:.3e}, projected residual {projected:.3e}"
    )
    return GalerkinSolution(
        basis=basis,
        grid=grid,
        coefficients=coefficients,
        k=wave.k,
        condition=condition,
        residual=residual,
        projected_residual=projected,
        columns=columns,
        norms=norms,
        envelope=envelope,
        ill_conditioned=ill_conditioned,
        used_least_squares=ill_conditioned,
    )


def reconstruct(solution: GalerkinSolution, grid: Optional[PeriodicGrid] = None) -> DiscreteDensity:
    """eta_hat at the grid nodes; the assembly grid reuses the stored basis samples."""
    grid = grid or solution.grid
    if grid.matches(solution.grid):
        values = solution.envelope + solution.columns @ solution.coefficients
    else:
        values = (sample_basis(solution.basis, grid.nodes) / solution.norms) @ solution.coefficients
        if solution.basis.sigma_beta is not None:
            values = values + solution.basis.phase(grid.nodes) * solution.basis.sigma_beta(grid.nodes)
    return DiscreteDensity(grid=grid, values=values, k=solution.k)


def region_coefficient_norms(solution: GalerkinSolution) -> np.ndarray:
    """l2 norm of the coefficients belonging to each region."""
    offsets = solution.basis.offsets
    return np.array([
        np.linalg.norm(solution.coefficients[offsets[j]: offsets[j + 1]]) for j in range(len(offsets) - 1)
    ])


def _check_pair(a: DiscreteDensity, b: DiscreteDensity) -> None:
    if not a.grid.matches(b.grid):
        raise InvalidArgumentError(f"densities live on different grids ({a.grid.n} and {b.grid.n} nodes)")
    if a.kind != b.kind:
        raise InvalidArgumentError(f"cannot compare a {a.kind.value} density with a {b.kind.value} density")


def l2_norm(density: DiscreteDensity) -> float:
    """Trapezoidal L2 norm over the arc-length parameter."""
    return float(math.sqrt(density.grid.spacing * np.sum(np.abs(density.values) ** 2)))


def l2_error(a: DiscreteDensity, b: DiscreteDensity) -> float:
    _check_pair(a, b)
    return float(math.sqrt(a.grid.spacing * np.sum(np.abs(a.values - b.values) ** 2)))


def relative_l2_error(a: DiscreteDensity, b: DiscreteDensity) -> float:
    """l2_error(a, b) / ||b||."""
    norm = l2_norm(b)
    if norm == 0.0:
        raise InvalidArgumentError("relative error against a zero density is undefined")
    return l2_error(a, b) / norm


def log10_l2_error(a: DiscreteDensity, b: DiscreteDensity) -> float:
    error = l2_error(a, b)
    return math.log10(error) if error > 0.0 else -math.inf


def pointwise_log10_error(a: DiscreteDensity, b: DiscreteDensity) -> np.ndarray:
    """log10 |a - b| at each node (-inf where they agree exactly)."""
    _check_pair(a, b)
    with np.errstate(divide="ignore"):
        return np.log10(np.abs(a.values - b.values))

