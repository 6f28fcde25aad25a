"""Nystrom discretization of (I - 2K) eta = 2 u_inc with the periodic logarithmic product rule."""
import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional
from typing import Protocol

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import get_lapack_funcs
from scipy.signal import resample as fourier_resample

from hfbem._exceptions import AssemblyError
from hfbem._exceptions import InvalidArgumentError
from hfbem._exceptions import ResourceError
from hfbem._exceptions import SolverError
from hfbem._logging import logger
from hfbem.constants import ASSEMBLY_BLOCK
from hfbem.constants import DEFAULT_MAX_NODES
from hfbem.constants import DEFAULT_PPW
from hfbem.constants import MAX_PPW
from hfbem.constants import MIN_PPW
from hfbem.constants import SINGULAR_CONDITION
from hfbem.geometry import IncidentWave
from hfbem.geometry import ParametricBoundary
from hfbem.kernels import BoundarySamples
from hfbem.kernels import KernelSplit
from hfbem.kernels import incident_trace
from hfbem.kernels import sample_boundary
from hfbem.types import DensityKind

log = logger(__name__)


class KernelBlocks(Protocol):
    def block(self, sources: BoundarySamples, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ...  # pragma: no cover


@dataclasses.dataclass(frozen=True)
class PeriodicGrid:
    """N equispaced nodes t_j = j h on [0, 2P), h = 2P / N, N even."""

    n: int
    half_period: float

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise InvalidArgumentError(f"grid size must be a positive even integer, got {self.n}")
        if not self.half_period > 0:
            raise InvalidArgumentError(f"half period must be positive, got {self.half_period}")

    @property
    def period(self) -> float:
        return 2.0 * self.half_period

    @property
    def spacing(self) -> float:
        return self.period / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.spacing * np.arange(self.n)

    def matches(self, other: "PeriodicGrid") -> bool:
        return self.n == other.n and math.isclose(self.half_period, other.half_period, rel_tol=1e-12)


@dataclasses.dataclass(frozen=True, eq=False)
class DiscreteDensity:
    """Boundary density sampled at the grid nodes, tagged with what it represents."""

    grid: PeriodicGrid
    values: np.ndarray
    k: float
    kind: DensityKind = DensityKind.TOTAL_FIELD
    residual: Optional[float] = None
    condition: Optional[float] = None

    def __post_init__(self):
        if self.values.shape != (self.grid.n,):
            raise InvalidArgumentError(f"density has shape {self.values.shape}, grid has {self.grid.n} nodes")


@dataclasses.dataclass(frozen=True, eq=False)
class NystromSystem:
    """Dense matrix I - 2 K_h and right-hand side 2 u_inc on one grid."""

    grid: PeriodicGrid
    k: float
    matrix: np.ndarray
    rhs: np.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class NystromFactorization:
    """LU factors of a Nystrom matrix with a 1-norm condition estimate."""

    system: NystromSystem
    lu: np.ndarray
    pivots: np.ndarray
    condition: float

    def solve(self, rhs: Optional[np.ndarray] = None) -> np.ndarray:
        return scipy.linalg.lu_solve((self.lu, self.pivots), self.system.rhs if rhs is None else rhs)


def build_grid(
    curve: ParametricBoundary,
    k: float,
    ppw: float = DEFAULT_PPW,
    max_nodes: int = DEFAULT_MAX_NODES,
    allow_large: bool = False,
) -> PeriodicGrid:
    """Smallest even N with at least ppw nodes per wavelength 2 pi / k."""
    if not ppw > 0:
        raise InvalidArgumentError(f"points per wavelength must be positive, got {ppw}")
    if not k > 0:
        raise InvalidArgumentError(f"wavenumber must be positive, got {k}")
    if not MIN_PPW <= ppw <= MAX_PPW:
        log.debug(f"ppw={ppw:g} is outside the usual range [{MIN_PPW:g}, {MAX_PPW:g}]")
    wavelengths = k * curve.period / (2.0 * math.pi)
    n = max(2, int(math.ceil(ppw * wavelengths - 1e-9)))
    n += n % 2
    if n > max_nodes and not allow_large:
        raise ResourceError(n, max_nodes)
    return PeriodicGrid(n=n, half_period=curve.half_period)


def _log_weight_generator(grid: PeriodicGrid) -> np.ndarray:
    """r with R_j(t_i) = r[(i - j) mod N]."""
    n = grid.n // 2
    harmonics = np.zeros(n + 1)
    harmonics[1:n] = 1.0 / np.arange(1, n)
    # sum_{m=1}^{n-1} cos(m tau_d) / m, tau_d = 2 pi d / N
    cosine_sum = 0.5 * grid.n * np.fft.irfft(harmonics, grid.n)
    alternating = np.where(np.arange(grid.n) % 2 == 0, 1.0, -1.0)
    weights = -(2.0 * math.pi / n) * cosine_sum - (math.pi / (n * n)) * alternating
    return weights * grid.half_period / math.pi


def log_quadrature_weights(grid: PeriodicGrid, i: int = 0) -> np.ndarray:
    """Weights R_j(t_i), j = 0..N-1, for integrals of log(4 sin^2(pi (t_i - s) / (2P))) f(s) over one period.

    The rule is exact for trigonometric polynomials of degree below N/2.
    """
    if not 0 <= i < grid.n:
        raise InvalidArgumentError(f"node index {i} is outside 0..{grid.n - 1}")
    return _log_weight_generator(grid)[(i - np.arange(grid.n)) % grid.n]


def log_weight_matrix(grid: PeriodicGrid) -> np.ndarray:
    """Circulant matrix of all R_j(t_i)."""
    return scipy.linalg.circulant(_log_weight_generator(grid))


def assemble(
    curve: ParametricBoundary,
    wave: IncidentWave,
    grid: PeriodicGrid,
    split: Optional[KernelBlocks] = None,
    block_size: int = ASSEMBLY_BLOCK,
    workers: int = 1,
) -> NystromSystem:
    """A[i, j] = delta_ij - 2 (R_j(t_i) K1(t_i, t_j) + h K2(t_i, t_j)) and f_i = 2 u_inc(t_i)."""
    if not math.isclose(grid.half_period, curve.half_period, rel_tol=1e-12):
        raise InvalidArgumentError(f"grid half period {grid.half_period} does not match {curve.name}")
    split = split if split is not None else KernelSplit(curve, wave.k)
    n = grid.n
    h = grid.spacing
    samples = sample_boundary(curve, grid.nodes)
    weights = _log_weight_generator(grid)
    columns = np.arange(n)
    matrix = np.empty((n, n), dtype=complex)
    bad_rows: list[int] = []
    bad_cols: list[int] = []

    def fill(rows: np.ndarray) -> None:
        log_part, smooth = split.block(samples, rows)
        block = -2.0 * (weights[(rows[:, None] - columns[None, :]) % n] * log_part + h * smooth)
        block[np.arange(len(rows)), rows] += 1.0
        bad = np.argwhere(~np.isfinite(block))
        if len(bad):
            bad_rows.extend(int(rows[i]) for i in bad[:, 0])
            bad_cols.extend(int(j) for j in bad[:, 1])
        matrix[rows] = block

    chunks = [columns[start: start + block_size] for start in range(0, n, block_size)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, chunks))
    else:
        for rows in chunks:
            fill(rows)
    if bad_rows:
        raise AssemblyError(bad_rows, bad_cols)

    rhs = 2.0 * incident_trace(curve, wave, grid.nodes)
    log.debug(f"assembled {n}x{n} Nystrom matrix for {curve.name} at k={wave.k:g}")
    return NystromSystem(grid=grid, k=wave.k, matrix=matrix, rhs=rhs)


def factorize(system: NystromSystem) -> NystromFactorization:
    """LU-factor the system; near-singular matrices raise SolverError."""
    lu, pivots = scipy.linalg.lu_factor(system.matrix, check_finite=False)
    gecon = get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, np.linalg.norm(system.matrix, 1), norm="1")
    condition = math.inf if rcond == 0.0 or info != 0 else 1.0 / rcond
    if condition > SINGULAR_CONDITION:
        raise SolverError(system.k, condition)
    return NystromFactorization(system=system, lu=lu, pivots=pivots, condition=condition)


def solve_system(system: NystromSystem, factorization: Optional[NystromFactorization] = None) -> DiscreteDensity:
    """Solve a Nystrom system and report the relative residual and condition estimate."""
    factorization = factorization or factorize(system)
    values = factorization.solve()
    residual = float(np.max(np.abs(system.matrix @ values - system.rhs)) / np.max(np.abs(system.rhs)))
    log.info(
        f"Nystrom solve k={system.k:g} N={system.grid.n}: residual {residual:.2e},"
        f" condition {factorization.condition:.3e}"
    )
    return DiscreteDensity(
        grid=system.grid,
        values=values,
        k=system.k,
        residual=residual,
        condition=factorization.condition,
    )


def solve_reference(
    curve: ParametricBoundary,
    wave: IncidentWave,
    ppw: float = DEFAULT_PPW,
    max_nodes: int = DEFAULT_MAX_NODES,
    allow_large: bool = False,
    workers: int = 1,
) -> DiscreteDensity:
    """Total-field density from a direct Nystrom solve."""
    grid = build_grid(curve, wave.k, ppw=ppw, max_nodes=max_nodes, allow_large=allow_large)
    system = assemble(curve, wave, grid, workers=workers)
    return solve_system(system)


def _modulate(
    density: DiscreteDensity,
    curve: ParametricBoundary,
    wave: IncidentWave,
    source: DensityKind,
    target: DensityKind,
    sign: float,
) -> DiscreteDensity:
    if density.kind != source:
        raise InvalidArgumentError(f"expected a {source.value} density, got {density.kind.value}")
    if not math.isclose(density.k, wave.k, rel_tol=1e-14):
        raise InvalidArgumentError(f"density is at k={density.k:g}, incident wave at k={wave.k:g}")
    phase = np.exp(sign * 1j * wave.k * (curve.gamma(density.grid.nodes) @ wave.alpha))
    return dataclasses.replace(density, values=density.values * phase, kind=target)


def slow_envelope(density: DiscreteDensity, curve: ParametricBoundary, wave: IncidentWave) -> DiscreteDensity:
    """eta_slow(t_j) = eta(t_j) exp(-i k alpha . gamma(t_j))."""
    return _modulate(density, curve, wave, DensityKind.TOTAL_FIELD, DensityKind.SLOW_ENVELOPE, -1.0)


def remodulate(density: DiscreteDensity, curve: ParametricBoundary, wave: IncidentWave) -> DiscreteDensity:
    """Inverse of slow_envelope."""
    return _modulate(density, curve, wave, DensityKind.SLOW_ENVELOPE, DensityKind.TOTAL_FIELD, 1.0)


def resample(density: DiscreteDensity, grid: PeriodicGrid) -> DiscreteDensity:
    """Trigonometric interpolation of a density onto another equispaced grid of the same period."""
    if not math.isclose(density.grid.half_period, grid.half_period, rel_tol=1e-12):
        raise InvalidArgumentError("cannot resample between grids of different periods")
    if density.grid.n == grid.n:
        return dataclasses.replace(density, grid=grid)
    values = fourier_resample(density.values, grid.n)
    return dataclasses.replace(density, grid=grid, values=values, residual=None)
