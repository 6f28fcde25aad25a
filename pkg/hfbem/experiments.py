"""Error sweeps over wavenumber and degree, boundary-layer and shadow diagnostics."""
import dataclasses
import math
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from hfbem._exceptions import ConfigurationError
from hfbem._exceptions import DiagnosticError
from hfbem._exceptions import HfbemError
from hfbem._exceptions import InvalidArgumentError
from hfbem._exceptions import ResourceError
from hfbem._logging import log_to_file
from hfbem._logging import logger
from hfbem.analytic import CircleSeriesSpec
from hfbem.analytic import circle_density_on_grid
from hfbem.constants import DEFAULT_D_LIST
from hfbem.constants import DEFAULT_K_LIST
from hfbem.constants import DEFAULT_MAX_NODES
from hfbem.constants import DEFAULT_MIN_WAVENUMBER
from hfbem.constants import DEFAULT_PPW
from hfbem.constants import DEFAULT_REFERENCE_PPW
from hfbem.constants import LARGE_WAVENUMBER
from hfbem.files import pointwise_filename
from hfbem.files import write_columns
from hfbem.files import write_error_vs_degree
from hfbem.files import write_gnuplot_scripts
from hfbem.files import write_table
from hfbem.galerkin import GalerkinSolution
from hfbem.galerkin import galerkin_solve
from hfbem.galerkin import log10_l2_error
from hfbem.galerkin import pointwise_log10_error
from hfbem.galerkin import reconstruct
from hfbem.galerkin import relative_l2_error
from hfbem.geometry import IncidentWave
from hfbem.geometry import ParametricBoundary
from hfbem.geometry import ShadowGeometry
from hfbem.geometry import layer_weight
from hfbem.geometry import make_circle
from hfbem.geometry import make_ellipse
from hfbem.geometry import shadow_geometry
from hfbem.nystrom import DiscreteDensity
from hfbem.nystrom import NystromSystem
from hfbem.nystrom import PeriodicGrid
from hfbem.nystrom import assemble
from hfbem.nystrom import build_grid
from hfbem.nystrom import resample
from hfbem.nystrom import slow_envelope
from hfbem.nystrom import solve_reference
from hfbem.nystrom import solve_system
from hfbem.spaces import build_space
from hfbem.types import GeometryKind
from hfbem.types import Method

STATUS_OK = "ok"
STATUS_FAILED = "failed"
# fractions of the lit level bounding the shadow-boundary transition
LAYER_LOW = 0.25
LAYER_HIGH = 0.75

log = logger(__name__)

# sweep failures worth recording per cell rather than aborting the run
CELL_ERRORS = (HfbemError, np.linalg.LinAlgError, MemoryError)


@dataclasses.dataclass(frozen=True)
class GeometrySpec:
    """Obstacle selection; the ellipse defaults are the 3/2 by 1/2 ellipse rotated by pi/6."""

    kind: GeometryKind = GeometryKind.CIRCLE
    radius: float = 1.0
    semi_a: float = 1.5
    semi_b: float = 0.5
    rotation: float = math.pi / 6.0

    def build(self) -> ParametricBoundary:
        if self.kind == GeometryKind.CIRCLE:
            return make_circle(self.radius)
        return make_ellipse(self.semi_a, self.semi_b, self.rotation)


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    geometry: GeometrySpec = GeometrySpec()
    incidence: tuple[float, float] = (1.0, 0.0)
    ks: tuple[float, ...] = DEFAULT_K_LIST
    degrees: tuple[int, ...] = DEFAULT_D_LIST
    method: Method = Method.COV
    m: Optional[int] = None
    xi: tuple[float, float] = (1.0, 1.0)
    zeta: tuple[float, float] = (1.0, 1.0)
    xi_prime: Optional[tuple[float, float]] = None
    zeta_prime: Optional[tuple[float, float]] = None
    ppw: float = DEFAULT_PPW
    reference_ppw: float = DEFAULT_REFERENCE_PPW
    output_dir: str = "output"
    allow_large: bool = False
    max_nodes: int = DEFAULT_MAX_NODES
    workers: int = 1
    min_wavenumber: float = DEFAULT_MIN_WAVENUMBER

    def __post_init__(self):
        if not self.ks:
            raise ConfigurationError("k list must not be empty")
        if not self.degrees:
            raise ConfigurationError("degree list must not be empty")
        low = [k for k in self.ks if not k >= self.min_wavenumber]
        if low:
            raise ConfigurationError(f"wavenumbers {low} are below k0={self.min_wavenumber:g}")
        if any(d < 1 for d in self.degrees):
            raise ConfigurationError(f"degrees must be at least 1, got {list(self.degrees)}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be at least 1, got {self.workers}")


@dataclasses.dataclass(frozen=True)
class ErrorRecord:
    k: float
    d: int
    method: Method
    dim: int = 0
    rel_l2_error: float = math.nan
    log10_error: float = math.nan
    wall_time_seconds: float = 0.0
    condition: float = math.nan
    status: str = STATUS_OK
    error: str = ""
    ill_conditioned: bool = False

    @property
    def failed(self) -> bool:
        return self.status != STATUS_OK


@dataclasses.dataclass(frozen=True)
class PreparedGeometry:
    """Curve with its origin moved so that t1 + t2 = 2P, and the matching shadow geometry."""

    spec: Optional[GeometrySpec]
    curve: ParametricBoundary
    shadow: ShadowGeometry


def prepare_geometry(spec: GeometrySpec, incidence: Sequence[float]) -> PreparedGeometry:
    shadow, curve = shadow_geometry(spec.build(), incidence)
    return PreparedGeometry(spec=spec, curve=curve, shadow=shadow)


def reference_density(
    config: SweepConfig,
    prepared: PreparedGeometry,
    wave: IncidentWave,
    grid: PeriodicGrid,
) -> DiscreteDensity:
    """Analytic series for the circle; a finer Nystrom solve resampled onto the grid otherwise."""
    if prepared.spec is not None and prepared.spec.kind == GeometryKind.CIRCLE:
        spec = CircleSeriesSpec(radius=prepared.spec.radius, k=wave.k)
        return circle_density_on_grid(spec, grid, wave.alpha, offset=prepared.curve.offset)
    fine = solve_reference(
        prepared.curve,
        wave,
        ppw=config.reference_ppw,
        max_nodes=config.max_nodes,
        allow_large=config.allow_large,
    )
    return resample(fine, grid)


def _check_wavenumber(config: SweepConfig, k: float) -> None:
    if k > LARGE_WAVENUMBER and not config.allow_large:
        raise ResourceError(0, config.max_nodes, reason=f"k={k:g} is above {LARGE_WAVENUMBER:g}")


def _solve_cell(
    config: SweepConfig,
    prepared: PreparedGeometry,
    wave: IncidentWave,
    system: NystromSystem,
    d: int,
) -> GalerkinSolution:
    basis = build_space(
        config.method,
        prepared.shadow,
        prepared.curve,
        wave,
        d,
        m=config.m,
        xi=config.xi,
        zeta=config.zeta,
        xi_prime=config.xi_prime,
        zeta_prime=config.zeta_prime,
    )
    return galerkin_solve(prepared.curve, wave, basis, system, system.grid)


def _failed(k: float, d: int, method: Method, ex: BaseException, elapsed: float = 0.0) -> ErrorRecord:
    return ErrorRecord(
        k=k,
        d=d,
        method=method,
        wall_time_seconds=elapsed,
        status=STATUS_FAILED,
        error=str(ex) or type(ex).__name__,
    )


def _sweep_wavenumber(
    config: SweepConfig,
    prepared: PreparedGeometry,
    k: float,
) -> tuple[list[ErrorRecord], Optional[PeriodicGrid], dict[int, np.ndarray]]:
    """All degrees at one wavenumber sharing the grid, the Nystrom matrix and the reference."""
    start = time.perf_counter()
    try:
        _check_wavenumber(config, k)
        wave = IncidentWave(config.incidence, k, min_wavenumber=config.min_wavenumber)
        grid = build_grid(prepared.curve, k, config.ppw, max_nodes=config.max_nodes, allow_large=config.allow_large)
        log.info(f"k={k:g}: {grid.n} nodes")
        system = assemble(prepared.curve, wave, grid)
        reference = reference_density(config, prepared, wave, grid)
    except CELL_ERRORS as ex:
        log.error(f"k={k:g}: {ex}")
        elapsed = time.perf_counter() - start
        return [_failed(k, d, config.method, ex, elapsed) for d in config.degrees], None, {}
    shared = time.perf_counter() - start
    log.info(f"k={k:g}: assembly and reference took {shared:.2f} s")

    records = []
    pointwise: dict[int, np.ndarray] = {}
    for d in config.degrees:
        cell_start = time.perf_counter()
        try:
            solution = _solve_cell(config, prepared, wave, system, d)
            approximation = reconstruct(solution)
            record = ErrorRecord(
                k=k,
                d=d,
                method=config.method,
                dim=solution.basis.dimension,
                rel_l2_error=relative_l2_error(approximation, reference),
                log10_error=log10_l2_error(approximation, reference),
                wall_time_seconds=time.perf_counter() - cell_start,
                condition=solution.condition,
                ill_conditioned=solution.ill_conditioned,
            )
            pointwise[d] = pointwise_log10_error(approximation, reference)
            log.info(
                f"k={k:g} d={d}: dim {record.dim}, relative error {record.rel_l2_error:.3e}"
                f" in {record.wall_time_seconds:.2f} s"
            )
        except CELL_ERRORS as ex:
            log.error(f"k={k:g} d={d}: {ex}")
            record = _failed(k, d, config.method, ex, time.perf_counter() - cell_start)
        records.append(record)
    return records, grid, pointwise


def _sweep_rows(records: Sequence[ErrorRecord]) -> list[list]:
    rows = []
    for r in records:
        if r.failed:
            rows.append([r.k, r.d, r.method.value, None, None, None, None, r.status])
        else:
            rows.append([r.k, r.d, r.method.value, r.dim, r.rel_l2_error, r.log10_error, r.condition, r.status])
    return rows


def run_sweep(config: SweepConfig) -> list[ErrorRecord]:
    """Run every (k, d) cell, write the result files into config.output_dir and return the records."""
    output = Path(config.output_dir)
    output.mkdir(parents=True, exist_ok=True)
    with log_to_file(output / "run.log"):
        prepared = prepare_geometry(config.geometry, config.incidence)
        log.info(
            f"sweep on {prepared.curve.name} with {config.method.value}: k={list(config.ks)} d={list(config.degrees)}"
        )
        ks = sorted(set(config.ks))
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                results = list(pool.map(lambda k: _sweep_wavenumber(config, prepared, k), ks))
        else:
            results = [_sweep_wavenumber(config, prepared, k) for k in ks]

        records = []
        for k, (cells, grid, pointwise) in zip(ks, results):
            records.extend(cells)
            if grid is not None and pointwise:
                degrees = sorted(pointwise)
                write_columns(
                    output / pointwise_filename(k),
                    ["t"] + [f"log10_abs_err_d{d}" for d in degrees],
                    [grid.nodes] + [pointwise[d] for d in degrees],
                )
        records.sort(key=lambda r: (r.k, r.d))

        header = ["k", "d", "method", "dim", "rel_l2_error", "log10_error", "condition", "status"]
        write_table(output / "sweep.csv", header, _sweep_rows(records))
        failures = [r for r in records if r.failed]
        if failures:
            write_table(output / "failures.csv", ["k", "d", "error"], [[r.k, r.d, r.error] for r in failures])
            log.error(f"{len(failures)} of {len(records)} cells failed")
        emit_plots(records, output)
    return records


def emit_plots(records: Sequence[ErrorRecord], output_dir) -> list[Path]:
    """error_vs_degree.dat (one row per d, one column per k) and the gnuplot scripts."""
    if not records:
        raise InvalidArgumentError("no records to plot")
    output = Path(output_dir)
    ks = sorted({r.k for r in records})
    degrees = sorted({r.d for r in records})
    table = np.full((len(degrees), len(ks)), math.nan)
    for r in records:
        if not r.failed:
            table[degrees.index(r.d), ks.index(r.k)] = r.log10_error
    data = output / "error_vs_degree.dat"
    write_error_vs_degree(data, ks, degrees, table)
    # pointwise files exist only for wavenumbers with a successful cell
    solved = [k for k in ks if any(r.k == k and not r.failed for r in records)]
    return [data] + write_gnuplot_scripts(output, ks, pointwise_k=solved[0] if solved else None)


@dataclasses.dataclass(frozen=True)
class SingleSolve:
    """One Nystrom plus Galerkin solve with its reference and errors."""

    prepared: PreparedGeometry
    wave: IncidentWave
    solution: GalerkinSolution
    approximation: DiscreteDensity
    reference: DiscreteDensity
    rel_l2_error: float
    log10_error: float
    nystrom: Optional[DiscreteDensity] = None


def solve_single(config: SweepConfig, k: float, d: int, with_nystrom: bool = False) -> SingleSolve:
    """Galerkin solve for one (k, d); with_nystrom also solves the Nystrom system directly."""
    _check_wavenumber(config, k)
    prepared = prepare_geometry(config.geometry, config.incidence)
    wave = IncidentWave(config.incidence, k, min_wavenumber=config.min_wavenumber)
    grid = build_grid(prepared.curve, k, config.ppw, max_nodes=config.max_nodes, allow_large=config.allow_large)
    system = assemble(prepared.curve, wave, grid, workers=config.workers)
    reference = reference_density(config, prepared, wave, grid)
    solution = _solve_cell(config, prepared, wave, system, d)
    approximation = reconstruct(solution)
    return SingleSolve(
        prepared=prepared,
        wave=wave,
        solution=solution,
        approximation=approximation,
        reference=reference,
        rel_l2_error=relative_l2_error(approximation, reference),
        log10_error=log10_l2_error(approximation, reference),
        nystrom=solve_system(system) if with_nystrom else None,
    )


@dataclasses.dataclass(frozen=True)
class LayerDiagnostic:
    """Measured layer widths around t1 at k and factor * k."""

    k_low: float
    k_high: float
    width_low: float
    width_high: float
    weight_low: float
    weight_high: float

    @property
    def ratio(self) -> float:
        return self.width_low / self.width_high

    @property
    def predicted_ratio(self) -> float:
        return (self.k_high / self.k_low) ** (1.0 / 3.0)


def _envelope(
    prepared: PreparedGeometry,
    wave: IncidentWave,
    ppw: float,
    max_nodes: int,
    allow_large: bool,
) -> DiscreteDensity:
    density = solve_reference(prepared.curve, wave, ppw=ppw, max_nodes=max_nodes, allow_large=allow_large)
    return slow_envelope(density, prepared.curve, wave)


def _crossing(nodes: np.ndarray, values: np.ndarray, inner: int, outer: int, level: float) -> float:
    """Parameter where the samples cross level between the adjacent nodes inner and outer."""
    fraction = (values[inner] - level) / (values[inner] - values[outer])
    return float(nodes[inner] + fraction * (nodes[outer] - nodes[inner]))


def _first_crossing(
    nodes: np.ndarray, values: np.ndarray, indices: range, level: float, below: bool
) -> Optional[float]:
    previous = None
    for index in indices:
        reached = values[index] <= level if below else values[index] >= level
        if reached:
            if previous is None:
                return float(nodes[index])
            return _crossing(nodes, values, previous, index, level)
        previous = index
    return None


def layer_width(envelope: DiscreteDensity, shadow: ShadowGeometry) -> float:
    """Width of the transition of |eta_slow| across t1.

    The lower end is where |eta_slow| first drops to a quarter of its value mid-way along the lit arc, scanning from t1
    towards the middle of the shadow; the upper end is where it first reaches three quarters, scanning from t1 towards
    the middle of the lit arc. The profile depends on (s - t1) k^(1/3), so the width follows k^(-1/3).
    """
    nodes = envelope.grid.nodes
    amplitude = np.abs(envelope.values)
    if not np.all(np.isfinite(amplitude)):
        raise DiagnosticError(f"non-finite envelope at k={envelope.k:g}")
    anchor = int(np.argmin(np.abs(nodes - shadow.t1)))
    specular = int(np.argmin(np.abs(nodes - shadow.half_period)))
    lit_level = float(amplitude[specular])
    if not lit_level > 0.0:
        raise DiagnosticError(f"flat envelope at k={envelope.k:g}")

    low_level = LAYER_LOW * lit_level
    high_level = LAYER_HIGH * lit_level
    start = _first_crossing(nodes, amplitude, range(anchor, -1, -1), low_level, below=True)
    end = _first_crossing(nodes, amplitude, range(anchor, specular + 1), high_level, below=False)
    if start is None or end is None:
        raise DiagnosticError(
            f"boundary layer at k={envelope.k:g} not detected: |eta_slow| does not pass"
            f" {low_level:.3g} in the shadow and {high_level:.3g} in the lit region"
        )
    return end - start


def boundary_layer_diagnostic(
    curve: ParametricBoundary,
    wave: IncidentWave,
    factor: float = 8.0,
    ppw: float = DEFAULT_PPW,
    max_nodes: int = DEFAULT_MAX_NODES,
    allow_large: bool = False,
) -> LayerDiagnostic:
    """Compare the layer width around t1 at wave.k and factor * wave.k."""
    if not factor >= 1.0:
        raise InvalidArgumentError(f"wavenumber factor must be at least 1, got {factor}")
    shadow, shifted = shadow_geometry(curve, wave.alpha)
    prepared = PreparedGeometry(spec=None, curve=shifted, shadow=shadow)
    low = layer_width(_envelope(prepared, wave, ppw, max_nodes, allow_large), shadow)
    if factor == 1.0:
        high = low
    else:
        high_wave = wave.with_wavenumber(factor * wave.k)
        high = layer_width(_envelope(prepared, high_wave, ppw, max_nodes, allow_large), shadow)
    # the weight at t1 + k^(-1/3) is the scale the layer width is expected to follow
    result = LayerDiagnostic(
        k_low=wave.k,
        k_high=factor * wave.k,
        width_low=low,
        width_high=high,
        weight_low=float(layer_weight(shadow, shadow.t1 + wave.k ** (-1.0 / 3.0), wave.k)),
        weight_high=float(layer_weight(shadow, shadow.t1 + (factor * wave.k) ** (-1.0 / 3.0), factor * wave.k)),
    )
    log.info(
        f"layer widths {low:.4e} (k={result.k_low:g}) and {high:.4e} (k={result.k_high:g}):"
        f" ratio {result.ratio:.3f}"
    )
    return result


@dataclasses.dataclass(frozen=True)
class ShadowSample:
    k: float
    max_envelope: float


def shadow_decay(
    curve: ParametricBoundary,
    direction: Sequence[float],
    ks: Sequence[float],
    ppw: float = DEFAULT_PPW,
    max_nodes: int = DEFAULT_MAX_NODES,
    allow_large: bool = False,
) -> list[ShadowSample]:
    """max |eta_slow| over the quarter of the boundary centred on the middle of the shadow, per k."""
    if not ks:
        raise InvalidArgumentError("no wavenumbers given")
    shadow, shifted = shadow_geometry(curve, direction)
    prepared = PreparedGeometry(spec=None, curve=shifted, shadow=shadow)
    samples = []
    for k in ks:
        wave = IncidentWave(tuple(direction), k)
        envelope = _envelope(prepared, wave, ppw, max_nodes, allow_large)
        nodes = envelope.grid.nodes
        # the shadow is centred on t = 0 once t1 + t2 = 2P
        centred = nodes - shadow.period * np.round(nodes / shadow.period)
        deep = np.abs(centred) <= 0.25 * shadow.half_period
        samples.append(ShadowSample(k=float(k), max_envelope=float(np.max(np.abs(envelope.values[deep])))))
        log.info(f"k={k:g}: max |eta_slow| in the deep shadow {samples[-1].max_envelope:.4e}")
    return samples


def strictly_decreasing(samples: Sequence[ShadowSample]) -> bool:
    return all(b.max_envelope < a.max_envelope for a, b in zip(samples, samples[1:]))
