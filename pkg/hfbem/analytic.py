"""Separation-of-variables solution for the sound-hard circle."""
import dataclasses
import math
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from hfbem._exceptions import InvalidArgumentError
from hfbem._logging import logger
from hfbem.nystrom import DiscreteDensity
from hfbem.nystrom import PeriodicGrid
from hfbem.specfun import bessel_table
from hfbem.specfun import series_order

log = logger(__name__)


@dataclasses.dataclass(frozen=True)
class CircleSeriesSpec:
    """Circle radius, wavenumber and series truncation (default from series_order(k r))."""

    radius: float
    k: float
    truncation: Optional[int] = None

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgumentError(f"radius must be positive, got {self.radius}")
        if not self.k > 0:
            raise InvalidArgumentError(f"wavenumber must be positive, got {self.k}")
        minimum = series_order(self.kr)
        if self.truncation is None:
            object.__setattr__(self, "truncation", minimum)
        elif self.truncation < minimum:
            raise InvalidArgumentError(
                f"truncation {self.truncation} is below the required order {minimum} for kr={self.kr:g}"
            )

    @property
    def kr(self) -> float:
        return self.k * self.radius


def _scattered_coefficients(spec: CircleSeriesSpec) -> np.ndarray:
    """c_m = i^(m+2) J'_m / H'_m H_m for m = 0..M; the +m and -m terms share this coefficient."""
    table = bessel_table(spec.kr, spec.truncation)
    m = np.arange(spec.truncation + 1)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        coeffs = (1j ** ((m + 2) % 4)) * table.jp / table.hankel1_derivative * table.hankel1
    coeffs[table.overflow | ~np.isfinite(coeffs)] = 0.0
    return coeffs


def circle_total_field(spec: CircleSeriesSpec, theta: ArrayLike) -> np.ndarray:
    """Total field on the circle at polar angle theta measured from the incidence direction."""
    theta = np.asarray(theta, dtype=float)
    coeffs = _scattered_coefficients(spec)
    m = np.arange(spec.truncation, 0, -1)
    # highest orders first
    terms = 2.0 * coeffs[m][:, None] * np.cos(np.multiply.outer(m, theta.ravel()))
    scattered = np.sum(terms, axis=0) + coeffs[0]
    incident = np.exp(1j * spec.kr * np.cos(theta.ravel()))
    return (incident + scattered).reshape(theta.shape)


def circle_density_on_grid(
    spec: CircleSeriesSpec,
    grid: PeriodicGrid,
    alpha: ArrayLike = (1.0, 0.0),
    offset: float = 0.0,
) -> DiscreteDensity:
    """Exact density at the nodes of an arc-length grid whose parameter origin is moved by offset."""
    if not math.isclose(grid.half_period, math.pi * spec.radius, rel_tol=1e-12):
        raise InvalidArgumentError(f"grid half period {grid.half_period} is not pi * radius for r={spec.radius}")
    alpha = np.asarray(alpha, dtype=float)
    angle = math.atan2(alpha[1], alpha[0])
    theta = (grid.nodes + offset) / spec.radius - angle
    log.debug(f"circle series at kr={spec.kr:g} with M={spec.truncation} on {grid.n} nodes")
    return DiscreteDensity(grid=grid, values=circle_total_field(spec, theta), k=spec.k)
