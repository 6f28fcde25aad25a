"""Double-layer kernel of the combined operator, split into logarithmic and smooth parts.

K(t, s) = (i k / 4) H1_1(k R) <gamma(t) - gamma(s), nu(s)> / R with R = |gamma(t) - gamma(s)|, written as
K = K1 L + K2 where L(t, s) = log(4 sin^2(pi (t - s) / (2P))) and both K1 and K2 are smooth and periodic.
"""
import dataclasses
import math
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import hankel1
from scipy.special import j1

from hfbem.constants import NEAR_DIAGONAL
from hfbem.geometry import IncidentWave
from hfbem.geometry import ParametricBoundary

# maps a boolean mask over the evaluation shape to (kappa, kappa', kappa'') at the masked source points
CurvatureLookup = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclasses.dataclass(frozen=True)
class BoundarySamples:
    """Geometry of the curve sampled once at a set of parameters."""

    t: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    curvature_d1: np.ndarray
    curvature_d2: np.ndarray


def sample_boundary(curve: ParametricBoundary, t: ArrayLike) -> BoundarySamples:
    t = np.asarray(t, dtype=float)
    d1, d2 = curve.curvature_derivatives(t)
    return BoundarySamples(
        t=t,
        normals=curve.normal(t),
        curvature=curve.curvature(t),
        curvature_d1=d1,
        curvature_d2=d2,
    )


def wrap_difference(delta: ArrayLike, period: float) -> np.ndarray:
    """Parameter difference reduced to [-P, P]."""
    delta = np.asarray(delta, dtype=float)
    return delta - period * np.round(delta / period)


def log_factor(delta: ArrayLike, half_period: float) -> np.ndarray:
    """L = log(4 sin^2(pi delta / (2P))); -inf on the diagonal."""
    with np.errstate(divide="ignore"):
        return np.log(4.0 * np.sin(0.5 * math.pi * np.asarray(delta, dtype=float) / half_period) ** 2)


def incident_trace(curve: ParametricBoundary, wave: IncidentWave, t: ArrayLike) -> np.ndarray:
    """Boundary trace exp(i k alpha . gamma(t)) of the incident plane wave."""
    return np.exp(1j * wave.k * (curve.gamma(t) @ wave.alpha))


class KernelSplit:
    """Evaluates K1 and K2 of the double-layer kernel for one curve and wavenumber.

    Within NEAR_DIAGONAL of the diagonal, <chord, nu(s)> / R^2 is replaced by its Taylor expansion
    -kappa/2 - kappa' delta/6 - kappa'' delta^2/24 about s.
    """

    def __init__(self, curve: ParametricBoundary, k: float, near: float = NEAR_DIAGONAL):
        self.curve = curve
        self.k = float(k)
        self.near = near

    def _laplace_ratio(self, delta: np.ndarray, chord: np.ndarray, normals: np.ndarray, lookup: CurvatureLookup):
        """<chord, nu(s)> / R^2 and R, with the near-diagonal expansion substituted."""
        dist = np.linalg.norm(chord, axis=-1)
        normal_dot = np.sum(chord * normals, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = normal_dot / (dist * dist)
        near = np.abs(delta) < self.near
        if np.any(near):
            kappa, kappa_d1, kappa_d2 = lookup(near)
            d = delta[near]
            ratio[near] = -0.5 * kappa - kappa_d1 * d / 6.0 - kappa_d2 * d * d / 24.0
        return ratio, dist

    def _split(self, delta: np.ndarray, ratio: np.ndarray, dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k = self.k
        diagonal = delta == 0.0
        kr = np.where(diagonal, 1.0, k * dist)
        normal_over_r = ratio * dist
        full = 0.25j * k * hankel1(1, kr) * normal_over_r
        log_part = -(k / (4.0 * math.pi)) * j1(kr) * normal_over_r
        with np.errstate(invalid="ignore"):
            smooth = full - log_part * log_factor(delta, self.curve.half_period)
        log_part = np.where(diagonal, 0.0, log_part).astype(complex)
        smooth = np.where(diagonal, ratio / (2.0 * math.pi), smooth)
        return log_part, smooth

    def __call__(self, t: ArrayLike, s: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
        """K1(t, s) and K2(t, s) for broadcastable parameter arrays."""
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        delta = wrap_difference(t - s, self.curve.period)
        chord = self.curve.chord(t, s)

        def lookup(mask: np.ndarray):
            points = s[mask]
            d1, d2 = self.curve.curvature_derivatives(points)
            return self.curve.curvature(points), d1, d2

        ratio, dist = self._laplace_ratio(delta, chord, self.curve.normal(s), lookup)
        return self._split(delta, ratio, dist)

    def log_part(self, t: ArrayLike, s: ArrayLike) -> np.ndarray:
        return self(t, s)[0]

    def smooth_part(self, t: ArrayLike, s: ArrayLike) -> np.ndarray:
        return self(t, s)[1]

    def full(self, t: ArrayLike, s: ArrayLike) -> np.ndarray:
        """K(t, s) evaluated directly from the Hankel function; t != s."""
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        chord = self.curve.chord(t, s)
        dist = np.linalg.norm(chord, axis=-1)
        normal_dot = np.sum(chord * self.curve.normal(s), axis=-1)
        return 0.25j * self.k * hankel1(1, self.k * dist) * normal_dot / dist

    def block(self, sources: BoundarySamples, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """K1 and K2 between targets sources.t[rows] and every source node, as (len(rows), N) arrays."""
        targets = sources.t[rows][:, None]
        nodes = sources.t[None, :]
        delta = wrap_difference(targets - nodes, self.curve.period)
        chord = self.curve.chord(targets, nodes)
        shape = delta.shape

        def lookup(mask: np.ndarray):
            return tuple(
                np.broadcast_to(values[None, :], shape)[mask]
                for values in (sources.curvature, sources.curvature_d1, sources.curvature_d2)
            )

        ratio, dist = self._laplace_ratio(delta, chord, sources.normals[None, :, :], lookup)
        return self._split(delta, ratio, dist)


def double_layer_split(curve: ParametricBoundary, k: float) -> KernelSplit:
    return KernelSplit(curve, k)
