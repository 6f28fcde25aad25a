"""Smooth strictly convex boundary curves in arc-length form, and their shadow geometry."""
import dataclasses
import math
from typing import Callable
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq

from hfbem._exceptions import GeometryError
from hfbem._exceptions import InvalidArgumentError
from hfbem._exceptions import NotConvexError
from hfbem._exceptions import NumericError
from hfbem._logging import logger
from hfbem.constants import DEFAULT_MIN_WAVENUMBER
from hfbem.constants import NEWTON_MAX_ITER
from hfbem.constants import ROOT_TOLERANCE

# a curve callable maps an array of parameters to an array of points with a trailing axis of 2
CurveMap = Callable[[np.ndarray], np.ndarray]
# a chord callable maps two parameter arrays to gamma(t) - gamma(s) without cancellation
ChordMap = Callable[[np.ndarray, np.ndarray], np.ndarray]

DEFAULT_QUADRATURE = 512
SHADOW_SCAN = 4096
SCAN_ZERO = 1e-14
CURVATURE_STEP = 1e-3

log = logger(__name__)


def _stack(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.stack([x, y], axis=-1)


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


@dataclasses.dataclass(frozen=True)
class ParametricBoundary:
    """Counterclockwise, arc-length parameterized closed curve of length 2P.

    The callables are evaluated at `t + offset`, which is how the parameter origin is moved without
    touching the underlying closed-form description.
    """

    half_period: float
    position: CurveMap
    tangent: CurveMap
    second: CurveMap
    name: str = "curve"
    offset: float = 0.0
    chord_map: Optional[ChordMap] = None

    @property
    def period(self) -> float:
        return 2.0 * self.half_period

    def _lift(self, t: ArrayLike) -> np.ndarray:
        return np.asarray(t, dtype=float) + self.offset

    def gamma(self, t: ArrayLike) -> np.ndarray:
        """Point on the curve."""
        return self.position(self._lift(t))

    def d1(self, t: ArrayLike) -> np.ndarray:
        """Unit tangent."""
        return self.tangent(self._lift(t))

    def d2(self, t: ArrayLike) -> np.ndarray:
        """Second derivative with respect to arc length."""
        return self.second(self._lift(t))

    def chord(self, t: ArrayLike, s: ArrayLike) -> np.ndarray:
        """Chord gamma(t) - gamma(s), accurate to relative precision for nearby parameters."""
        if self.chord_map is None:
            return self.gamma(t) - self.gamma(s)
        return self.chord_map(self._lift(t), self._lift(s))

    def normal(self, t: ArrayLike) -> np.ndarray:
        """Outward unit normal (the tangent rotated clockwise)."""
        tan = self.d1(t)
        return _stack(tan[..., 1], -tan[..., 0])

    def curvature(self, t: ArrayLike) -> np.ndarray:
        return _cross(self.d1(t), self.d2(t))

    def curvature_derivatives(self, t: ArrayLike, step: float = CURVATURE_STEP) -> tuple[np.ndarray, np.ndarray]:
        """First and second derivatives of the curvature by central differences."""
        t = np.asarray(t, dtype=float)
        left = self.curvature(t - step)
        mid = self.curvature(t)
        right = self.curvature(t + step)
        return (right - left) / (2.0 * step), (right - 2.0 * mid + left) / (step * step)

    def shifted(self, delta: float) -> "ParametricBoundary":
        """Same curve with the parameter origin moved forward by delta."""
        offset = math.fmod(self.offset + delta, self.period)
        return dataclasses.replace(self, offset=offset)


@dataclasses.dataclass(frozen=True)
class RawCurve:
    """Smooth closed curve in an arbitrary parameterization with period `period`."""

    position: CurveMap
    d1: CurveMap
    d2: CurveMap
    period: float = 2.0 * math.pi
    name: str = "raw"
    chord: Optional[ChordMap] = None


@dataclasses.dataclass(frozen=True)
class IncidentWave:
    """Plane wave exp(i k alpha.x); the direction is normalized on construction."""

    direction: tuple[float, float]
    wavenumber: float
    min_wavenumber: float = DEFAULT_MIN_WAVENUMBER

    def __post_init__(self):
        norm = math.hypot(*self.direction)
        if norm == 0.0 or not math.isfinite(norm):
            raise InvalidArgumentError(f"incidence direction must be a non-zero vector, got {self.direction}")
        if not self.wavenumber >= self.min_wavenumber:
            raise InvalidArgumentError(
                f"wavenumber {self.wavenumber} is below the lower bound k0={self.min_wavenumber}"
            )
        object.__setattr__(self, "direction", (self.direction[0] / norm, self.direction[1] / norm))

    @property
    def alpha(self) -> np.ndarray:
        return np.array(self.direction)

    @property
    def k(self) -> float:
        return self.wavenumber

    def with_wavenumber(self, k: float) -> "IncidentWave":
        return dataclasses.replace(self, wavenumber=k)


@dataclasses.dataclass(frozen=True)
class ShadowGeometry:
    """Shadow-boundary parameters 0 < t1 < t2 < 2P with t1 + t2 = 2P."""

    t1: float
    t2: float
    half_period: float
    direction: tuple[float, float]

    @property
    def period(self) -> float:
        return 2.0 * self.half_period

    def is_illuminated(self, t: ArrayLike) -> np.ndarray:
        t = np.mod(np.asarray(t, dtype=float), self.period)
        return (t > self.t1) & (t < self.t2)


def make_circle(radius: float = 1.0) -> ParametricBoundary:
    """Circle of the given radius, arc-length parameterized from the point (radius, 0)."""
    if not radius > 0:
        raise InvalidArgumentError(f"radius must be positive, got {radius}")

    def position(t: np.ndarray) -> np.ndarray:
        return radius * _stack(np.cos(t / radius), np.sin(t / radius))

    def tangent(t: np.ndarray) -> np.ndarray:
        return _stack(-np.sin(t / radius), np.cos(t / radius))

    def second(t: np.ndarray) -> np.ndarray:
        return -_stack(np.cos(t / radius), np.sin(t / radius)) / radius

    def chord(t: np.ndarray, s: np.ndarray) -> np.ndarray:
        mid = 0.5 * (t + s) / radius
        half = np.sin(0.5 * (t - s) / radius)
        return 2.0 * radius * _stack(-np.sin(mid) * half, np.cos(mid) * half)

    return ParametricBoundary(
        half_period=math.pi * radius,
        position=position,
        tangent=tangent,
        second=second,
        name=f"circle(r={radius:g})",
        chord_map=chord,
    )


def raw_ellipse(semi_a: float, semi_b: float, rotation: float = 0.0) -> RawCurve:
    """Ellipse theta -> Q(rotation) (a cos theta, b sin theta) with exact derivatives."""
    if not (semi_a > 0 and semi_b > 0):
        raise InvalidArgumentError(f"semi-axes must be positive, got ({semi_a}, {semi_b})")
    cos_r, sin_r = math.cos(rotation), math.sin(rotation)

    def rotate(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return _stack(cos_r * x - sin_r * y, sin_r * x + cos_r * y)

    def chord(th: np.ndarray, ph: np.ndarray) -> np.ndarray:
        mid = 0.5 * (th + ph)
        half = np.sin(0.5 * (th - ph))
        return rotate(-2.0 * semi_a * np.sin(mid) * half, 2.0 * semi_b * np.cos(mid) * half)

    return RawCurve(
        position=lambda th: rotate(semi_a * np.cos(th), semi_b * np.sin(th)),
        d1=lambda th: rotate(-semi_a * np.sin(th), semi_b * np.cos(th)),
        d2=lambda th: rotate(-semi_a * np.cos(th), -semi_b * np.sin(th)),
        name=f"ellipse(a={semi_a:g}, b={semi_b:g}, rot={rotation:g})",
        chord=chord,
    )


class _ArcLength:
    """Spectral arc-length function s(theta) and its inverse for a periodic raw curve."""

    def __init__(self, raw: RawCurve, n_quad: int):
        self.raw = raw
        nodes = raw.period * np.arange(n_quad) / n_quad
        speed = np.linalg.norm(raw.d1(nodes), axis=-1)
        coeffs = np.fft.rfft(speed) / n_quad
        # trailing terms below roundoff (and the Nyquist term) do not change s(theta)
        significant = np.flatnonzero(np.abs(coeffs[:-1]) > 1e-18 * abs(coeffs[0]))
        coeffs = coeffs[: max(int(significant[-1]) + 2, 3)]
        self.mean = coeffs[0].real
        self.cos_coeffs = 2.0 * coeffs[1:-1].real
        self.sin_coeffs = -2.0 * coeffs[1:-1].imag
        self.freqs = 2.0 * np.pi * np.arange(1, len(coeffs) - 1) / raw.period
        self.length = self.mean * raw.period

    def speed(self, theta: np.ndarray) -> np.ndarray:
        return np.linalg.norm(self.raw.d1(theta), axis=-1)

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        phase = np.multiply.outer(theta, self.freqs)
        series = (self.cos_coeffs * np.sin(phase) + self.sin_coeffs * (1.0 - np.cos(phase))) / self.freqs
        return self.mean * theta + series.sum(axis=-1)

    def invert(self, s: np.ndarray) -> np.ndarray:
        """Safeguarded Newton iteration for theta(s), s in [0, length)."""
        s = np.asarray(s, dtype=float)
        lo = np.zeros_like(s)
        hi = np.full_like(s, self.raw.period)
        theta = s * self.raw.period / self.length
        tol = 1e-14 * self.length
        for _ in range(NEWTON_MAX_ITER):
            residual = self(theta) - s
            if np.all(np.abs(residual) <= tol):
                # one more step takes the quadratically converging iterate to roundoff
                return theta - residual / self.speed(theta)
            hi = np.where(residual > 0, theta, hi)
            lo = np.where(residual <= 0, theta, lo)
            step = theta - residual / self.speed(theta)
            outside = (step <= lo) | (step >= hi)
            theta = np.where(outside, 0.5 * (lo + hi), step)
        raise NumericError(f"arc-length inversion did not converge in {NEWTON_MAX_ITER} iterations")


def arc_length_form(raw: RawCurve, n_quad: int = DEFAULT_QUADRATURE) -> ParametricBoundary:
    """Reparameterize a smooth closed strictly convex curve by arc length."""
    if n_quad < 8:
        raise InvalidArgumentError(f"n_quad must be at least 8, got {n_quad}")
    nodes = raw.period * np.arange(n_quad) / n_quad
    turning = _cross(raw.d1(nodes), raw.d2(nodes))
    if np.any(turning <= 0.0):
        bad = int(np.argmin(turning))
        raise NotConvexError(f"{raw.name} has non-positive curvature near parameter {nodes[bad]:.6g}")

    arc = _ArcLength(raw, n_quad)
    length = arc.length

    def theta_of(t: np.ndarray) -> np.ndarray:
        return arc.invert(np.mod(t, length))

    def position(t: np.ndarray) -> np.ndarray:
        return raw.position(theta_of(t))

    def tangent(t: np.ndarray) -> np.ndarray:
        deriv = raw.d1(theta_of(t))
        return deriv / np.linalg.norm(deriv, axis=-1, keepdims=True)

    def second(t: np.ndarray) -> np.ndarray:
        theta = theta_of(t)
        first = raw.d1(theta)
        acc = raw.d2(theta)
        speed2 = np.sum(first * first, axis=-1, keepdims=True)
        along = np.sum(first * acc, axis=-1, keepdims=True) / speed2
        return (acc - along * first) / speed2

    def chord(t: np.ndarray, s: np.ndarray) -> np.ndarray:
        if raw.chord is None:
            return position(t) - position(s)
        return raw.chord(theta_of(t), theta_of(s))

    log.debug(f"{raw.name}: arc length {length:.15g} from {n_quad} nodes")
    return ParametricBoundary(
        half_period=0.5 * length,
        position=position,
        tangent=tangent,
        second=second,
        name=raw.name,
        chord_map=chord,
    )


def make_ellipse(semi_a: float, semi_b: float, rotation: float = 0.0, n_quad: int = DEFAULT_QUADRATURE):
    """Rotated ellipse in arc-length form."""
    return arc_length_form(raw_ellipse(semi_a, semi_b, rotation), n_quad=n_quad)


def _sign_changes(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices i where the sign flips between sample i and i+1 (cyclically), split by direction."""
    positive = values >= 0.0
    following = np.roll(positive, -1)
    falling = np.flatnonzero(positive & ~following)
    rising = np.flatnonzero(~positive & following)
    return falling, rising


def shadow_geometry(
    curve: ParametricBoundary,
    direction: ArrayLike,
    n_scan: int = SHADOW_SCAN,
) -> tuple[ShadowGeometry, ParametricBoundary]:
    """Locate the two shadow boundaries and move the origin so that t1 + t2 = 2P.

    Returns the shadow geometry together with the origin-shifted curve it refers to.
    """
    alpha = np.asarray(direction, dtype=float)
    alpha = alpha / np.linalg.norm(alpha)
    period = curve.period

    def incidence(t: float) -> float:
        return float(curve.normal(t) @ alpha)

    grid = period * np.arange(n_scan) / n_scan
    values = curve.normal(grid) @ alpha
    falling, rising = _sign_changes(values)
    if len(falling) != 1 or len(rising) != 1:
        raise GeometryError(
            f"expected exactly two tangency points on {curve.name}, found {len(falling) + len(rising)} sign changes"
        )

    def refine(index: int) -> float:
        # both bracket ends come from the scan; a node within roundoff of zero is the root
        following = (index + 1) % n_scan
        if abs(values[index]) <= SCAN_ZERO:
            return float(grid[index])
        if abs(values[following]) <= SCAN_ZERO:
            return float(grid[following])
        left = grid[index]
        right = grid[index] + period / n_scan
        return brentq(incidence, left, right, xtol=ROOT_TOLERANCE * 0.1, rtol=4 * np.finfo(float).eps)

    enter = refine(int(falling[0]))
    leave = refine(int(rising[0]))
    lit = math.fmod(leave - enter + period, period)
    delta = enter - (curve.half_period - 0.5 * lit)
    shifted = curve.shifted(delta)
    shadow = ShadowGeometry(
        t1=curve.half_period - 0.5 * lit,
        t2=curve.half_period + 0.5 * lit,
        half_period=curve.half_period,
        direction=(float(alpha[0]), float(alpha[1])),
    )
    log.debug(f"{curve.name}: shadow boundaries t1={shadow.t1:.15g}, t2={shadow.t2:.15g} (shift {delta:.3e})")
    return shadow, shifted


def layer_weight(shadow: ShadowGeometry, s: ArrayLike, k: float) -> np.ndarray:
    """Boundary-layer weight W(s, k) = k^(-1/3) + |(s - t1)(t2 - s)|."""
    s = np.asarray(s, dtype=float)
    return k ** (-1.0 / 3.0) + np.abs((s - shadow.t1) * (shadow.t2 - s))
