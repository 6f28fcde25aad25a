"""Piecewise-polynomial approximation spaces with the incident phase extracted.

Two families are built on the shadow geometry: the frequency-adapted partition, whose region widths scale
like k^(-1/3 + eps_j), and the six-interval partition whose transition intervals carry frequency dependent
changes of variables phi_j.
"""
import dataclasses
import math
from collections.abc import Sequence
from typing import Callable
from typing import Optional
from typing import Union

import numpy as np
from numpy.polynomial import legendre
from numpy.typing import ArrayLike
from scipy.special import eval_legendre

from hfbem._exceptions import ConfigurationError
from hfbem._exceptions import InvalidArgumentError
from hfbem._exceptions import NumericError
from hfbem._logging import logger
from hfbem.constants import NEWTON_MAX_ITER
from hfbem.geometry import IncidentWave
from hfbem.geometry import ParametricBoundary
from hfbem.geometry import ShadowGeometry
from hfbem.types import Method
from hfbem.types import RegionLabel

INVERSE_TOLERANCE = 1e-13
ENDPOINT_SLACK = 1e-12

log = logger(__name__)

# user supplied envelope sigma_beta(t); the phase is applied by the space
Envelope = Callable[[np.ndarray], np.ndarray]
Pair = Union[float, Sequence[float]]


def _pair(value: Pair, name: str) -> tuple[float, float]:
    if isinstance(value, (int, float)):
        values = (float(value), float(value))
    else:
        values = tuple(float(v) for v in value)
    if len(values) != 2:
        raise ConfigurationError(f"{name} needs one value or one per shadow boundary, got {value}")
    if not all(v > 0 for v in values):
        raise ConfigurationError(f"{name} values must be positive, got {values}")
    return values


@dataclasses.dataclass(frozen=True)
class Region:
    """Half-open parameter interval [a, b); b may exceed 2P for the region that wraps past the origin."""

    label: RegionLabel
    a: float
    b: float
    index: int = 0

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def name(self) -> str:
        return f"{self.label.value}^{self.index}" if self.index else self.label.value

    def lift(self, t: ArrayLike, period: float) -> np.ndarray:
        """Representative of t modulo the period in [a, a + period)."""
        t = np.asarray(t, dtype=float)
        return self.a + np.mod(t - self.a, period)


@dataclasses.dataclass(frozen=True)
class RegionPartition:
    """Regions covering one period of the boundary parameter without overlap."""

    regions: tuple[Region, ...]
    half_period: float
    k: float

    @property
    def period(self) -> float:
        return 2.0 * self.half_period

    @property
    def total_length(self) -> float:
        return float(sum(r.width for r in self.regions))

    def __len__(self) -> int:
        return len(self.regions)

    def locate(self, t: ArrayLike) -> np.ndarray:
        """Index of the region holding each t; boundary points belong to the region on their right."""
        starts = np.mod([r.a for r in self.regions], self.period)
        order = np.argsort(starts)
        position = np.searchsorted(starts[order], np.mod(np.asarray(t, dtype=float), self.period), side="right")
        return order[(position - 1) % len(self.regions)]


def _normalized(label: RegionLabel, a: float, b: float, period: float, index: int = 0) -> tuple[Region, float]:
    """Region shifted by a multiple of the period so that a lies in [0, period); returns the shift too."""
    shift = 0.0
    if a < 0.0:
        shift = period
    elif a >= period:
        shift = -period
    return Region(label=label, a=a + shift, b=b + shift, index=index), shift


@dataclasses.dataclass(frozen=True)
class EpsilonLadder:
    """Exponents 1/3 > eps_1 > ... > eps_m > 0."""

    values: tuple[float, ...]

    def __post_init__(self):
        values = self.values
        if not values:
            raise InvalidArgumentError("epsilon ladder needs at least one value")
        if not all(0.0 < v < 1.0 / 3.0 for v in values):
            raise InvalidArgumentError(f"epsilons must lie in (0, 1/3), got {values}")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise InvalidArgumentError(f"epsilons must be strictly decreasing, got {values}")

    @property
    def m(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> float:
        """eps_j with the 1-based index used in the region formulas."""
        return self.values[j - 1]


def optimal_epsilons(m: int) -> EpsilonLadder:
    """eps_j = (2m - 2j + 1) / (3 (2m + 1)), balancing the error contributions of all regions."""
    if m <= 0:
        raise InvalidArgumentError(f"m must be a positive integer, got {m}")
    return EpsilonLadder(tuple((2 * m - 2 * j + 1) / (3.0 * (2 * m + 1)) for j in range(1, m + 1)))


def default_m(k: float) -> int:
    """Number of transition levels, growing like log(k^(1/6))."""
    return max(1, math.ceil(math.log(k) / 6.0))


def freq_adapted_partition(
    shadow: ShadowGeometry,
    k: float,
    m: Optional[int] = None,
    xi: Pair = 1.0,
    zeta: Pair = 1.0,
    ladder: Optional[EpsilonLadder] = None,
) -> RegionPartition:
    """The 4m regions IT1^j, IL, IT2^j, SR, ST1^j, SB1, ST2^j, SB2 in that order.

    For m = 1 there are no transition subregions and the partition is IL, SR, SB1, SB2.
    """
    if not k > 1.0:
        raise InvalidArgumentError(f"frequency-adapted regions need k > 1, got {k}")
    m = m if m is not None else default_m(k)
    ladder = ladder or optimal_epsilons(m)
    if ladder.m != m:
        raise InvalidArgumentError(f"ladder has {ladder.m} exponents, expected m={m}")
    xi1, xi2 = _pair(xi, "xi")
    zeta1, zeta2 = _pair(zeta, "zeta")
    t1, t2 = shadow.t1, shadow.t2
    period = shadow.period

    def width(j: int) -> float:
        return k ** (-1.0 / 3.0 + ladder[j])

    if not t1 + xi1 * width(1) < t2 - xi2 * width(1):
        raise ConfigurationError(
            f"IL is empty at k={k:g}: t1 + xi1*k^(-1/3+eps1) >= t2 - xi2*k^(-1/3+eps1); increase k or reduce xi"
        )
    if not t2 + zeta2 * width(1) < period + t1 - zeta1 * width(1):
        raise ConfigurationError(
            f"SR is empty at k={k:g}: t2 + zeta2*k^(-1/3+eps1) >= 2P + t1 - zeta1*k^(-1/3+eps1);"
            " increase k or reduce zeta"
        )

    spans: list[tuple[RegionLabel, float, float, int]] = []
    spans += [(RegionLabel.IT1, t1 + xi1 * width(j + 1), t1 + xi1 * width(j), j) for j in range(1, m)]
    spans.append((RegionLabel.IL, t1 + xi1 * width(1), t2 - xi2 * width(1), 0))
    spans += [(RegionLabel.IT2, t2 - xi2 * width(j), t2 - xi2 * width(j + 1), j) for j in range(1, m)]
    spans.append((RegionLabel.SR, t2 + zeta2 * width(1), period + t1 - zeta1 * width(1), 0))
    spans += [(RegionLabel.ST1, t1 - zeta1 * width(j), t1 - zeta1 * width(j + 1), j) for j in range(1, m)]
    spans.append((RegionLabel.SB1, t1 - zeta1 * width(m), t1 + xi1 * width(m), 0))
    spans += [(RegionLabel.ST2, t2 + zeta2 * width(j + 1), t2 + zeta2 * width(j), j) for j in range(1, m)]
    spans.append((RegionLabel.SB2, t2 - xi2 * width(m), t2 + zeta2 * width(m), 0))

    regions = tuple(_normalized(label, a, b, period, index)[0] for label, a, b, index in spans)
    log.debug(f"frequency-adapted partition k={k:g} m={m}: {len(regions)} regions")
    return RegionPartition(regions=regions, half_period=shadow.half_period, k=k)


@dataclasses.dataclass(frozen=True)
class IntervalMap:
    """phi(s) = anchor + sign * c(s) * k^e(s) on [a, b] with c and e affine in s.

    The endpoint values of c and e are chosen so that phi fixes both endpoints.
    """

    a: float
    b: float
    anchor: float
    sign: float
    exponent_a: float
    exponent_b: float
    coefficient_a: float
    coefficient_b: float
    k: float

    def _fraction(self, s: np.ndarray) -> np.ndarray:
        return (s - self.a) / (self.b - self.a)

    def exponent(self, s: ArrayLike) -> np.ndarray:
        return self.exponent_a + (self.exponent_b - self.exponent_a) * self._fraction(np.asarray(s, dtype=float))

    def coefficient(self, s: ArrayLike) -> np.ndarray:
        return self.coefficient_a + (self.coefficient_b - self.coefficient_a) * self._fraction(
            np.asarray(s, dtype=float)
        )

    def forward(self, s: ArrayLike) -> np.ndarray:
        return self.anchor + self.sign * self.coefficient(s) * self.k ** self.exponent(s)

    def derivative(self, s: ArrayLike) -> np.ndarray:
        span = self.b - self.a
        slope_c = (self.coefficient_b - self.coefficient_a) / span
        slope_e = (self.exponent_b - self.exponent_a) / span
        return self.sign * self.k ** self.exponent(s) * (slope_c + self.coefficient(s) * slope_e * math.log(self.k))

    def inverse(self, y: ArrayLike) -> np.ndarray:
        """Newton iteration safeguarded by bisection; phi is strictly increasing."""
        y = np.asarray(y, dtype=float)
        slack = ENDPOINT_SLACK * max(1.0, abs(self.b))
        if np.any((y < self.a - slack) | (y > self.b + slack)):
            raise InvalidArgumentError(f"values outside [{self.a:.15g}, {self.b:.15g}] cannot be inverted")
        y = np.clip(y, self.a, self.b)
        lo = np.full_like(y, self.a)
        hi = np.full_like(y, self.b)
        s = y.copy()
        for _ in range(2 * NEWTON_MAX_ITER):
            residual = self.forward(s) - y
            if np.all(np.abs(residual) <= INVERSE_TOLERANCE * max(1.0, abs(self.b))):
                return np.clip(s - residual / self.derivative(s), self.a, self.b)
            hi = np.where(residual > 0, s, hi)
            lo = np.where(residual <= 0, s, lo)
            step = s - residual / self.derivative(s)
            outside = (step <= lo) | (step >= hi)
            s = np.where(outside, 0.5 * (lo + hi), step)
        raise NumericError(f"inverse change of variables did not converge in {2 * NEWTON_MAX_ITER} iterations")


@dataclasses.dataclass(frozen=True)
class VariableChange:
    """Maps phi_1..phi_4 on the transition intervals; I5 and I6 use the identity."""

    maps: tuple[Optional[IntervalMap], ...]
    k: float

    def _map(self, j: int) -> Optional[IntervalMap]:
        if not 0 <= j < len(self.maps):
            raise InvalidArgumentError(f"interval index {j} is outside 0..{len(self.maps) - 1}")
        return self.maps[j]

    def forward(self, j: int, s: ArrayLike) -> np.ndarray:
        phi = self._map(j)
        return np.asarray(s, dtype=float) if phi is None else phi.forward(s)

    def derivative(self, j: int, s: ArrayLike) -> np.ndarray:
        phi = self._map(j)
        return np.ones_like(np.asarray(s, dtype=float)) if phi is None else phi.derivative(s)

    def inverse(self, j: int, y: ArrayLike) -> np.ndarray:
        phi = self._map(j)
        return np.asarray(y, dtype=float) if phi is None else phi.inverse(y)


def invert_cov(change: VariableChange, j: int, y: ArrayLike) -> np.ndarray:
    """s in I_j with phi_j(s) = y; j is the 0-based interval index (0 for I1)."""
    return change.inverse(j, y)


def cov_partition(
    shadow: ShadowGeometry,
    k: float,
    xi: Pair = 1.0,
    zeta: Pair = 1.0,
    xi_prime: Optional[Pair] = None,
    zeta_prime: Optional[Pair] = None,
) -> tuple[RegionPartition, VariableChange]:
    """Intervals I1..I6 around the shadow boundaries with the changes of variables on I1..I4."""
    if not k > 1.0:
        raise InvalidArgumentError(f"change-of-variables intervals need k > 1, got {k}")
    t1, t2 = shadow.t1, shadow.t2
    period = shadow.period
    xi1, xi2 = _pair(xi, "xi")
    zeta1, zeta2 = _pair(zeta, "zeta")
    xip1, xip2 = _pair(xi_prime if xi_prime is not None else 0.5 * (t2 - t1), "xi_prime")
    zetap1, zetap2 = _pair(zeta_prime if zeta_prime is not None else 0.5 * (period - (t2 - t1)), "zeta_prime")

    if xi1 > xip1 or xi2 > xip2:
        raise ConfigurationError(f"need xi <= xi_prime, got xi=({xi1:g}, {xi2:g}), xi_prime=({xip1:g}, {xip2:g})")
    if zeta1 > zetap1 or zeta2 > zetap2:
        raise ConfigurationError(
            f"need zeta <= zeta_prime, got zeta=({zeta1:g}, {zeta2:g}), zeta_prime=({zetap1:g}, {zetap2:g})"
        )
    if abs((t1 + xip1) - (t2 - xip2)) > 1e-10:
        raise ConfigurationError(f"need t1 + xi_prime1 = t2 - xi_prime2, got {t1 + xip1:.15g} != {t2 - xip2:.15g}")
    if abs((t2 + zetap2) - (period + t1 - zetap1)) > 1e-10:
        raise ConfigurationError(
            f"need t2 + zeta_prime2 = 2P + t1 - zeta_prime1, got {t2 + zetap2:.15g} != {period + t1 - zetap1:.15g}"
        )

    scale = k ** (-1.0 / 3.0)
    third = -1.0 / 3.0
    # label, a, b, anchor, sign, exponent at a and b, coefficient at a and b
    transitions = [
        (RegionLabel.I1, t1 + xi1 * scale, t1 + xip1, t1, 1.0, third, 0.0, xi1, xip1),
        (RegionLabel.I2, t2 - xip2, t2 - xi2 * scale, t2, -1.0, 0.0, third, xip2, xi2),
        (RegionLabel.I3, t1 - zetap1, t1 - zeta1 * scale, t1, -1.0, 0.0, third, zetap1, zeta1),
        (RegionLabel.I4, t2 + zeta2 * scale, t2 + zetap2, t2, 1.0, third, 0.0, zeta2, zetap2),
    ]
    regions: list[Region] = []
    maps: list[Optional[IntervalMap]] = []
    for label, a, b, anchor, sign, ea, eb, ca, cb in transitions:
        region, shift = _normalized(label, a, b, period)
        regions.append(region)
        maps.append(
            IntervalMap(
                a=region.a,
                b=region.b,
                anchor=anchor + shift,
                sign=sign,
                exponent_a=ea,
                exponent_b=eb,
                coefficient_a=ca,
                coefficient_b=cb,
                k=k,
            )
        )
    for label, a, b in (
        (RegionLabel.I5, t1 - zeta1 * scale, t1 + xi1 * scale),
        (RegionLabel.I6, t2 - xi2 * scale, t2 + zeta2 * scale),
    ):
        regions.append(_normalized(label, a, b, period)[0])
        maps.append(None)

    partition = RegionPartition(regions=tuple(regions), half_period=shadow.half_period, k=k)
    spans = ", ".join(f"{r.name}=[{r.a:.6g}, {r.b:.6g})" for r in regions)
    log.debug(f"change-of-variables partition k={k:g}: {spans}")
    return partition, VariableChange(maps=tuple(maps), k=k)


@dataclasses.dataclass(frozen=True)
class BasisSpec:
    """Phase-extracted Legendre polynomials of degree d_j on each region of a partition."""

    partition: RegionPartition
    degrees: tuple[int, ...]
    curve: ParametricBoundary
    wave: IncidentWave
    change: Optional[VariableChange] = None
    sigma_beta: Optional[Envelope] = None

    def __post_init__(self):
        if len(self.degrees) != len(self.partition):
            raise InvalidArgumentError(f"{len(self.degrees)} degrees given for {len(self.partition)} regions")
        if any(d < 0 for d in self.degrees):
            raise InvalidArgumentError(f"degrees must be non-negative, got {self.degrees}")
        if self.change is not None and len(self.change.maps) != len(self.partition):
            raise InvalidArgumentError("change of variables does not match the partition")

    @property
    def dimension(self) -> int:
        return sum(d + 1 for d in self.degrees)

    @property
    def offsets(self) -> np.ndarray:
        """First column of each region in the sampled basis matrix."""
        return np.concatenate([[0], np.cumsum([d + 1 for d in self.degrees])])

    def phase(self, t: ArrayLike) -> np.ndarray:
        return np.exp(1j * self.wave.k * (self.curve.gamma(t) @ self.wave.alpha))

    def local_coordinate(self, j: int, t: ArrayLike) -> np.ndarray:
        """Image in [-1, 1] of parameters t lying in region j (through phi_j^-1 where a map exists)."""
        region = self.partition.regions[j]
        lifted = region.lift(t, self.partition.period)
        # points just left of a (by roundoff) lift to a full period above
        lifted = np.clip(np.where(lifted >= region.b, lifted - self.partition.period, lifted), region.a, region.b)
        s = lifted if self.change is None else self.change.inverse(j, lifted)
        return np.clip(2.0 * (s - region.a) / region.width - 1.0, -1.0, 1.0)


def dimension(basis: BasisSpec) -> int:
    return basis.dimension


def make_basis(
    partition: RegionPartition,
    degree: Union[int, Sequence[int]],
    curve: ParametricBoundary,
    wave: IncidentWave,
    change: Optional[VariableChange] = None,
    sigma_beta: Optional[Envelope] = None,
) -> BasisSpec:
    degrees = (int(degree),) * len(partition) if isinstance(degree, (int, np.integer)) else tuple(degree)
    return BasisSpec(
        partition=partition,
        degrees=degrees,
        curve=curve,
        wave=wave,
        change=change,
        sigma_beta=sigma_beta,
    )


def build_space(
    method: Method,
    shadow: ShadowGeometry,
    curve: ParametricBoundary,
    wave: IncidentWave,
    degree: Union[int, Sequence[int]],
    m: Optional[int] = None,
    xi: Pair = 1.0,
    zeta: Pair = 1.0,
    xi_prime: Optional[Pair] = None,
    zeta_prime: Optional[Pair] = None,
    sigma_beta: Optional[Envelope] = None,
) -> BasisSpec:
    """Basis for either method on a curve whose origin satisfies t1 + t2 = 2P."""
    if method == Method.FREQ_ADAPTED:
        partition = freq_adapted_partition(shadow, wave.k, m=m, xi=xi, zeta=zeta)
        return make_basis(partition, degree, curve, wave, sigma_beta=sigma_beta)
    partition, change = cov_partition(shadow, wave.k, xi=xi, zeta=zeta, xi_prime=xi_prime, zeta_prime=zeta_prime)
    return make_basis(partition, degree, curve, wave, change=change, sigma_beta=sigma_beta)


def eval_basis(basis: BasisSpec, j: int, n: int, t: ArrayLike) -> np.ndarray:
    """Basis function n of region j at t: zero outside the region, phase times L_n(u) inside."""
    if not 0 <= j < len(basis.partition):
        raise InvalidArgumentError(f"region index {j} is outside 0..{len(basis.partition) - 1}")
    if not 0 <= n <= basis.degrees[j]:
        raise InvalidArgumentError(f"degree {n} is outside 0..{basis.degrees[j]} for region {j}")
    t = np.asarray(t, dtype=float)
    inside = basis.partition.locate(t) == j
    values = np.zeros(t.shape, dtype=complex)
    if np.any(inside):
        u = basis.local_coordinate(j, t[inside])
        values[inside] = basis.phase(t[inside]) * eval_legendre(n, u)
    return values


def sample_basis(basis: BasisSpec, t: ArrayLike) -> np.ndarray:
    """Matrix of every basis function at the parameters t, one column per (region, degree)."""
    t = np.asarray(t, dtype=float)
    owner = basis.partition.locate(t)
    phase = basis.phase(t)
    offsets = basis.offsets
    matrix = np.zeros((len(t), basis.dimension), dtype=complex)
    for j, degree in enumerate(basis.degrees):
        inside = np.flatnonzero(owner == j)
        if len(inside) == 0:
            continue
        u = basis.local_coordinate(j, t[inside])
        block = phase[inside, None] * legendre.legvander(u, degree)
        matrix[inside[:, None], np.arange(offsets[j], offsets[j + 1])[None, :]] = block
    return matrix
