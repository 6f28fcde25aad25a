"""Integer-order Bessel functions of real argument.

J_m is computed by Miller's backward recurrence normalized with J_0 + 2 sum J_2m = 1. Y_0 and Y_1 are
seeded from the Neumann series over the same table for moderate arguments and from the Hankel asymptotic
expansion for large ones, and Y_m follows by forward recurrence, which is stable for the dominant solution.
"""
import dataclasses
import math

import numpy as np

from hfbem._exceptions import InvalidArgumentError

EULER_GAMMA = 0.57721566490153286061
ASYMPTOTIC_SWITCH = 25.0
RESCALE_LIMIT = 1e250
ASYMPTOTIC_TOL = 1e-17


@dataclasses.dataclass(frozen=True)
class BesselTable:
    """J_m, J'_m, Y_m, Y'_m at one argument for m = 0..M."""

    x: float
    j: np.ndarray
    jp: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    overflow: np.ndarray

    @property
    def order(self) -> int:
        return len(self.j) - 1

    @property
    def hankel1(self) -> np.ndarray:
        return self.j + 1j * self.y

    @property
    def hankel1_derivative(self) -> np.ndarray:
        return self.jp + 1j * self.yp


def series_order(kr: float) -> int:
    """Truncation order M(kr) beyond which J_m(kr) is negligible."""
    return int(math.ceil(kr + 10.0 * kr ** (1.0 / 3.0) + 20.0))


def miller_start(order: int, x: float) -> int:
    return max(order, int(math.ceil(x))) + int(math.ceil(10.0 * math.sqrt(order + x))) + 20


def _miller_j(x: float, top: int) -> np.ndarray:
    """Normalized J_0..J_top by backward recurrence from top + 1."""
    j = np.zeros(top + 2)
    j[top] = 1e-30
    for m in range(top, 0, -1):
        j[m - 1] = (2.0 * m / x) * j[m] - j[m + 1]
        if abs(j[m - 1]) > RESCALE_LIMIT:
            j[m - 1:] /= RESCALE_LIMIT
    norm = j[0] + 2.0 * np.sum(j[2::2])
    return j[: top + 1] / norm


def _neumann_y01(x: float, j: np.ndarray) -> tuple[float, float]:
    """Y_0, Y_1 from the Neumann series in J_2k, stable for moderate x."""
    log_term = math.log(0.5 * x) + EULER_GAMMA
    half = (len(j) - 2) // 2
    k = np.arange(1, half + 1)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    even = j[2 * k]
    y0 = (2.0 / math.pi) * log_term * j[0] - (4.0 / math.pi) * np.sum(signs * even / k)
    diff = j[2 * k - 1] - j[2 * k + 1]
    y1 = (
        -(2.0 / math.pi) * j[0] / x
        + (2.0 / math.pi) * log_term * j[1]
        + (4.0 / math.pi) * np.sum(signs * diff / (2.0 * k))
    )
    return float(y0), float(y1)


def _hankel_asymptotic(order: int, x: float) -> tuple[float, float]:
    """J_order, Y_order for large x from the Hankel P/Q expansions."""
    mu = 4.0 * order * order
    p_sum, q_sum = 0.0, 0.0
    term = 1.0
    previous = math.inf
    k = 0
    while True:
        size = abs(term)
        if size < ASYMPTOTIC_TOL or size > previous:
            break
        if k % 2 == 0:
            p_sum += term if (k // 2) % 2 == 0 else -term
        else:
            q_sum += term if ((k - 1) // 2) % 2 == 0 else -term
        previous = size
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
    chi = x - (0.5 * order + 0.25) * math.pi
    scale = math.sqrt(2.0 / (math.pi * x))
    j = scale * (p_sum * math.cos(chi) - q_sum * math.sin(chi))
    y = scale * (p_sum * math.sin(chi) + q_sum * math.cos(chi))
    return j, y


def bessel_table(x: float, order: int) -> BesselTable:
    """Tabulate J_m, J'_m, Y_m, Y'_m for m = 0..order at the argument x > 0.

    Entries of Y where the forward recurrence overflows are set to -inf and flagged in `overflow`.
    """
    if not x > 0 or not math.isfinite(x):
        raise InvalidArgumentError(f"Bessel argument must be positive and finite, got {x}")
    if order < 0:
        raise InvalidArgumentError(f"Bessel order must be non-negative, got {order}")

    top = miller_start(order + 1, x)
    j_all = _miller_j(x, top)
    if x > ASYMPTOTIC_SWITCH:
        y0 = _hankel_asymptotic(0, x)[1]
        y1 = _hankel_asymptotic(1, x)[1]
    else:
        y0, y1 = _neumann_y01(x, j_all)

    y = np.empty(order + 2)
    y[0] = y0
    y[1] = y1
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, order + 1):
            y[m + 1] = (2.0 * m / x) * y[m] - y[m - 1]
    y[~np.isfinite(y)] = -np.inf

    j = j_all[: order + 2]
    m = np.arange(order + 1)
    jp = np.empty(order + 1)
    yp = np.empty(order + 1)
    jp[0] = -j[1]
    yp[0] = -y[1]
    with np.errstate(over="ignore", invalid="ignore"):
        jp[1:] = j[: order] - (m[1:] / x) * j[1: order + 1]
        yp[1:] = y[: order] - (m[1:] / x) * y[1: order + 1]
    overflow = ~np.isfinite(y[: order + 1]) | ~np.isfinite(yp)
    return BesselTable(x=x, j=j[: order + 1], jp=jp, y=y[: order + 1], yp=yp, overflow=overflow)


def hankel1(order: int, x: float, derivative: bool = False) -> complex:
    """H^(1)_order(x) = J_order(x) + i Y_order(x), or its derivative."""
    table = bessel_table(x, order)
    if derivative:
        return complex(table.hankel1_derivative[order])
    return complex(table.hankel1[order])


def bessel_j_series(order: int, x: float) -> float:
    """J_order(x) from its power series; accurate for x up to about 10."""
    if order < 0:
        raise InvalidArgumentError(f"Bessel order must be non-negative, got {order}")
    quarter = 0.25 * x * x
    term = (0.5 * x) ** order / math.factorial(order)
    total = term
    k = 0
    while abs(term) > 1e-18 * abs(total) or k < 2:
        k += 1
        term *= -quarter / (k * (k + order))
        total += term
        if k > 500:
            break
    return total
