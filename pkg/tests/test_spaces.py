import math

import numpy as np
import pytest
from numpy.polynomial import legendre

from hfbem._exceptions import ConfigurationError
from hfbem._exceptions import InvalidArgumentError
from hfbem.spaces import EpsilonLadder
from hfbem.spaces import build_space
from hfbem.spaces import cov_partition
from hfbem.spaces import default_m
from hfbem.spaces import dimension
from hfbem.spaces import eval_basis
from hfbem.spaces import freq_adapted_partition
from hfbem.spaces import invert_cov
from hfbem.spaces import make_basis
from hfbem.spaces import optimal_epsilons
from hfbem.spaces import sample_basis
from hfbem.types import Method
from hfbem.types import RegionLabel
from tests.helpers import rotated_ellipse
from tests.helpers import shifted
from tests.helpers import unit_circle
from tests.helpers import wave

CIRCLE_SHADOW, CIRCLE = shifted(unit_circle())
ELLIPSE_SHADOW, ELLIPSE = shifted(rotated_ellipse())


def midpoints(partition) -> np.ndarray:
    return np.array([r.a + 0.5 * r.width for r in partition.regions])


def test_optimal_epsilons_values() -> None:
    assert optimal_epsilons(1).values == pytest.approx((1.0 / 9.0,), abs=1e-15)
    assert optimal_epsilons(2).values == pytest.approx((0.2, 1.0 / 15.0), abs=1e-15)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_optimal_epsilons_balance(m) -> None:
    ladder = optimal_epsilons(m)
    assert ladder.m == m
    assert (1.0 - 3.0 * ladder[1]) / 6.0 == pytest.approx(ladder[m], abs=1e-14)
    for j in range(1, m):
        assert 0.5 * (ladder[j] - ladder[j + 1]) == pytest.approx(ladder[m], abs=1e-14)


@pytest.mark.parametrize(
    ["call"],
    [
        pytest.param(lambda: EpsilonLadder(()), id="empty"),
        pytest.param(lambda: EpsilonLadder((0.4,)), id="too-large"),
        pytest.param(lambda: EpsilonLadder((0.0,)), id="zero"),
        pytest.param(lambda: EpsilonLadder((0.1, 0.2)), id="increasing"),
        pytest.param(lambda: optimal_epsilons(0), id="m"),
    ]
)
def test_invalid_ladder(call) -> None:
    with pytest.raises(InvalidArgumentError):
        call()


def test_default_m() -> None:
    assert default_m(50.0) == 1
    assert default_m(1e4) == 2
    assert default_m(1.5) == 1


@pytest.mark.parametrize(
    ["shadow", "k", "m"],
    [
        pytest.param(CIRCLE_SHADOW, 100.0, 1, id="circle-m1"),
        pytest.param(CIRCLE_SHADOW, 100.0, 2, id="circle-m2"),
        pytest.param(ELLIPSE_SHADOW, 400.0, 3, id="ellipse-m3"),
        pytest.param(CIRCLE_SHADOW, 800.0, 2, id="circle-k800"),
        pytest.param(ELLIPSE_SHADOW, 800.0, 2, id="ellipse-k800"),
    ]
)
def test_freq_adapted_partition(shadow, k, m) -> None:
    partition = freq_adapted_partition(shadow, k, m=m)
    assert len(partition) == 4 * m
    assert partition.total_length == pytest.approx(shadow.period, abs=1e-10)
    assert all(r.width > 0 for r in partition.regions)
    np.testing.assert_array_equal(partition.locate(midpoints(partition)), np.arange(len(partition)))

    labels = [r.label for r in partition.regions]
    for label in (RegionLabel.IL, RegionLabel.SR, RegionLabel.SB1, RegionLabel.SB2):
        assert labels.count(label) == 1
    assert labels.count(RegionLabel.IT1) == m - 1


def test_freq_adapted_widths() -> None:
    k = 1000.0
    partition = freq_adapted_partition(CIRCLE_SHADOW, k, m=2, xi=(0.5, 0.7), zeta=0.9)
    by_name = {r.name: r for r in partition.regions}
    ladder = optimal_epsilons(2)
    t1 = CIRCLE_SHADOW.t1
    assert by_name["IT1^1"].a == pytest.approx(t1 + 0.5 * k ** (-1.0 / 3.0 + ladder[2]))
    assert by_name["IT1^1"].b == pytest.approx(t1 + 0.5 * k ** (-1.0 / 3.0 + ladder[1]))
    assert by_name["SB1"].width == pytest.approx((0.9 + 0.5) * k ** (-1.0 / 3.0 + ladder[2]))
    assert by_name["SB2"].width == pytest.approx((0.7 + 0.9) * k ** (-1.0 / 3.0 + ladder[2]))


@pytest.mark.parametrize("m", [1, 2])
def test_shadow_boundary_width_exponent(m) -> None:
    low = {r.name: r.width for r in freq_adapted_partition(CIRCLE_SHADOW, 50.0, m=m).regions}
    high = {r.name: r.width for r in freq_adapted_partition(CIRCLE_SHADOW, 800.0, m=m).regions}
    expected = -1.0 / 3.0 + optimal_epsilons(m)[m]
    for name in ("SB1", "SB2"):
        measured = math.log(high[name] / low[name]) / math.log(800.0 / 50.0)
        assert measured == pytest.approx(expected, rel=0.2)


@pytest.mark.parametrize(
    ["kwargs", "expected"],
    [
        pytest.param({"k": 2.0, "xi": 10.0}, "IL is empty", id="illuminated"),
        pytest.param({"k": 2.0, "zeta": 10.0}, "SR is empty", id="shadow"),
        pytest.param({"k": 100.0, "xi": (1.0, 2.0, 3.0)}, "xi needs one value", id="xi-length"),
        pytest.param({"k": 100.0, "zeta": -1.0}, "zeta values must be positive", id="zeta-sign"),
    ]
)
def test_freq_adapted_configuration(kwargs, expected) -> None:
    with pytest.raises(ConfigurationError, match=expected):
        freq_adapted_partition(CIRCLE_SHADOW, **kwargs)


def test_freq_adapted_invalid() -> None:
    with pytest.raises(InvalidArgumentError):
        freq_adapted_partition(CIRCLE_SHADOW, 1.0)
    with pytest.raises(InvalidArgumentError, match="expected m=2"):
        freq_adapted_partition(CIRCLE_SHADOW, 100.0, m=2, ladder=optimal_epsilons(1))


@pytest.mark.parametrize(
    ["shadow", "k"],
    [
        pytest.param(CIRCLE_SHADOW, 50.0, id="circle"),
        pytest.param(ELLIPSE_SHADOW, 200.0, id="ellipse"),
        pytest.param(CIRCLE_SHADOW, 800.0, id="circle-k800"),
        pytest.param(ELLIPSE_SHADOW, 800.0, id="ellipse-k800"),
    ]
)
def test_cov_partition(shadow, k) -> None:
    partition, change = cov_partition(shadow, k)
    assert [r.label for r in partition.regions] == [
        RegionLabel.I1, RegionLabel.I2, RegionLabel.I3, RegionLabel.I4, RegionLabel.I5, RegionLabel.I6
    ]
    assert partition.total_length == pytest.approx(shadow.period, abs=1e-10)
    np.testing.assert_array_equal(partition.locate(midpoints(partition)), np.arange(6))

    for j, region in enumerate(partition.regions[:4]):
        ends = np.array([region.a, region.b])
        np.testing.assert_allclose(change.forward(j, ends), ends, atol=1e-12)
        s = np.linspace(region.a, region.b, 201)
        assert np.all(change.derivative(j, s) > 0.0)
        assert np.all(np.diff(change.forward(j, s)) > 0.0)
        y = np.linspace(region.a, region.b, 57)
        np.testing.assert_allclose(change.forward(j, invert_cov(change, j, y)), y, atol=1e-11)
        np.testing.assert_allclose(invert_cov(change, j, change.forward(j, s)), s, atol=1e-11)

    for j in (4, 5):
        region = partition.regions[j]
        s = np.linspace(region.a, region.b, 9)
        np.testing.assert_array_equal(change.forward(j, s), s)
        np.testing.assert_array_equal(invert_cov(change, j, s), s)
        np.testing.assert_array_equal(change.derivative(j, s), 1.0)


def test_cov_map_contracts_toward_shadow_boundary() -> None:
    k = 1000.0
    partition, change = cov_partition(CIRCLE_SHADOW, k)
    region = partition.regions[0]
    quarter = region.a + 0.25 * region.width
    # I1 pulls the uniform mesh toward t1, where the density varies fastest
    assert change.forward(0, quarter) < quarter
    assert float(change.derivative(0, region.a)) < 1.0


def test_cov_derivative_grows_like_log_k() -> None:
    peaks = []
    for k in (50.0, 800.0, 1e4):
        partition, change = cov_partition(CIRCLE_SHADOW, k)
        peak = max(
            float(np.max(change.derivative(j, np.linspace(r.a, r.b, 2001))))
            for j, r in enumerate(partition.regions[:4])
        )
        assert peak <= math.log(k)
        peaks.append(peak)
    assert peaks[0] < peaks[1] < peaks[2]


def test_cov_partition_sides() -> None:
    partition, _ = cov_partition(CIRCLE_SHADOW, 100.0, xi=(0.5, 0.8), zeta=(0.6, 0.9))
    scale = 100.0 ** (-1.0 / 3.0)
    i5 = partition.regions[4]
    i6 = partition.regions[5]
    assert i5.width == pytest.approx((0.6 + 0.5) * scale)
    assert i6.width == pytest.approx((0.8 + 0.9) * scale)


@pytest.mark.parametrize(
    ["kwargs", "expected"],
    [
        pytest.param({"xi": 2.0}, "xi <= xi_prime", id="xi"),
        pytest.param({"zeta": 2.0}, "zeta <= zeta_prime", id="zeta"),
        pytest.param({"xi_prime": 1.0}, "xi_prime1", id="xi-prime"),
        pytest.param({"zeta_prime": (1.0, 1.0)}, "zeta_prime2", id="zeta-prime"),
        pytest.param(
            {"xi_prime": (1.0, CIRCLE_SHADOW.t2 - CIRCLE_SHADOW.t1 - 1.0)}, None, id="unequal-sides"
        ),
    ]
)
def test_cov_partition_configuration(kwargs, expected) -> None:
    if expected is None:
        partition, _ = cov_partition(CIRCLE_SHADOW, 100.0, **kwargs)
        assert partition.total_length == pytest.approx(2.0 * math.pi, abs=1e-10)
        return
    with pytest.raises(ConfigurationError, match=expected):
        cov_partition(CIRCLE_SHADOW, 100.0, **kwargs)


def test_invert_cov_invalid() -> None:
    partition, change = cov_partition(CIRCLE_SHADOW, 100.0)
    region = partition.regions[0]
    with pytest.raises(InvalidArgumentError, match="cannot be inverted"):
        invert_cov(change, 0, region.b + 0.1)
    with pytest.raises(InvalidArgumentError, match="outside 0..5"):
        invert_cov(change, 6, region.a)


@pytest.mark.parametrize(
    ["method", "degree", "m", "expected"],
    [
        pytest.param(Method.COV, 3, None, 24, id="cov-3"),
        pytest.param(Method.COV, 20, None, 126, id="cov-20"),
        pytest.param(Method.FREQ_ADAPTED, 3, 1, 16, id="freq-m1"),
        pytest.param(Method.FREQ_ADAPTED, 3, 2, 32, id="freq-m2"),
    ]
)
def test_dimension(method, degree, m, expected) -> None:
    basis = build_space(method, CIRCLE_SHADOW, CIRCLE, wave(100.0), degree, m=m)
    assert dimension(basis) == expected
    assert basis.dimension == expected


def test_degree_vector() -> None:
    partition, change = cov_partition(CIRCLE_SHADOW, 100.0)
    basis = make_basis(partition, (1, 2, 3, 4, 5, 6), CIRCLE, wave(100.0), change=change)
    assert basis.dimension == 27
    np.testing.assert_array_equal(basis.offsets, [0, 2, 5, 9, 14, 20, 27])

    with pytest.raises(InvalidArgumentError, match="6 regions"):
        make_basis(partition, (1, 2, 3), CIRCLE, wave(100.0), change=change)
    with pytest.raises(InvalidArgumentError, match="non-negative"):
        make_basis(partition, (1, 2, 3, 4, 5, -1), CIRCLE, wave(100.0), change=change)


@pytest.mark.parametrize(
    ["method"],
    [
        pytest.param(Method.COV, id="cov"),
        pytest.param(Method.FREQ_ADAPTED, id="freq-adapted"),
    ]
)
def test_sample_matches_eval(method) -> None:
    incident = wave(60.0)
    basis = build_space(method, ELLIPSE_SHADOW, ELLIPSE, incident, 3)
    t = ELLIPSE.period * (np.arange(97) + 0.37) / 97
    matrix = sample_basis(basis, t)
    assert matrix.shape == (97, basis.dimension)
    offsets = basis.offsets
    for j in range(len(basis.partition)):
        for n in range(4):
            np.testing.assert_allclose(matrix[:, offsets[j] + n], eval_basis(basis, j, n, t), atol=1e-14)

    # every parameter lies in exactly one region
    nonzero = np.abs(matrix[:, offsets[:-1]]) > 0.0
    np.testing.assert_array_equal(np.sum(nonzero, axis=1), 1)


def test_legendre_at_region_midpoint() -> None:
    incident = wave(100.0)
    basis = build_space(Method.FREQ_ADAPTED, CIRCLE_SHADOW, CIRCLE, incident, 4)
    centers = midpoints(basis.partition)
    for j, center in enumerate(centers):
        value = eval_basis(basis, j, 2, center) / basis.phase(center)
        assert complex(value) == pytest.approx(-0.5, abs=1e-12)
        assert abs(eval_basis(basis, j, 0, center)) == pytest.approx(1.0, abs=1e-14)


def test_eval_basis_invalid() -> None:
    basis = build_space(Method.COV, CIRCLE_SHADOW, CIRCLE, wave(100.0), 2)
    with pytest.raises(InvalidArgumentError, match="region index"):
        eval_basis(basis, 6, 0, 0.0)
    with pytest.raises(InvalidArgumentError, match="degree 3"):
        eval_basis(basis, 0, 3, 0.0)


def test_gram_matrix_on_one_region() -> None:
    degree = 4
    basis = build_space(Method.FREQ_ADAPTED, CIRCLE_SHADOW, CIRCLE, wave(100.0), degree, m=1)
    region = basis.partition.regions[0]
    assert region.label == RegionLabel.IL
    u, weights = legendre.leggauss(20)
    t = region.a + 0.5 * (u + 1.0) * region.width
    block = sample_basis(basis, t)[:, : degree + 1]
    gram = 0.5 * region.width * (block.conj().T * weights) @ block
    expected = np.diag(region.width / (2.0 * np.arange(degree + 1) + 1.0))
    np.testing.assert_allclose(gram, expected, atol=1e-12)
