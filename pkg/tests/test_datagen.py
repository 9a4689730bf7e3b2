import math

import numpy as np
import pytest

from tvacoustics.datagen import DataSpec, DataTriple, fourier_transform, l11_norm, moments


def test_gaussian_transform_at_zero_is_mean():
    spec = DataSpec.gaussian()
    assert fourier_transform(spec, np.zeros(2)) == pytest.approx(math.pi)
    P, M = moments(spec, 2)
    assert P == pytest.approx(math.pi)
    assert np.allclose(M, 0.0)


def test_odd_gaussian_mean_and_moment():
    spec = DataSpec.odd_gaussian()
    assert fourier_transform(spec, np.zeros(2)) == 0.0
    P, M = moments(spec, 2)
    assert P == 0.0
    assert M == pytest.approx([math.pi / 2.0, 0.0])


def test_shifted_gaussian_modulus_and_moment():
    base = DataSpec.gaussian()
    spec = DataSpec.shifted_gaussian(shift=(1.0, 0.0))
    xi = np.array([[0.3, -0.7], [2.0, 0.1]])
    assert np.allclose(np.abs(fourier_transform(spec, xi)), np.abs(fourier_transform(base, xi)))
    P, M = moments(spec, 2)
    assert P == pytest.approx(math.pi)
    assert M == pytest.approx([math.pi, 0.0])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weighted_mean_inequality(n, rng):
    """|fhat(xi) - P| <= |xi| ||f||_{L^{1,1}} on a sampled grid."""
    for spec in (DataSpec.gaussian(), DataSpec.odd_gaussian(), DataSpec.gaussian(width=0.5, amplitude=2.0)):
        P, _ = moments(spec, n)
        norm = l11_norm(spec, n)
        xi = rng.normal(size=(200, n))
        values = fourier_transform(spec, xi)
        lhs = np.abs(values - P)
        rhs = np.linalg.norm(xi, axis=-1) * norm
        assert np.all(lhs <= rhs * (1 + 1e-12))


def test_odd_gaussian_first_order_limit():
    """fhat(xi)/(-i xi_k) -> M_k as |xi| -> 0."""
    spec = DataSpec.odd_gaussian()
    _, M = moments(spec, 2)
    for r in (1e-3, 1e-4, 1e-5):
        xi = np.array([r, 0.0])
        ratio = fourier_transform(spec, xi) / (-1j * r)
        assert ratio.real == pytest.approx(M[0], rel=1e-5)
        assert abs(ratio.imag) < 1e-12


def test_transform_quadrature_oracle():
    """Closed-form transform against a brute-force spatial integral (n = 1)."""
    spec = DataSpec.gaussian(width=0.7, amplitude=1.3)
    x = np.linspace(-12, 12, 20001)
    f = 1.3 * np.exp(-(x**2) / 0.49)
    for xi in (0.0, 0.5, 2.0):
        brute = np.trapezoid(f * np.exp(-1j * x * xi), x)
        closed = fourier_transform(spec, np.array([xi]))
        assert abs(brute - closed) < 1e-10

    odd = DataSpec.odd_gaussian(width=0.7, amplitude=1.3)
    fo = 1.3 * x * np.exp(-(x**2) / 0.49)
    for xi in (0.3, 1.5):
        brute = np.trapezoid(fo * np.exp(-1j * x * xi), x)
        closed = fourier_transform(odd, np.array([xi]))
        assert abs(brute - closed) < 1e-10


def test_l11_norm_oracle_n1():
    """Closed-form weighted norm against brute-force quadrature (n = 1)."""
    x = np.linspace(-14, 14, 40001)
    spec = DataSpec.gaussian(width=0.9, amplitude=1.1)
    f = np.abs(1.1 * np.exp(-(x**2) / 0.81))
    brute = np.trapezoid((1 + np.abs(x)) * f, x)
    assert l11_norm(spec, 1) == pytest.approx(brute, rel=1e-6)

    odd = DataSpec.odd_gaussian(width=0.9, amplitude=1.1)
    fo = np.abs(1.1 * x * np.exp(-(x**2) / 0.81))
    brute = np.trapezoid((1 + np.abs(x)) * fo, x)
    assert l11_norm(odd, 1) == pytest.approx(brute, rel=1e-6)


def test_triple_radial_channels(gaussian_data):
    r = np.array([0.0, 0.5, 2.0])
    even = gaussian_data.even_hats(2, r)
    assert even[0].tolist() == [0.0, 0.0, 0.0]
    assert even[1][0] == pytest.approx(math.pi)
    odd, axis = gaussian_data.odd_hats(2, r)
    assert axis == 1
    assert np.allclose(odd[1], 0.0)


def test_mixed_axes_rejected():
    triple = DataTriple(
        phi0=DataSpec.odd_gaussian(axis=1), phi1=DataSpec.odd_gaussian(axis=2)
    )
    with pytest.raises(ValueError):
        triple.odd_hats(2, np.array([1.0]))
