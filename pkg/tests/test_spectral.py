import math

import numpy as np
import pytest

from tvacoustics import spectral as sp
from tvacoustics.params import derive_constants


def test_cubic_coeffs_canon(canon):
    c2, c1, c0 = sp.cubic_coeffs(canon, 1.0)
    assert (c2, c1, c0) == (pytest.approx(0.34), pytest.approx(1.428), pytest.approx(0.14))
    assert sp.cubic_coeffs(canon, 0.0) == (0.0, 0.0, 0.0)
    assert sp.cubic_coeffs(canon, 2.0)[2] == pytest.approx(0.14 * 16.0)


def test_root_residual_and_vieta(canon, rng):
    rs = 10.0 ** rng.uniform(-4, 4, size=300)
    for r in rs:
        roots = sp.solve_char_roots(canon, float(r))
        c2, c1, c0 = (float(c) for c in sp.cubic_coeffs(canon, float(r)))
        assert roots.residual(c2, c1, c0) <= 1e-10
        total = sum(roots.as_tuple())
        scale = max(abs(c2), max(abs(x) for x in roots.as_tuple()))
        assert abs(total + c2) <= 1e-10 * scale


def test_root_classification_regimes(canon):
    assert sp.solve_char_roots(canon, 1e-2).classification == sp.PAIR
    assert sp.solve_char_roots(canon, 10.0).classification == sp.PAIR
    assert sp.solve_char_roots(canon, 100.0).classification == sp.THREE_REAL
    trivial = sp.solve_char_roots(canon, 0.0)
    assert trivial.as_tuple() == (0.0, 0.0, 0.0)
    # inviscid cubic keeps its conjugate pair at every sampled radius
    rs = np.logspace(-3, 3, 500)
    _, _, _, pair, _ = sp.char_roots_arrays(canon, rs, 0.0)
    assert pair.all()


def test_small_radius_root_values(canon):
    roots = sp.solve_char_roots(canon, 1e-2)
    assert roots.lambda1 == pytest.approx(-1e-5, rel=1e-3)
    dc = derive_constants(canon)
    assert roots.lambda_R == pytest.approx(-dc.Gamma0 * 1e-4, rel=1e-3)
    assert roots.lambda_I == pytest.approx(canon.sqrt_gamma_c0 * 1e-2, rel=1e-4)


def test_stability_re_negative(canon):
    rs = np.logspace(-4, 4, 400)
    l1, lR, lI, pair, _ = sp.char_roots_arrays(canon, rs)
    assert np.all(l1 < 0)
    assert np.all(lR < 0)
    assert np.all(np.where(pair, -1.0, lI) < 0)


def test_large_freq_expansion_values(canon):
    values = {round(x.real, 9) for x in sp.large_freq_expansion(canon, 10.0).as_tuple()}
    # -c0^2/((1+beta)nu0) = -5; -0.14 r^2 - 20/3; -0.2 r^2 + 35/3
    expected = {-5.0, -0.14 * 100 - 0.4 / 0.06, -0.2 * 100 + 1.4 * 0.1 / (0.06 * 0.2)}
    assert values == {round(v, 9) for v in expected}


def test_inviscid_expansion_values(canon):
    small = sp.inviscid_small_expansion(canon, 1e-2)
    assert small.lambda_R == pytest.approx(-(canon.gamma - 1) * canon.D_th / 2 * 1e-4)
    exact_small = sp.inviscid_roots(canon, 1e-2)
    assert exact_small.lambda_R == pytest.approx(small.lambda_R, rel=2e-4)
    large = sp.inviscid_large_expansion(canon, 1e3)
    assert large.lambda_R == pytest.approx(-10.0 / 7.0, rel=1e-12)
    # exact root approaches the constant like O(r^-2)
    err3 = abs(sp.inviscid_roots(canon, 1e3).lambda_R + 10.0 / 7.0)
    err4 = abs(sp.inviscid_roots(canon, 1e4).lambda_R + 10.0 / 7.0)
    assert err3 < 1e-4
    assert err4 == pytest.approx(err3 / 100.0, rel=0.05)


def test_sharp_expansion_orders(canon):
    """The cubic is even in r, so the sharp residual orders are 6, 4 and -2.

    (The source analysis states O(r^5) and O(1/r) remainders; those are upper
    bounds, not sharp rates; see the roots experiment for the literal bands.)
    """
    rs = np.logspace(-2.2, -1.2, 9)
    err1 = []
    err23 = []
    for r in rs:
        exact = sp.solve_char_roots(canon, float(r))
        approx = sp.small_freq_expansion(canon, float(r))
        err1.append(abs(exact.lambda1 - approx.lambda1))
        err23.append(abs(exact.lambda2 - approx.lambda2))
    slope1 = np.polyfit(np.log(rs), np.log(err1), 1)[0]
    slope23 = np.polyfit(np.log(rs), np.log(err23), 1)[0]
    assert slope1 == pytest.approx(6.0, abs=0.15)
    assert slope23 == pytest.approx(4.0, abs=0.15)

    rs = np.logspace(2.2, 3.2, 9)
    err = []
    import itertools

    for r in rs:
        exact = sp.solve_char_roots(canon, float(r)).as_tuple()
        approx = sp.large_freq_expansion(canon, float(r)).as_tuple()
        err.append(
            min(
                max(abs(e - a) for e, a in zip(exact, perm))
                for perm in itertools.permutations(approx)
            )
        )
    slope = np.polyfit(np.log(rs), np.log(err), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.15)


def test_gamma1_expansion_consistency(canon):
    """(Im lambda2 + b r)/(-r^3) recovers Gamma1 at small radius."""
    dc = derive_constants(canon)
    r = 1e-3
    lam2 = sp.solve_char_roots(canon, r).lambda2
    recovered = (lam2.imag + canon.sqrt_gamma_c0 * r) / (-(r**3))
    assert recovered == pytest.approx(dc.Gamma1, rel=1e-6)


def test_mode_solution_initial_triple(canon, full_data):
    rs = np.array([1e-3, 0.3, 2.0, 40.0])
    hats = full_data.even_hats(2, rs)
    state = sp.mode_solution(canon, rs, hats, 0.0)
    assert np.allclose(state.phi_hat, hats[0], rtol=0, atol=1e-12)
    assert np.allclose(state.phi_t_hat, hats[1], rtol=0, atol=1e-12)
    expected2 = sp.third_datum(canon, rs, *hats)
    assert np.allclose(state.phi_tt_hat, expected2, rtol=1e-10, atol=1e-14)


def test_mode_solution_r_zero(canon, gaussian_data):
    rs = np.array([0.0])
    hats = gaussian_data.even_hats(2, rs)
    state = sp.mode_solution(canon, rs, hats, 7.0)
    assert state.phi_hat[0] == pytest.approx(hats[0][0] + 7.0 * hats[1][0])
    inviscid = sp.mode_solution_inviscid(canon, rs, hats, 7.0)
    assert inviscid.phi_hat[0] == pytest.approx(hats[0][0] + 7.0 * hats[1][0])


@pytest.mark.parametrize("r", [0.05, 0.5, 5.0])
def test_oracle_equivalence(canon, gaussian_data, r):
    rs = np.array([r])
    hats = gaussian_data.even_hats(2, rs)
    closed = sp.mode_solution(canon, rs, hats, 1.0)
    oracle = sp.rk4_oracle(canon, rs, hats, 1.0, 10_000)
    assert abs(closed.phi_hat[0] - oracle.phi_hat[0]) <= 1e-8 * abs(oracle.phi_hat[0])
    closed0 = sp.mode_solution_inviscid(canon, rs, hats, 1.0)
    oracle0 = sp.rk4_oracle(canon, rs, hats, 1.0, 10_000, nu0=0.0)
    assert abs(closed0.phi_hat[0] - oracle0.phi_hat[0]) <= 1e-8 * abs(oracle0.phi_hat[0])


def test_rk4_self_convergence(canon, gaussian_data):
    rs = np.array([0.5])
    hats = gaussian_data.even_hats(2, rs)
    exact = sp.mode_solution(canon, rs, hats, 1.0).phi_hat[0]
    err = []
    for steps in (40, 80, 160):
        approx = sp.rk4_oracle(canon, rs, hats, 1.0, steps).phi_hat[0]
        err.append(abs(approx - exact))
    assert err[0] / err[1] == pytest.approx(16.0, rel=0.2)
    assert err[1] / err[2] == pytest.approx(16.0, rel=0.2)

    zero = sp.rk4_oracle(canon, rs, hats, 0.0, 5)
    assert zero.phi_hat[0] == hats[0][0]


def test_mode_ode_residual(canon, full_data):
    rs = np.array([1e-3, 0.3, 3.0, 30.0])
    hats = full_data.even_hats(2, rs)
    for t in (0.5, 2.0, 10.0):
        resid = sp.mode_ode_residual(canon, rs, hats, t)
        assert np.max(resid) <= 1e-9


def test_reality_of_radial_solutions(canon, full_data):
    """Real radial data keep the mode solution real (conjugation symmetry)."""
    rs = np.logspace(-3, 1, 50)
    hats = full_data.even_hats(3, rs)
    state = sp.mode_solution(canon, rs, hats, 3.0)
    mag = np.abs(state.phi_hat)
    assert np.max(np.abs(state.phi_hat.imag)) <= 1e-12 * max(np.max(mag), 1e-300)


def test_temperature_reconstruction(canon, full_data):
    rs = np.array([0.3])
    hats = full_data.even_hats(2, rs)
    state0 = sp.mode_solution(canon, rs, hats, 0.0)
    T0 = sp.temperature_hat(canon, rs, state0)
    assert T0[0] == pytest.approx(hats[2][0], rel=1e-10)

    # r = 0 requires the datum and returns it at all times
    rs0 = np.array([0.0])
    hats0 = full_data.even_hats(2, rs0)
    state = sp.mode_solution(canon, rs0, hats0, 5.0)
    T = sp.temperature_hat(canon, rs0, state, T0_hat=hats0[2])
    assert T[0] == pytest.approx(hats0[2][0])
    with pytest.raises(ValueError):
        sp.temperature_hat(canon, rs0, state)


def test_temperature_vs_first_order_system_rk4(canon, full_data):
    """Cross-module oracle: T from the potential equals the 3x3 system's T."""
    from tvacoustics.diagonal import system_matrices

    r = 0.3
    rs = np.array([r])
    hats = full_data.even_hats(2, rs)
    state = sp.mode_solution(canon, rs, hats, 2.0)
    T = sp.temperature_hat(canon, rs, state)[0]

    mats = system_matrices(canon)
    M = -(mats.A1 * r + mats.A2 * r**2)
    b = canon.sqrt_gamma_c0
    y = np.array(
        [
            hats[1][0] + 1j * b * r * hats[0][0],
            hats[1][0] - 1j * b * r * hats[0][0],
            hats[2][0],
        ],
        dtype=complex,
    )
    steps = 20000
    h = 2.0 / steps
    for _ in range(steps):
        k1 = M @ y
        k2 = M @ (y + h / 2 * k1)
        k3 = M @ (y + h / 2 * k2)
        k4 = M @ (y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert abs(T - y[2]) <= 1e-7 * abs(y[2])


def test_energy_vector_identities(canon, full_data):
    rs = np.array([0.4, 1.5])
    hats = full_data.even_hats(2, rs)
    state = sp.mode_solution(canon, rs, hats, 1.3)
    T = sp.temperature_hat(canon, rs, state)
    Phi = sp.energy_vector_hat(canon, rs, state, T)
    assert np.allclose(Phi[0] + Phi[1], 2.0 * state.phi_t_hat)
    # phi = 0 makes the first two components equal phi_t
    zeroed = sp.ModeState(
        phi_hat=np.zeros_like(state.phi_hat),
        phi_t_hat=state.phi_t_hat,
        phi_tt_hat=state.phi_tt_hat,
        t=state.t,
        r=state.r,
    )
    Phi0 = sp.energy_vector_hat(canon, rs, zeroed, T)
    assert np.allclose(Phi0[0], Phi0[1])


def test_degenerate_radius_nudge(canon):
    """The pair-collision radius evaluates via the nudged radius."""
    rs = np.logspace(1.35, 1.45, 4000)
    _, _, lI, pair, _ = sp.char_roots_arrays(canon, rs)
    # locate the collision: last pair radius before the three-real regime
    idx = int(np.argmin(pair))
    r_star = rs[idx - 1]
    out = sp.char_roots_arrays(canon, np.array([r_star]))
    assert np.isfinite(out[0]).all()


def test_eval_many_matches_eval(canon, full_data):
    rs = np.array([0.2, 3.0, 50.0])
    rep = sp.ModeRepresentation(canon, rs, full_data.even_hats(2, rs))
    ts = np.array([0.0, 0.7, 2.9])
    for order in range(3):
        grid = rep.eval_many(ts, order)
        for i, t in enumerate(ts):
            assert np.allclose(grid[i], rep.eval(float(t), order), rtol=1e-13, atol=1e-300)
