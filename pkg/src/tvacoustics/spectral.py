"""Exact per-Fourier-mode solutions of the third-order velocity-potential equation.

The viscous mode equation at radial frequency r is

    y''' + [gamma*D_th + (1+beta)*nu0] r^2 y''
        + [gamma*c0^2 r^2 + (1+beta)*nu0*gamma*D_th r^4] y'
        + gamma*D_th*c0^2 r^4 y = 0,

with the third datum derived from the coupled system.  The inviscid model is
the same equation with nu0 = 0.  Roots of the characteristic cubic are solved
in closed form (trigonometric / Cardano) with a Newton polish; the solution is
evaluated through the conjugate-pair representation wherever the pair exists
and through plain exponential interpolation when all three roots are real.

All evaluators are vectorized over r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import PhysicalParams, derive_constants

PAIR = "pair"
THREE_REAL = "three_real"

#: relative root-coincidence tolerance triggering the degenerate-root retry
DEGENERATE_RTOL = 1e-12

#: multiplicative nudge applied to r when roots coincide
DEGENERATE_BUMP = 1e-9


class DegenerateRoots(ArithmeticError):
    """Two characteristic roots coincide; representation formulas break down."""


# ---------------------------------------------------------------------------
# characteristic cubic
# ---------------------------------------------------------------------------


def cubic_coeffs(p: PhysicalParams, r, nu0: float | None = None):
    """Coefficients (c2, c1, c0) of the monic characteristic cubic at radius r.

    nu0 overrides the parameter set's momentum diffusion (nu0 = 0 gives the
    inviscid cubic).
    """
    r = np.asarray(r, dtype=float)
    bnu = (1.0 + p.beta) * (p.nu0 if nu0 is None else nu0)
    gD = p.gamma_Dth
    r2 = r * r
    c2 = (gD + bnu) * r2
    c1 = p.gamma * p.c0**2 * r2 + bnu * gD * r2 * r2
    c0 = gD * p.c0**2 * r2 * r2
    return c2, c1, c0


def _horner(lam, c2, c1, c0):
    return ((lam + c2) * lam + c1) * lam + c0


def _horner_deriv(lam, c2, c1):
    return (3.0 * lam + 2.0 * c2) * lam + c1


def _newton_polish(lam, c2, c1, c0, iterations=2):
    for _ in range(iterations):
        deriv = _horner_deriv(lam, c2, c1)
        step = np.where(np.abs(deriv) > 0.0, _horner(lam, c2, c1, c0) / np.where(deriv == 0, 1.0, deriv), 0.0)
        lam = lam - step
    return lam


def _cubic_roots_arrays(c2, c1, c0):
    """Roots of monic real cubics, vectorized.

    Returns (l1, lR, lI, pair) where entries with pair=True hold the real root
    in l1 and the conjugate pair lR +- i lI (lI > 0); entries with pair=False
    hold three real roots sorted descending in (l1, lR, lI).
    """
    c2 = np.asarray(c2, dtype=float)
    c1 = np.asarray(c1, dtype=float)
    c0 = np.asarray(c0, dtype=float)
    shape = np.broadcast(c2, c1, c0).shape
    c2, c1, c0 = np.broadcast_to(c2, shape), np.broadcast_to(c1, shape), np.broadcast_to(c0, shape)

    a3 = c2 / 3.0
    pdep = c1 - c2 * a3
    qdep = 2.0 * a3**3 - a3 * c1 + c0
    disc = -4.0 * pdep**3 - 27.0 * qdep**2

    l1 = np.zeros(shape)
    lR = np.zeros(shape)
    lI = np.zeros(shape)
    pair = disc < 0.0
    trivial = (c2 == 0.0) & (c1 == 0.0) & (c0 == 0.0)

    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        # one real root plus conjugate pair (Cardano, cancellation-safe branch)
        s = np.sqrt(np.where(pair, qdep**2 / 4.0 + pdep**3 / 27.0, 1.0))
        t_plus = -qdep / 2.0 + s
        t_minus = -qdep / 2.0 - s
        big = np.where(np.abs(t_plus) >= np.abs(t_minus), t_plus, t_minus)
        u_big = np.cbrt(big)
        u_other = np.where(u_big != 0.0, -pdep / (3.0 * np.where(u_big == 0.0, 1.0, u_big)), 0.0)
        y1 = u_big + u_other
        l1 = np.where(pair, y1 - a3, l1)
        lR = np.where(pair, -y1 / 2.0 - a3, lR)
        lI = np.where(pair, np.abs(u_big - u_other) * math.sqrt(3.0) / 2.0, lI)

        # three real roots (trigonometric form)
        three = ~pair & ~trivial
        p_safe = np.where(three, pdep, -1.0)
        amp = 2.0 * np.sqrt(np.maximum(-p_safe, 0.0) / 3.0)
        amp_safe = np.where(amp == 0.0, 1.0, amp)
        arg = np.clip(3.0 * qdep / (p_safe * amp_safe), -1.0, 1.0)
        theta = np.arccos(arg) / 3.0
        t0 = amp * np.cos(theta)
        t1 = amp * np.cos(theta - 2.0 * math.pi / 3.0)
        t2 = amp * np.cos(theta - 4.0 * math.pi / 3.0)
        roots = np.sort(np.stack([t0 - a3, t1 - a3, t2 - a3]), axis=0)[::-1]
        l1 = np.where(three, roots[0], l1)
        lR = np.where(three, roots[1], lR)
        lI = np.where(three, roots[2], lI)

        # Newton polish: pair member in complex arithmetic, the rest real
        l1 = np.real(_newton_polish(l1.astype(complex), c2, c1, c0))
        z = _newton_polish(np.where(pair, lR + 1j * lI, lR.astype(complex)), c2, c1, c0)
        w = np.real(_newton_polish(lI.astype(complex), c2, c1, c0))
        lR = np.real(z)
        lI = np.where(pair, np.abs(np.imag(z)), w)

    l1 = np.where(trivial, 0.0, l1)
    lR = np.where(trivial, 0.0, lR)
    lI = np.where(trivial, 0.0, lI)
    return l1, lR, lI, pair & ~trivial


def _min_root_gap(l1, lR, lI, pair):
    """Smallest pairwise distance between the three roots."""
    lam2 = np.where(pair, lR - 1j * lI, lR + 0j)
    lam3 = np.where(pair, lR + 1j * lI, lI + 0j)
    d12 = np.abs(l1 - lam2)
    d13 = np.abs(l1 - lam3)
    d23 = np.abs(lam2 - lam3)
    return np.minimum(np.minimum(d12, d13), d23)


def char_roots_arrays(p: PhysicalParams, r, nu0: float | None = None):
    """Vectorized characteristic roots with the degenerate-radius retry.

    Returns (l1, lR, lI, pair, r_used).  Radii whose roots coincide within
    DEGENERATE_RTOL are re-evaluated at r*(1 + 1e-9); if still degenerate,
    DegenerateRoots is raised.  r = 0 yields the triple root 0.
    """
    r = np.asarray(r, dtype=float)
    l1, lR, lI, pair = _cubic_roots_arrays(*cubic_coeffs(p, r, nu0))

    def _bad(l1_, lR_, lI_, pair_, r_):
        scale = np.maximum.reduce([np.abs(l1_), np.abs(lR_), np.abs(lI_)])
        gap = _min_root_gap(l1_, lR_, lI_, pair_)
        # radii whose cubic coefficients underflow entirely behave as r = 0
        return (gap < DEGENERATE_RTOL * scale) & (r_ > 0.0) & (scale > 1e-200)

    bad = _bad(l1, lR, lI, pair, r)
    r_used = np.array(r, dtype=float, copy=True)
    if np.any(bad):
        r_used = np.where(bad, r * (1.0 + DEGENERATE_BUMP), r)
        l1b, lRb, lIb, pairb = _cubic_roots_arrays(*cubic_coeffs(p, r_used, nu0))
        l1 = np.where(bad, l1b, l1)
        lR = np.where(bad, lRb, lR)
        lI = np.where(bad, lIb, lI)
        pair = np.where(bad, pairb, pair)
        if np.any(_bad(l1, lR, lI, pair, r_used)):
            raise DegenerateRoots("coincident characteristic roots persist after radius nudge")
    return l1, lR, lI, pair, r_used


@dataclass(frozen=True)
class CharRoots:
    """Roots of the characteristic cubic at one radius.

    For classification 'pair': lambda1 is the unique real root and the pair is
    lambda_R +- i*lambda_I with lambda_I > 0; lambda2 denotes the branch with
    negative imaginary part (the one expanding as -i*sqrt(gamma)*c0*r - ...).
    For 'three_real' the roots are sorted descending.
    """

    classification: str
    lambda1: float
    lambda_R: float
    lambda_I: float

    @property
    def lambda2(self) -> complex:
        if self.classification == PAIR:
            return complex(self.lambda_R, -self.lambda_I)
        return complex(self.lambda_R)

    @property
    def lambda3(self) -> complex:
        if self.classification == PAIR:
            return complex(self.lambda_R, self.lambda_I)
        return complex(self.lambda_I)

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (complex(self.lambda1), self.lambda2, self.lambda3)

    def residual(self, c2: float, c1: float, c0: float) -> float:
        """Worst cubic residual over the roots, scaled by the largest term."""
        worst = 0.0
        for lam in self.as_tuple():
            terms = (abs(lam) ** 3, abs(c2 * lam**2), abs(c1 * lam), abs(c0), 1e-300)
            worst = max(worst, abs(_horner(lam, c2, c1, c0)) / max(terms))
        return worst


def _roots_scalar(p: PhysicalParams, r: float, nu0: float | None = None) -> CharRoots:
    l1, lR, lI, pair, _ = char_roots_arrays(p, np.asarray([r]), nu0)
    kind = PAIR if bool(pair[0]) else THREE_REAL
    return CharRoots(classification=kind, lambda1=float(l1[0]), lambda_R=float(lR[0]), lambda_I=float(lI[0]))


def solve_char_roots(p: PhysicalParams, r: float) -> CharRoots:
    """Closed-form roots of the viscous characteristic cubic at radius r >= 0."""
    return _roots_scalar(p, r, None)


def inviscid_roots(p: PhysicalParams, r: float) -> CharRoots:
    """Exact roots of the inviscid characteristic cubic (nu0 = 0)."""
    return _roots_scalar(p, r, 0.0)


# ---------------------------------------------------------------------------
# root expansions
# ---------------------------------------------------------------------------


def small_freq_expansion(p: PhysicalParams, r) -> CharRoots:
    """Truncated small-radius expansion of the viscous roots.

    lambda1 ~ -D_th r^2 + D_th^2 (gamma-1)[(1+beta)nu0 - D_th]/(gamma c0^2) r^4,
    pair    ~ -Gamma0 r^2 -+ i (sqrt(gamma) c0 r + Gamma1 r^3).
    """
    r = float(r)
    dc = derive_constants(p)
    bnu = p.one_plus_beta_nu0
    l1 = -p.D_th * r**2 + p.D_th**2 * (p.gamma - 1.0) * (bnu - p.D_th) / (p.gamma * p.c0**2) * r**4
    lR = -dc.Gamma0 * r**2
    lI = p.sqrt_gamma_c0 * r + dc.Gamma1 * r**3
    return CharRoots(classification=PAIR, lambda1=l1, lambda_R=lR, lambda_I=lI)


def large_freq_expansion(p: PhysicalParams, r) -> CharRoots:
    """Leading large-radius behavior of the viscous roots (all real)."""
    r = float(r)
    bnu = p.one_plus_beta_nu0
    gD = p.gamma_Dth
    l1 = -p.c0**2 / bnu
    l2 = -gD * r**2 - (p.gamma - 1.0) * p.c0**2 / (bnu - gD)
    l3 = -bnu * r**2 + p.gamma * p.c0**2 * (bnu - p.D_th) / ((bnu - gD) * bnu)
    roots = sorted((l1, l2, l3), reverse=True)
    return CharRoots(classification=THREE_REAL, lambda1=roots[0], lambda_R=roots[1], lambda_I=roots[2])


def inviscid_small_expansion(p: PhysicalParams, r) -> CharRoots:
    """Small-radius expansion of the inviscid roots."""
    r = float(r)
    l1 = -p.D_th * r**2
    lR = -(p.gamma - 1.0) * p.D_th / 2.0 * r**2
    lI = p.sqrt_gamma_c0 * r
    return CharRoots(classification=PAIR, lambda1=l1, lambda_R=lR, lambda_I=lI)


def inviscid_large_expansion(p: PhysicalParams, r) -> CharRoots:
    """Large-radius expansion of the inviscid roots (pair persists)."""
    r = float(r)
    l1 = -p.gamma_Dth * r**2
    lR = -(p.gamma - 1.0) * p.c0**2 / (2.0 * p.gamma_Dth)
    lI = p.c0 * r
    return CharRoots(classification=PAIR, lambda1=l1, lambda_R=lR, lambda_I=lI)


# ---------------------------------------------------------------------------
# mode evolution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeState:
    """Complex triple (phi, phi_t, phi_tt) of one or many modes at time t."""

    phi_hat: np.ndarray
    phi_t_hat: np.ndarray
    phi_tt_hat: np.ndarray
    t: float
    r: np.ndarray


def third_datum(p: PhysicalParams, r, phi0, phi1, T0, nu0: float | None = None):
    """phi_tt(0) induced by the coupled system (nu0 = 0 for the inviscid model)."""
    r = np.asarray(r, dtype=float)
    bnu = (1.0 + p.beta) * (p.nu0 if nu0 is None else nu0)
    r2 = r * r
    return (
        -p.gamma * p.c0**2 * r2 * np.asarray(phi0)
        - bnu * r2 * np.asarray(phi1)
        + p.alpha_p * p.c0**2 * p.gamma_Dth * r2 * np.asarray(T0)
    )


class ModeRepresentation:
    """Closed-form solution family over an r-grid for fixed data transforms.

    Holds the basis {e^(l1 t), e^(lR t) cos(lI t), e^(lR t) sin(lI t)} in the
    conjugate-pair regime and plain exponentials in the three-real regime, with
    coefficient triples for the solution; time derivatives of any order come
    from exact linear maps on the coefficients.
    """

    def __init__(self, p: PhysicalParams, r, data_hats, nu0: float | None = None):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        phi0, phi1, T0 = (np.broadcast_to(np.asarray(d, dtype=complex), r.shape) for d in data_hats)
        self.p = p
        self.nu0 = p.nu0 if nu0 is None else nu0
        l1, lR, lI, pair, r_used = char_roots_arrays(p, r, self.nu0)
        self.r = r_used
        self.l1, self.lR, self.lI, self.pair = l1, lR, lI, pair
        # radii with fully underflowed coefficients evolve like r = 0
        self.zero = (r_used == 0.0) | ((l1 == 0.0) & (lR == 0.0) & (lI == 0.0))
        self._phi0, self._phi1, self._T0 = phi0, phi1, T0

        bnu = (1.0 + p.beta) * self.nu0
        r2 = r_used * r_used
        A0 = p.gamma * p.c0**2 * r2
        Bn = bnu * r2
        AT = p.alpha_p * p.c0**2 * p.gamma_Dth * r2

        with np.errstate(invalid="ignore", divide="ignore"):
            # conjugate-pair representation (paper coefficients)
            denom = 2.0 * lR * l1 - lI**2 - lR**2 - l1**2
            safe = np.where(denom == 0.0, 1.0, denom)
            C1 = ((A0 - lI**2 - lR**2) * phi0 + (2.0 * lR + Bn) * phi1 - AT * T0) / safe
            C2 = ((2.0 * lR * l1 - l1**2 - A0) * phi0 - (2.0 * lR + Bn) * phi1 + AT * T0) / safe
            lI_safe = np.where(lI == 0.0, 1.0, lI)
            C3 = (
                (l1 * (lR * l1 + lI**2 - lR**2) + A0 * (lR - l1)) * phi0
                + (lR**2 - lI**2 - l1**2 + (lR - l1) * Bn) * phi1
                - (lR - l1) * AT * T0
            ) / (lI_safe * safe)

            # distinct-real-root interpolation
            phi2 = third_datum(p, r_used, phi0, phi1, T0, self.nu0)
            lam = np.stack([l1, lR, lI])  # three_real stores roots here
            A = np.zeros(lam.shape, dtype=complex)
            for j in range(3):
                k, m = (j + 1) % 3, (j + 2) % 3
                dj = (lam[j] - lam[k]) * (lam[j] - lam[m])
                dj = np.where(dj == 0.0, 1.0, dj)
                A[j] = (lam[k] * lam[m] * phi0 - (lam[k] + lam[m]) * phi1 + phi2) / dj

        self._C = (np.where(pair, C1, 0.0), np.where(pair, C2, 0.0), np.where(pair, C3, 0.0))
        self._A = np.where(~pair & ~self.zero, A, 0.0)

    def coeffs(self, order: int):
        """Basis coefficients of the order-th time derivative."""
        c1, c2, c3 = self._C
        a = self._A.copy()
        lam = np.stack([self.l1, self.lR, self.lI])
        for _ in range(order):
            c1, c2, c3 = c1 * self.l1, c2 * self.lR + c3 * self.lI, c3 * self.lR - c2 * self.lI
            a = a * lam
        return (c1, c2, c3), a

    def eval(self, t: float, order: int = 0) -> np.ndarray:
        """Order-th time derivative of the mode solution at time t."""
        (c1, c2, c3), a = self.coeffs(order)
        expl1 = np.exp(self.l1 * t)
        explR = np.exp(self.lR * t)
        phase = self.lI * t
        # lI holds a positive pair frequency on pair entries; zero it there so
        # the (masked-out) real-exponential branch cannot overflow
        lam_real = np.where(self.pair, 0.0, np.stack([self.l1, self.lR, self.lI]))
        out = np.where(
            self.pair,
            c1 * expl1 + explR * (c2 * np.cos(phase) + c3 * np.sin(phase)),
            np.sum(a * np.exp(lam_real * t), axis=0),
        )
        if np.any(self.zero):
            limit = (
                self._phi0 + t * self._phi1,
                self._phi1.astype(complex),
                np.zeros_like(self._phi0),
                np.zeros_like(self._phi0),
            )[min(order, 3)]
            out = np.where(self.zero, limit, out)
        return out

    def eval_many(self, ts: np.ndarray, order: int = 0) -> np.ndarray:
        """Order-th derivative on a time grid; shape (len(ts), len(r))."""
        ts = np.asarray(ts, dtype=float)[:, None]
        (c1, c2, c3), a = self.coeffs(order)
        expl1 = np.exp(self.l1[None, :] * ts)
        explR = np.exp(self.lR[None, :] * ts)
        phase = self.lI[None, :] * ts
        lam_real = np.where(self.pair, 0.0, np.stack([self.l1, self.lR, self.lI]))
        real_part = sum(a[j][None, :] * np.exp(lam_real[j][None, :] * ts) for j in range(3))
        out = np.where(
            self.pair[None, :],
            c1[None, :] * expl1 + explR * (c2[None, :] * np.cos(phase) + c3[None, :] * np.sin(phase)),
            real_part,
        )
        if np.any(self.zero):
            limit = (
                self._phi0[None, :] + ts * self._phi1[None, :],
                np.broadcast_to(self._phi1[None, :], out.shape).astype(complex),
                np.zeros_like(out),
                np.zeros_like(out),
            )[min(order, 3)]
            out = np.where(self.zero[None, :], limit, out)
        return out

    def state(self, t: float) -> ModeState:
        return ModeState(
            phi_hat=self.eval(t, 0),
            phi_t_hat=self.eval(t, 1),
            phi_tt_hat=self.eval(t, 2),
            t=t,
            r=self.r,
        )


def mode_solution(p: PhysicalParams, r, data_hats, t: float) -> ModeState:
    """Exact viscous mode solution from data transforms (phi0, phi1, T0) at t."""
    return ModeRepresentation(p, r, data_hats).state(t)


def mode_solution_inviscid(p: PhysicalParams, r, data_hats, t: float) -> ModeState:
    """Exact inviscid mode solution (nu0 = 0 model) at time t."""
    return ModeRepresentation(p, r, data_hats, nu0=0.0).state(t)


def mode_ode_residual(p: PhysicalParams, r, data_hats, t: float, nu0: float | None = None):
    """Relative residual of the mode ODE under the analytic derivatives."""
    rep = ModeRepresentation(p, r, data_hats, nu0=nu0)
    c2, c1, c0 = cubic_coeffs(p, rep.r, rep.nu0)
    terms = (rep.eval(t, 3), c2 * rep.eval(t, 2), c1 * rep.eval(t, 1), c0 * rep.eval(t, 0))
    scale = np.maximum.reduce([np.abs(x) for x in terms])
    scale = np.where(scale == 0.0, 1.0, scale)
    return np.abs(sum(terms)) / scale


def temperature_hat(p: PhysicalParams, r, m: ModeState, T0_hat=None, nu0: float | None = None):
    """Temperature transform reconstructed from the velocity potential.

    For r > 0:  T = (phi_tt + gamma c0^2 r^2 phi + (1+beta) nu0 r^2 phi_t)
                    / (alpha_p c0^2 gamma D_th r^2).
    At r = 0 the temperature equation reduces to T_t = 0, so T0_hat (the datum
    at xi = 0) must be supplied when the grid contains r = 0.
    """
    r = np.asarray(m.r if r is None else r, dtype=float)
    bnu = (1.0 + p.beta) * (p.nu0 if nu0 is None else nu0)
    r2 = r * r
    with np.errstate(invalid="ignore", divide="ignore"):
        value = (m.phi_tt_hat + p.gamma * p.c0**2 * r2 * m.phi_hat + bnu * r2 * m.phi_t_hat) / (
            p.alpha_p * p.c0**2 * p.gamma_Dth * r2
        )
    zero = r2 == 0.0
    if np.any(zero):
        if T0_hat is None:
            raise ValueError("T0_hat required to evaluate the temperature at r = 0")
        value = np.where(zero, T0_hat, value)
    return value


def energy_vector_hat(p: PhysicalParams, r, m: ModeState, T_hat):
    """Energy 3-vector (phi_t + i b r phi, phi_t - i b r phi, T), b = sqrt(gamma) c0."""
    r = np.asarray(r, dtype=float)
    osc = 1j * p.sqrt_gamma_c0 * r * m.phi_hat
    return np.stack([m.phi_t_hat + osc, m.phi_t_hat - osc, np.asarray(T_hat, dtype=complex)])


# ---------------------------------------------------------------------------
# independent time-stepping oracle
# ---------------------------------------------------------------------------


def rk4_oracle(
    p: PhysicalParams,
    r,
    data_hats,
    t: float,
    steps: int,
    nu0: float | None = None,
    source=None,
    initial_triple=None,
) -> ModeState:
    """Classical RK4 integration of the companion first-order system.

    Entirely independent of the closed-form representation.  `source(tau, r)`
    adds an inhomogeneity to the third component; `initial_triple` overrides
    the data-derived initial conditions (used for zero-data source problems).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    nu = p.nu0 if nu0 is None else nu0
    c2, c1, c0 = cubic_coeffs(p, r, nu)

    if initial_triple is None:
        phi0, phi1, T0 = (np.broadcast_to(np.asarray(d, dtype=complex), r.shape) for d in data_hats)
        y = np.stack([phi0, phi1, third_datum(p, r, phi0, phi1, T0, nu)]).astype(complex)
    else:
        y = np.stack([np.broadcast_to(np.asarray(c, dtype=complex), r.shape) for c in initial_triple])

    def rhs(tau, state):
        out = np.empty_like(state)
        out[0] = state[1]
        out[1] = state[2]
        out[2] = -c2 * state[2] - c1 * state[1] - c0 * state[0]
        if source is not None:
            out[2] = out[2] + source(tau, r)
        return out

    h = t / steps
    tau = 0.0
    for _ in range(steps):
        k1 = rhs(tau, y)
        k2 = rhs(tau + h / 2.0, y + h / 2.0 * k1)
        k3 = rhs(tau + h / 2.0, y + h / 2.0 * k2)
        k4 = rhs(tau + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tau += h
    return ModeState(phi_hat=y[0], phi_t_hat=y[1], phi_tt_hat=y[2], t=t, r=r)
