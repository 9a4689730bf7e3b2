"""First-order 3x3 formulation of the energy vector and its diagonalization.

Builds the coefficient matrices of the energy-vector evolution, the constant
similarity transforms that decouple the system order by order in r (small
frequencies) or 1/r (large frequencies), verifies every algebraic identity
those constructions assert, scans the bounded zone for exponential stability,
and evaluates the diffusion-wave reference profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import PhysicalParams, derive_constants
from .spectral import (
    DegenerateRoots,
    char_roots_arrays,
    large_freq_expansion,
    small_freq_expansion,
    solve_char_roots,
)

IDENTITY_TOL = 1e-12


class IdentityViolated(AssertionError):
    """A transcription of the diagonalization matrices is inconsistent."""

    def __init__(self, which: str, residual: float):
        super().__init__(f"matrix identity {which!r} violated: residual {residual:.3e}")
        self.which = which
        self.residual = residual


@dataclass(frozen=True)
class SystemMatrices:
    """Coefficient matrices of Phi_t + A1 |D| Phi - A2 Delta Phi = 0."""

    A1: np.ndarray
    A2: np.ndarray


@dataclass(frozen=True)
class ZonePartition:
    """Frequency-zone cutoffs: interior r <= eps0, exterior r >= N0."""

    eps0: float
    N0: float

    def __post_init__(self):
        if not 0.0 < self.eps0 < self.N0:
            raise ValueError(f"need 0 < eps0 < N0, got ({self.eps0}, {self.N0})")


def system_matrices(p: PhysicalParams) -> SystemMatrices:
    b = p.sqrt_gamma_c0
    bnu = p.one_plus_beta_nu0
    gD = p.gamma_Dth
    coupling = 1j * (p.gamma - 1.0) / (2.0 * p.alpha_p * b)
    A1 = np.array(
        [
            [-1j * b, 0.0, 0.0],
            [0.0, 1j * b, 0.0],
            [coupling, -coupling, 0.0],
        ],
        dtype=complex,
    )
    thermal = p.alpha_p * p.c0**2 * gD
    A2 = np.array(
        [
            [bnu / 2.0, bnu / 2.0, -thermal],
            [bnu / 2.0, bnu / 2.0, -thermal],
            [0.0, 0.0, gD],
        ],
        dtype=complex,
    )
    return SystemMatrices(A1=A1, A2=A2)


def _residual(lhs: np.ndarray, rhs: np.ndarray, scale: float) -> float:
    return float(np.max(np.abs(lhs - rhs)) / max(scale, 1e-300))


def _assert_identity(which: str, lhs: np.ndarray, rhs: np.ndarray, scale: float) -> float:
    res = _residual(lhs, rhs, scale)
    if res > IDENTITY_TOL:
        raise IdentityViolated(which, res)
    return res


def u1_matrix(p: PhysicalParams) -> np.ndarray:
    k = -2.0 * p.gamma * p.alpha_p * p.c0**2 / (p.gamma - 1.0)
    return np.array([[0.0, 0.0, k], [0.0, k, 0.0], [1.0, 1.0, 1.0]], dtype=complex)


def n2_matrix(p: PhysicalParams) -> np.ndarray:
    b = p.sqrt_gamma_c0
    bnu = p.one_plus_beta_nu0
    d_minus = (p.D_th - bnu) / (1j * b)
    gd_half = (p.gamma - 1.0) * p.D_th / (2j * b)
    quarter = (bnu + (p.gamma - 1.0) * p.D_th) / (4j * b)
    return np.array(
        [
            [0.0, d_minus, -d_minus],
            [-gd_half, 0.0, -quarter],
            [gd_half, quarter, 0.0],
        ],
        dtype=complex,
    )


def small_freq_transforms(p: PhysicalParams):
    """(U1, N2, Lambda1_s, Lambda2_s) with every stated identity verified.

    Checks, each to 1e-12 relative:
      * U1^-1 A1 U1 = diag(0, i b, -i b) with b = sqrt(gamma) c0,
      * U1^-1 A2 U1 equals its printed explicit form,
      * A2^(1,s) - [N2, Lambda1_s] = diag(D_th, Gamma0, Gamma0).
    """
    mats = system_matrices(p)
    b = p.sqrt_gamma_c0
    dc = derive_constants(p)
    U1 = u1_matrix(p)
    N2 = n2_matrix(p)
    U1_inv = np.linalg.inv(U1)

    lam1 = np.diag([0.0, 1j * b, -1j * b])
    scale1 = float(np.max(np.abs(mats.A1)))
    _assert_identity("U1^-1 A1 U1 = Lambda1_s", U1_inv @ mats.A1 @ U1, lam1, scale1)

    bnu = p.one_plus_beta_nu0
    row = 0.5 * (bnu + (p.gamma - 1.0) * p.D_th)
    a2_1s_printed = np.array(
        [
            [p.D_th, p.D_th - bnu, p.D_th - bnu],
            [0.5 * (p.gamma - 1.0) * p.D_th, row, row],
            [0.5 * (p.gamma - 1.0) * p.D_th, row, row],
        ],
        dtype=complex,
    )
    a2_1s = U1_inv @ mats.A2 @ U1
    scale2 = float(np.max(np.abs(mats.A2)))
    _assert_identity("U1^-1 A2 U1 printed form", a2_1s, a2_1s_printed, scale2)

    lam2 = np.diag([p.D_th, dc.Gamma0, dc.Gamma0]).astype(complex)
    commutator = N2 @ lam1 - lam1 @ N2
    _assert_identity("A2^(1,s) - [N2, Lambda1_s] = Lambda2_s", a2_1s - commutator, lam2, scale2)
    return U1, N2, lam1, lam2


def q1_matrix(p: PhysicalParams) -> np.ndarray:
    gap = p.one_plus_beta_nu0 - p.gamma_Dth
    k = p.alpha_p * p.c0**2 * p.gamma_Dth / gap
    return np.array([[-1.0, k, 1.0], [1.0, k, 1.0], [0.0, 1.0, 0.0]], dtype=complex)


def v2_matrix(p: PhysicalParams) -> np.ndarray:
    b = p.sqrt_gamma_c0
    bnu = p.one_plus_beta_nu0
    gap = bnu - p.gamma_Dth
    return np.array(
        [
            [0.0, 1j * b * p.c0**2 * p.alpha_p / gap, 1j * b / bnu],
            [1j * (p.gamma - 1.0) / (p.alpha_p * p.gamma * b * p.D_th), 0.0, 0.0],
            [-1j * b / bnu * (1.0 + (p.gamma - 1.0) * p.D_th / gap), 0.0, 0.0],
        ],
        dtype=complex,
    )


def v3_matrix(p: PhysicalParams) -> np.ndarray:
    bnu = p.one_plus_beta_nu0
    gap = bnu - p.gamma_Dth
    return np.array(
        [
            [0.0, 0.0, 0.0],
            [0.0, 0.0, (p.gamma - 1.0) / (p.alpha_p * bnu * gap)],
            [0.0, p.gamma * p.c0**4 * p.alpha_p * (bnu - p.D_th) / gap**3, 0.0],
        ],
        dtype=complex,
    )


def large_freq_transforms(p: PhysicalParams):
    """(Q1, V2, V3, Lambda1_l, Lambda3_l) with every stated identity verified.

    Checks, each to 1e-12 relative:
      * Q1^-1 A2 Q1 = diag(0, gamma D_th, (1+beta) nu0),
      * Q1^-1 A1 Q1 equals its printed explicit form,
      * A1^(1,l) - [V2, Lambda1_l] = 0 (the vanishing first-order coefficient),
      * A1^(2,l) = A1^(1,l) V2 equals its printed explicit form,
      * A1^(2,l) - [V3, Lambda1_l] = Lambda3_l diagonal.
    """
    mats = system_matrices(p)
    b = p.sqrt_gamma_c0
    bnu = p.one_plus_beta_nu0
    gD = p.gamma_Dth
    gap = bnu - gD
    Q1 = q1_matrix(p)
    V2 = v2_matrix(p)
    V3 = v3_matrix(p)
    Q1_inv = np.linalg.inv(Q1)

    lam1 = np.diag([0.0, gD, bnu]).astype(complex)
    scale2 = float(np.max(np.abs(mats.A2)))
    _assert_identity("Q1^-1 A2 Q1 = Lambda1_l", Q1_inv @ mats.A2 @ Q1, lam1, scale2)

    a1_1l_printed = np.array(
        [
            [0.0, 1j * p.gamma * b * p.c0**2 * p.alpha_p * p.D_th / gap, 1j * b],
            [-1j * (p.gamma - 1.0) / (p.alpha_p * b), 0.0, 0.0],
            [1j * b * (1.0 + (p.gamma - 1.0) * p.D_th / gap), 0.0, 0.0],
        ],
        dtype=complex,
    )
    a1_1l = Q1_inv @ mats.A1 @ Q1
    scale1 = float(np.max(np.abs(mats.A1)))
    _assert_identity("Q1^-1 A1 Q1 printed form", a1_1l, a1_1l_printed, scale1)

    commutator = V2 @ lam1 - lam1 @ V2
    _assert_identity(
        "A1^(1,l) - [V2, Lambda1_l] = 0",
        a1_1l - commutator,
        np.zeros((3, 3), dtype=complex),
        scale1,
    )

    a1_2l_printed = np.array(
        [
            [p.c0**2 / bnu, 0.0, 0.0],
            [0.0, (p.gamma - 1.0) * p.c0**2 / gap, (p.gamma - 1.0) / (p.alpha_p * bnu)],
            [
                0.0,
                -p.gamma * p.c0**4 * p.alpha_p * (bnu - p.D_th) / gap**2,
                -p.gamma * p.c0**2 * (bnu - p.D_th) / (gap * bnu),
            ],
        ],
        dtype=complex,
    )
    a1_2l = a1_1l @ V2
    scale_2l = float(np.max(np.abs(a1_2l_printed)))
    _assert_identity("A1^(2,l) = A1^(1,l) V2 printed form", a1_2l, a1_2l_printed, scale_2l)

    lam3 = np.diag(
        [
            p.c0**2 / bnu,
            (p.gamma - 1.0) * p.c0**2 / gap,
            -p.gamma * p.c0**2 * (bnu - p.D_th) / (gap * bnu),
        ]
    ).astype(complex)
    commutator3 = V3 @ lam1 - lam1 @ V3
    _assert_identity("A1^(2,l) - [V3, Lambda1_l] = Lambda3_l", a1_2l - commutator3, lam3, scale_2l)
    return Q1, V2, V3, lam1, lam3


# ---------------------------------------------------------------------------
# evolution of the energy vector
# ---------------------------------------------------------------------------


def _roots_complex(p: PhysicalParams, r: np.ndarray):
    """Roots as three complex arrays ordered (real/D-branch, Im<=0, Im>=0)."""
    l1, lR, lI, pair, r_used = char_roots_arrays(p, r)
    lam1 = l1.astype(complex)
    lam2 = np.where(pair, lR - 1j * lI, lR.astype(complex))
    lam3 = np.where(pair, lR + 1j * lI, lI.astype(complex))
    return lam1, lam2, lam3, r_used


def exact_energy_evolution(p: PhysicalParams, r, Phi0, t: float) -> np.ndarray:
    """Energy vector at time t via spectral projectors of -(A1 r + A2 r^2).

    Phi0 has shape (3,) or (3, len(r)).  The eigenvalues are the cubic
    characteristic roots; projectors P_j = prod_{k!=j} (M - lam_k)/(lam_j - lam_k)
    give the exact matrix exponential for pairwise distinct roots.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    mats = system_matrices(p)
    lam1, lam2, lam3, r_used = _roots_complex(p, r)
    lams = (lam1, lam2, lam3)

    M = -(
        mats.A1[None, :, :] * r_used[:, None, None]
        + mats.A2[None, :, :] * (r_used**2)[:, None, None]
    )
    Phi0 = np.asarray(Phi0, dtype=complex)
    if Phi0.ndim == 1:
        Phi0 = np.broadcast_to(Phi0[:, None], (3, len(r)))
    vec = np.moveaxis(Phi0, 0, -1)[..., None]  # (m, 3, 1)

    eye = np.eye(3, dtype=complex)[None, :, :]
    out = np.zeros_like(vec)
    for j in range(3):
        k, m_ = (j + 1) % 3, (j + 2) % 3
        denom = (lams[j] - lams[k]) * (lams[j] - lams[m_])
        if np.any(np.abs(denom) == 0.0):
            raise DegenerateRoots("projector evaluation hit coincident eigenvalues")
        proj = (M - lams[k][:, None, None] * eye) @ (M - lams[m_][:, None, None] * eye)
        out = out + np.exp(lams[j] * t)[:, None, None] * (proj @ vec) / denom[:, None, None]
    return np.moveaxis(out[..., 0], -1, 0)


def prop31_representation(p: PhysicalParams, r, Phi0, t: float) -> np.ndarray:
    """Interior-zone representation U_int diag(e^{lambda_j t}) U_int^-1 Phi0.

    U_int = U1 (I + r N2) uses the approximate eigenvectors of the two-step
    small-frequency diagonalization together with the exact roots ordered to
    match diag(0, i b, -i b): the D-branch first, then the Im<0 branch.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    U1 = u1_matrix(p)
    N2 = n2_matrix(p)
    lam1, lam2, lam3, r_used = _roots_complex(p, r)

    eye = np.eye(3, dtype=complex)[None, :, :]
    U_int = U1[None, :, :] @ (eye + r_used[:, None, None] * N2[None, :, :])
    U_int_inv = np.linalg.inv(U_int)

    Phi0 = np.asarray(Phi0, dtype=complex)
    if Phi0.ndim == 1:
        Phi0 = np.broadcast_to(Phi0[:, None], (3, len(r)))
    vec = np.moveaxis(Phi0, 0, -1)[..., None]
    modes = U_int_inv @ vec
    expd = np.exp(np.stack([lam1, lam2, lam3], axis=-1) * t)[..., None]
    out = U_int @ (expd * modes)
    return np.moveaxis(out[..., 0], -1, 0)


def reference_profile_hat(p: PhysicalParams, r, Phi0, t: float) -> np.ndarray:
    """Diffusion-wave reference evolution U1 diag(e^{mu_j t}) U1^-1 Phi0.

    mu_1 = -D_th r^2, mu_{2,3} = -+ i sqrt(gamma) c0 r - Gamma0 r^2 are the
    principal small-frequency parts of the characteristic roots.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    dc = derive_constants(p)
    b = p.sqrt_gamma_c0
    U1 = u1_matrix(p)
    U1_inv = np.linalg.inv(U1)
    mu = np.stack(
        [
            -p.D_th * r**2 + 0j,
            -1j * b * r - dc.Gamma0 * r**2,
            1j * b * r - dc.Gamma0 * r**2,
        ]
    )
    Phi0 = np.asarray(Phi0, dtype=complex)
    if Phi0.ndim == 1:
        Phi0 = np.broadcast_to(Phi0[:, None], (3, len(r)))
    modes = np.einsum("ij,jm->im", U1_inv, Phi0)
    return np.einsum("ij,jm->im", U1, np.exp(mu * t) * modes)


# ---------------------------------------------------------------------------
# zone cutoffs, stability scan, pointwise bound
# ---------------------------------------------------------------------------


class StabilityViolated(ArithmeticError):
    def __init__(self, r: float, abscissa: float):
        super().__init__(f"spectral abscissa {abscissa:.3e} >= 0 at r = {r:.6g}")
        self.r = r
        self.abscissa = abscissa


def _worst_small_expansion_error(p: PhysicalParams, r: float) -> float:
    exact = solve_char_roots(p, r).as_tuple()
    approx = small_freq_expansion(p, r).as_tuple()
    return max(abs(e - a) / abs(e) for e, a in zip(exact, approx))


def _worst_large_expansion_error(p: PhysicalParams, r: float) -> float:
    import itertools

    exact = solve_char_roots(p, r).as_tuple()
    approx = large_freq_expansion(p, r).as_tuple()
    return min(
        max(abs(e - a) / abs(e) for e, a in zip(exact, perm))
        for perm in itertools.permutations(approx)
    )


def zone_cutoffs(p: PhysicalParams, rel_tol: float = 0.05) -> ZonePartition:
    """Numeric zone boundaries from the expansions' 5% relative-error radii.

    eps0 is the largest radius where the small-frequency expansion's worstper-root
    relative error stays below rel_tol; N0 the smallest radius beyond which the
    large-frequency expansion does.  Both located by bisection on log grids.
    """
    grid = np.logspace(-3, 3, 481)
    small_ok = np.array([_worst_small_expansion_error(p, r) < rel_tol for r in grid])
    if not small_ok[0]:
        raise ValueError("small-frequency expansion inaccurate even at r = 1e-3")
    idx = np.argmin(small_ok)  # first False
    eps0 = grid[idx - 1] if not small_ok.all() else grid[-1]

    large_ok = np.array([_worst_large_expansion_error(p, r) < rel_tol for r in grid])
    if not large_ok[-1]:
        raise ValueError("large-frequency expansion inaccurate even at r = 1e3")
    idx = len(grid) - np.argmin(large_ok[::-1])  # first True of the final run
    N0 = grid[idx]
    return ZonePartition(eps0=float(eps0), N0=float(N0))


def identity_residuals(p: PhysicalParams) -> dict[str, float]:
    """All seven small/large-frequency matrix identity residuals, no raising."""
    out: dict[str, float] = {}

    def record(which, lhs, rhs, scale):
        out[which] = _residual(lhs, rhs, scale)

    mats = system_matrices(p)
    b = p.sqrt_gamma_c0
    dc = derive_constants(p)
    U1 = u1_matrix(p)
    N2 = n2_matrix(p)
    U1_inv = np.linalg.inv(U1)
    lam1s = np.diag([0.0, 1j * b, -1j * b])
    scale1 = float(np.max(np.abs(mats.A1)))
    scale2 = float(np.max(np.abs(mats.A2)))
    record("Lambda1_s", U1_inv @ mats.A1 @ U1, lam1s, scale1)
    bnu = p.one_plus_beta_nu0
    row = 0.5 * (bnu + (p.gamma - 1.0) * p.D_th)
    a2_printed = np.array(
        [
            [p.D_th, p.D_th - bnu, p.D_th - bnu],
            [0.5 * (p.gamma - 1.0) * p.D_th, row, row],
            [0.5 * (p.gamma - 1.0) * p.D_th, row, row],
        ],
        dtype=complex,
    )
    a2_1s = U1_inv @ mats.A2 @ U1
    record("A2_1s_printed", a2_1s, a2_printed, scale2)
    record(
        "Lambda2_s",
        a2_1s - (N2 @ lam1s - lam1s @ N2),
        np.diag([p.D_th, dc.Gamma0, dc.Gamma0]).astype(complex),
        scale2,
    )

    gap = bnu - p.gamma_Dth
    Q1 = q1_matrix(p)
    V2 = v2_matrix(p)
    V3 = v3_matrix(p)
    Q1_inv = np.linalg.inv(Q1)
    lam1l = np.diag([0.0, p.gamma_Dth, bnu]).astype(complex)
    record("Lambda1_l", Q1_inv @ mats.A2 @ Q1, lam1l, scale2)
    a1_1l = Q1_inv @ mats.A1 @ Q1
    record(
        "V2_commutator_vanishes",
        a1_1l - (V2 @ lam1l - lam1l @ V2),
        np.zeros((3, 3), dtype=complex),
        scale1,
    )
    a1_2l = a1_1l @ V2
    lam3 = np.diag(
        [
            p.c0**2 / bnu,
            (p.gamma - 1.0) * p.c0**2 / gap,
            -p.gamma * p.c0**2 * (bnu - p.D_th) / (gap * bnu),
        ]
    ).astype(complex)
    scale3 = float(np.max(np.abs(lam3)))
    record("Lambda3_l", a1_2l - (V3 @ lam1l - lam1l @ V3), lam3, scale3)
    a1_1l_printed = np.array(
        [
            [0.0, 1j * p.gamma * b * p.c0**2 * p.alpha_p * p.D_th / gap, 1j * b],
            [-1j * (p.gamma - 1.0) / (p.alpha_p * b), 0.0, 0.0],
            [1j * b * (1.0 + (p.gamma - 1.0) * p.D_th / gap), 0.0, 0.0],
        ],
        dtype=complex,
    )
    record("A1_1l_printed", a1_1l, a1_1l_printed, scale1)
    return out


def spectral_abscissa(p: PhysicalParams, r) -> np.ndarray:
    """max_j Re lambda_j over the characteristic roots, vectorized."""
    lam1, lam2, lam3, _ = _roots_complex(p, np.atleast_1d(np.asarray(r, dtype=float)))
    return np.maximum.reduce([lam1.real, lam2.real, lam3.real])


def bounded_zone_scan(p: PhysicalParams, zone: ZonePartition, grid_size: int = 512):
    """(max Re lambda, fitted c) over a log grid of the bounded zone.

    Raises StabilityViolated if any sampled abscissa is >= 0.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    rs = np.logspace(math.log10(zone.eps0), math.log10(zone.N0), grid_size)
    absc = spectral_abscissa(p, rs)
    worst = int(np.argmax(absc))
    if absc[worst] >= 0.0:
        raise StabilityViolated(float(rs[worst]), float(absc[worst]))
    return float(absc[worst]), float(-absc[worst])


def pointwise_bound_fit(p: PhysicalParams, r_grid, t_grid, Phi0_values, Phi_values):
    """Certificate (C, c) for |Phi(t,xi)| <= C exp(-c r^2/(1+r^2) t) |Phi0(xi)|.

    Works in log space over precomputed |Phi| ratios on the (r, t) grid;
    points where |Phi| underflowed to zero satisfy any bound and are skipped.
    c is scanned over a log grid in (0, 2 Gamma0], keeping the largest value
    whose max ratio C stays below 1e3; C is that max ratio.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    n0 = np.asarray(Phi0_values, dtype=float)
    nt = np.asarray(Phi_values, dtype=float)
    with np.errstate(divide="ignore"):
        log_ratio = np.where(nt > 0.0, np.log(np.where(nt > 0.0, nt, 1.0)) - np.log(n0)[:, None], -np.inf)
    f = (r_grid**2 / (1.0 + r_grid**2))[:, None] * t_grid[None, :]
    dc = derive_constants(p)
    best = None
    for c in np.geomspace(1e-4, 2.0 * dc.Gamma0, 200):
        log_C = float(np.max(log_ratio + c * f))
        if log_C < math.log(1e3):
            best = (math.exp(log_C), float(c))
    if best is None:
        c = 1e-4
        best = (math.exp(float(np.max(log_ratio + c * f))), c)
    return best
