"""Vanishing momentum diffusion: energies, sup-norm pipelines, sweeps, WKB.

The viscous/inviscid difference u = phi - phi^(0) solves the inhomogeneous
third-order mode equation with source
    f = -(1+beta) nu0 r^2 phi_tt^(0) - (1+beta) nu0 gamma D_th r^4 phi_t^(0)
and data (0, 0, -(1+beta) nu0 r^2 phi1).  Everything here evaluates exact
closed forms; sup-norm statements are certified through L1 phase-space
bounds, and inner time integrals use elementary antiderivatives of
exponential-trigonometric products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datagen import DataTriple
from .params import PhysicalParams
from .quadrature import (
    QuadratureRule,
    data_truncation_radius,
    fit_rate,
    l1_norm_radial,
    l2_norm_radial,
    solution_truncation_radius,
)
from .spectral import ModeRepresentation, ModeState, rk4_oracle


class SingularAtOrigin(ArithmeticError):
    """A phase-space weight fails to be integrable near r = 0."""


class NotPlateaued(ArithmeticError):
    """A uniform-integrability integral is still growing at T_max."""


QUANTITIES = ("u_t", "lap_u", "u", "temp_diff")

#: quantities whose sup-norm certificate the analysis restricts to n >= 2
N1_RESTRICTED = ("u", "temp_diff")


def _data_decay(data: DataTriple) -> float:
    """Quadratic decay exponent of the datum transforms, min over the triple."""
    rates = [spec.width**2 / 4.0 for spec in data.specs() if spec is not None]
    if not rates:
        raise ValueError("data triple is identically zero")
    return min(rates)


# ---------------------------------------------------------------------------
# energy functionals of the inhomogeneous model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnergyParams:
    """Coefficients k1..k7 of the two compensated energy constructions."""

    k1: float
    k2: float
    k3: float
    k4: float
    k5: float
    k6: float
    k7: float


def energy_params(p: PhysicalParams, k1: float, r: float) -> EnergyParams:
    """Evaluate k2..k7 at radius r for admissible k1 in (0, (gamma-1) c0^2)."""
    g, c02, gD = p.gamma, p.c0**2, p.gamma_Dth
    if not 0.0 < k1 < (g - 1.0) * c02:
        raise ValueError(f"k1 must lie in (0, {(g - 1.0) * c02}), got {k1}")
    bnu = p.one_plus_beta_nu0
    r2 = r * r
    r4 = r2 * r2
    base = g**2 * p.D_th**2 * c02 * r2 + k1 * (g * c02 - k1 + bnu * gD * r2)
    k2 = base * r4
    k3 = (k1 * bnu + gD * c02) / base
    coef_ut = (g * c02 - k1 + 2.0 * bnu * gD * r2) * r2 - k2 * k3**2
    k4 = coef_ut * ((g**2 * p.D_th**2 * c02 + k1 * bnu * gD) * r2 + k1 * (g * c02 - k1)) / r2
    k5 = (k1 * bnu + gD * c02) ** 2 * r4 * r2 / (g * c02 - k1 + 2.0 * bnu * gD * r2)
    k6 = (g * c02 - k1 + 2.0 * bnu * gD * r2) / ((k1 * bnu + gD * c02) * r2)
    k7 = (
        g**2 * p.D_th**2 * c02 * r2
        + k1 * (g * c02 - k1 + bnu * gD * r2)
        - (k1 * bnu + gD * c02) ** 2 * r2 / (g * c02 - k1 + 2.0 * bnu * gD * r2)
    )
    return EnergyParams(k1=k1, k2=k2, k3=k3, k4=k4, k5=k5, k6=k6, k7=k7)


def energy_functionals(p: PhysicalParams, k1: float, r: float, u, ut, utt):
    """The five quadratic forms (E1..E5) of the two energy propositions.

    E2, E3 and E5 carry the simplified (lower-bound) coefficients exactly as
    the propositions display them.
    """
    if not r > 0.0:
        raise ValueError("energy functionals need r > 0")
    g, c02, gD = p.gamma, p.c0**2, p.gamma_Dth
    bnu = p.one_plus_beta_nu0
    ks = energy_params(p, k1, r)
    r2 = r * r
    r4 = r2 * r2
    u, ut, utt = np.asarray(u), np.asarray(ut), np.asarray(utt)
    e1 = np.abs(utt + gD * r2 * ut + k1 * r2 * u) ** 2
    e2 = k1 * (g * c02 - k1) * r4 * np.abs(u + ks.k3 * ut) ** 2
    e3 = (
        k1
        * (g * c02 - k1) ** 2
        * r2
        / ((g**2 * p.D_th**2 * c02 + k1 * bnu * gD) * r2 + k1 * (g * c02 - k1))
        * np.abs(ut) ** 2
    )
    e4 = ks.k5 * np.abs(u + ks.k6 * ut) ** 2
    e5 = k1 * (g * c02 - k1) ** 2 * r4 / (g * c02 - k1 + 2.0 * bnu * gD * r2) * np.abs(u) ** 2
    return e1, e2, e3, e4, e5


def rhs_coefficient(p: PhysicalParams, k1: float, r: float) -> float:
    """Multiplier of |f|^2 on the right of both energy inequalities."""
    gD, c02 = p.gamma_Dth, p.c0**2
    bnu = p.one_plus_beta_nu0
    return (2.0 * gD * c02 + k1 * bnu) / (4.0 * bnu * gD * c02 * r**2)


# ---------------------------------------------------------------------------
# difference fields
# ---------------------------------------------------------------------------


class DiffEvaluator:
    """Closed-form difference fields u = phi - phi^(0) over arbitrary radii.

    Caches the viscous/inviscid representations for the arrays it has already
    seen (object identity), so repeated quadrature passes over the same node
    set stay cheap.
    """

    def __init__(self, p: PhysicalParams, data: DataTriple, nu0: float, n: int):
        self.p = p
        self.data = data
        self.nu0 = nu0
        self.n = n
        # pinned entries: (array, viscous rep, inviscid rep, value cache)
        self._pinned: list[list] = []

    def _build(self, r: np.ndarray):
        hats = self.data.even_hats(self.n, r)
        return (
            ModeRepresentation(self.p, r, hats, nu0=self.nu0),
            ModeRepresentation(self.p, r, hats, nu0=0.0),
        )

    def pin(self, *arrays: np.ndarray) -> None:
        """Precompute and keep representations for the given node sets.

        Quadrature rules evaluate the same arrays many times (per quantity and
        per derivative order); pinned arrays hit a value cache keyed by
        (t, order, model).  Unpinned arrays are evaluated fresh.
        """
        keep = []
        for r in arrays:
            existing = next((e for e in self._pinned if e[0] is r), None)
            if existing is None:
                vis, inv = self._build(r)
                existing = [r, vis, inv, {}]
            keep.append(existing)
        self._pinned = keep

    def reps(self, r: np.ndarray):
        for entry in self._pinned:
            if entry[0] is r:
                return entry[1], entry[2]
        return self._build(r)

    def _eval(self, r: np.ndarray, t: float, order: int, inviscid_model: bool) -> np.ndarray:
        entry = next((e for e in self._pinned if e[0] is r), None)
        if entry is None:
            vis, inv = self._build(r)
            return (inv if inviscid_model else vis).eval(t, order)
        key = (t, order, inviscid_model)
        if key not in entry[3]:
            if len(entry[3]) > 128:
                entry[3].clear()
            entry[3][key] = (entry[2] if inviscid_model else entry[1]).eval(t, order)
        return entry[3][key]

    def u_state(self, r: np.ndarray, t: float):
        return tuple(self._eval(r, t, k, False) - self._eval(r, t, k, True) for k in range(3))

    def source(self, r: np.ndarray, t: float) -> np.ndarray:
        """f = -(1+beta) nu0 [r^2 phi_tt^(0) + gamma D_th r^4 phi_t^(0)]."""
        _, inv = self.reps(r)
        bnu = (1.0 + self.p.beta) * self.nu0
        rr = inv.r
        return -bnu * rr**2 * self._eval(r, t, 2, True) - bnu * self.p.gamma_Dth * rr**4 * self._eval(
            r, t, 1, True
        )

    def quantity(self, q: str, r: np.ndarray, t: float) -> np.ndarray:
        if q not in QUANTITIES:
            raise ValueError(f"unknown difference quantity {q!r}")
        u = self._eval(r, t, 0, False) - self._eval(r, t, 0, True)
        if q == "u":
            return u
        if q == "lap_u":
            return r**2 * u
        ut = self._eval(r, t, 1, False) - self._eval(r, t, 1, True)
        if q == "u_t":
            return ut
        utt = self._eval(r, t, 2, False) - self._eval(r, t, 2, True)
        p = self.p
        bnu = (1.0 + p.beta) * self.nu0
        r2 = np.where(r > 0.0, r * r, 1.0)
        bracket = (
            utt + p.gamma * p.c0**2 * r2 * u + bnu * r2 * ut + bnu * r2 * self._eval(r, t, 1, True)
        )
        out = bracket / (p.alpha_p * p.c0**2 * p.gamma_Dth * r2)
        return np.where(r > 0.0, out, 0.0)


def difference_mode(p: PhysicalParams, r, data: DataTriple, t: float, n: int | None = None) -> ModeState:
    """Exact difference triple (u, u_t, u_tt) at time t."""
    n = p.n if n is None else n
    ev = DiffEvaluator(p, data, p.nu0, n)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    u, ut, utt = ev.u_state(r, t)
    return ModeState(phi_hat=u, phi_t_hat=ut, phi_tt_hat=utt, t=t, r=r)


def source_term(p: PhysicalParams, r, inviscid_state: ModeState) -> np.ndarray:
    """Source of the inhomogeneous difference equation at the given state."""
    r = np.asarray(inviscid_state.r if r is None else r, dtype=float)
    bnu = p.one_plus_beta_nu0
    return (
        -bnu * r**2 * inviscid_state.phi_tt_hat
        - bnu * p.gamma_Dth * r**4 * inviscid_state.phi_t_hat
    )


# ---------------------------------------------------------------------------
# energy inequality margins
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnergyMargins:
    """Worst finite-difference margins of the two energy inequalities."""

    prop51: float
    prop52: float
    scale51: float
    scale52: float


def energy_inequality_check(
    p: PhysicalParams,
    k1: float,
    r: float,
    data: DataTriple,
    t_grid,
    n: int | None = None,
) -> EnergyMargins:
    """max over interior grid points of (1/2) dE/dt - RHS for both energies.

    The derivative is a central finite difference along the exact difference
    trajectory; `scale` is the largest magnitude among the differenced
    left-hand sides and the right-hand side, for tolerance normalization.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 3 or np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("t_grid must be strictly increasing with >= 3 points")
    n = p.n if n is None else n
    ev = DiffEvaluator(p, data, p.nu0, n)
    r_arr = np.full(1, float(r))
    vis, inv = ev.reps(r_arr)

    u, ut, utt = (
        (vis.eval_many(t_grid, k) - inv.eval_many(t_grid, k))[:, 0] for k in range(3)
    )
    e1, e2, e3, e4, e5 = energy_functionals(p, k1, float(r), u, ut, utt)
    bnu = (1.0 + p.beta) * p.nu0
    rr = float(inv.r[0])
    f = (
        -bnu * rr**2 * inv.eval_many(t_grid, 2)
        - bnu * p.gamma_Dth * rr**4 * inv.eval_many(t_grid, 1)
    )[:, 0]
    e123 = np.real(e1 + e2 + e3)
    e145 = np.real(e1 + e4 + e5)
    rhs = rhs_coefficient(p, k1, float(r)) * np.abs(f) ** 2

    dt = np.diff(t_grid)
    lhs51 = 0.5 * (e123[2:] - e123[:-2]) / (dt[1:] + dt[:-1])
    lhs52 = 0.5 * (e145[2:] - e145[:-2]) / (dt[1:] + dt[:-1])
    inner_rhs = rhs[1:-1]
    margin51 = float(np.max(lhs51 - inner_rhs))
    margin52 = float(np.max(lhs52 - inner_rhs))
    scale51 = max(float(np.max(np.abs(lhs51))), float(np.max(inner_rhs)), 1e-300)
    scale52 = max(float(np.max(np.abs(lhs52))), float(np.max(inner_rhs)), 1e-300)
    return EnergyMargins(prop51=margin51, prop52=margin52, scale51=scale51, scale52=scale52)


def energy_inequality_time_grid(
    p: PhysicalParams, r: float, t_max: float = 20.0, points_per_period: int = 6400
):
    """Uniform grid resolving the mode oscillation at radius r.

    The central difference carries a relative error ~ (omega dt)^2 / 6, so
    points_per_period = 6400 keeps finite-differencing noise near 1e-7 of the
    energy scale, well inside the 1e-6 margin tolerance.
    """
    from .spectral import char_roots_arrays

    l1, lR, lI, pair, _ = char_roots_arrays(p, np.asarray([float(r)]))
    omega = max(abs(float(lI[0])), abs(float(lR[0])), abs(float(l1[0])), 0.5)
    dt = min(0.02, 2.0 * math.pi / omega / points_per_period)
    steps = int(math.ceil(t_max / dt))
    return np.linspace(0.0, t_max, steps + 1)


# ---------------------------------------------------------------------------
# sup-norm certificates and the vanishing-viscosity sweep
# ---------------------------------------------------------------------------


def supnorm_diff_bound(
    p: PhysicalParams,
    data: DataTriple,
    quantity: str,
    t: float,
    n: int | None = None,
    nu0: float | None = None,
    rule: QuadratureRule | None = None,
    evaluator: DiffEvaluator | None = None,
) -> float:
    """L1 phase-space norm of the difference quantity: a sup-norm certificate.

    Quantities: u_t, lap_u (= r^2 u), u, temp_diff (the bracketed temperature
    combination divided by alpha_p c0^2 gamma D_th r^2).
    """
    n = p.n if n is None else n
    nu0 = p.nu0 if nu0 is None else nu0
    if evaluator is None:
        evaluator = DiffEvaluator(p, data, nu0, n)
    if rule is None:
        rule = diff_quadrature_rule(p, t, data)
    evaluator.pin(rule.nodes, rule.edges)

    def integrand(r):
        return evaluator.quantity(quantity, np.asarray(r, dtype=float), t)

    # origin guard: flag a diverging weight only when the small-r values are
    # genuinely large (above rounding noise of the cancelling brackets)
    small = rule.R * np.array([1e-7, 1e-6])
    probe = np.abs(integrand(small))
    body = float(np.max(np.abs(integrand(rule.nodes[:: max(1, len(rule.nodes) // 64)]))))
    if (
        min(probe) > 1e-3 * max(body, 1e-300)
        and probe[0] > probe[1] * 10.0 ** (n - 0.5)
    ):
        raise SingularAtOrigin(f"{quantity} integrand diverges near r = 0 for n = {n}")
    return l1_norm_radial(integrand, n, rule)


def default_sweep_nu0() -> list[float]:
    """Three decades, five per decade boundary: 1e-2 .. 1e-5."""
    return [1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5]


def default_sweep_times() -> np.ndarray:
    return np.concatenate([[1e-2], np.logspace(-1.0, 4.0, 13)])


def diff_quadrature_rule(
    p: PhysicalParams, t: float, data: DataTriple, panels_scale: int = 1
) -> QuadratureRule:
    """Rule for difference-quantity L1 norms at time t.

    The cutoff is certified by the datum decay plus the r = 1 spectral gap;
    eighth-period panels are needed only where the slowest pair envelope
    exp(-(gamma-1) D_th r^2 t / 2) is still alive, coarse panels beyond.
    """
    decay = _data_decay(data)
    R = solution_truncation_radius(p, max(t, 1e-6), decay)
    pair_rate = (p.gamma - 1.0) * p.D_th / 2.0
    fine_R = math.sqrt(50.0 / (pair_rate * max(t, 1e-6)))
    return QuadratureRule.build(
        p, t, R=R, fine_R=min(fine_R, R), panels_scale=panels_scale
    )


def limit_sweep(
    p: PhysicalParams,
    nu0_list,
    quantities=QUANTITIES,
    t_grid=None,
    n: int | None = None,
    data: DataTriple | None = None,
    allow_n1: bool = False,
):
    """Sup over the t-grid of each sup-norm certificate, swept over nu0.

    Returns (table, fits): table maps quantity -> list of sup values aligned
    with nu0_list; fits maps quantity -> RateFitResult of value against nu0.
    Quantities u and temp_diff are restricted to n >= 2 unless allow_n1.
    """
    n = p.n if n is None else n
    if data is None:
        raise ValueError("limit_sweep needs the data triple")
    nu0_list = [float(v) for v in nu0_list]
    if max(nu0_list) / min(nu0_list) < 1000.0 * (1.0 - 1e-12):
        raise ValueError("nu0 list must span >= 3 decades")
    if t_grid is None:
        t_grid = default_sweep_times()
    active = []
    for q in quantities:
        if n == 1 and q in N1_RESTRICTED and not allow_n1:
            continue
        active.append(q)

    table = {q: [] for q in active}
    for nu0 in nu0_list:
        ev = DiffEvaluator(p, data, nu0, n)
        best = {q: 0.0 for q in active}
        for t in t_grid:
            rule = diff_quadrature_rule(p, float(t), data)
            for q in active:
                val = supnorm_diff_bound(
                    p, data, q, float(t), n=n, nu0=nu0, rule=rule, evaluator=ev
                )
                best[q] = max(best[q], val)
        for q in active:
            table[q].append(best[q])
    fits = {q: fit_rate(list(zip(nu0_list, table[q]))) for q in active}
    return table, fits


# ---------------------------------------------------------------------------
# closed-form inner time integrals (uniform integrability)
# ---------------------------------------------------------------------------


def _int_exp(A, T):
    """int_0^T e^(A tau) dtau, stable for A <= 0 including A -> 0."""
    A = np.asarray(A, dtype=float)
    safe = np.where(A == 0.0, 1.0, A)
    return np.where(A == 0.0, T, np.expm1(A * T) / safe)


def _int_exp_cos(A, B, T):
    """int_0^T e^(A tau) cos(B tau) dtau."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    denom = A * A + B * B
    safe = np.where(denom == 0.0, 1.0, denom)
    value = (np.exp(A * T) * (A * np.cos(B * T) + B * np.sin(B * T)) - A) / safe
    return np.where(denom == 0.0, T, value)


def _int_exp_sin(A, B, T):
    """int_0^T e^(A tau) sin(B tau) dtau."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    denom = A * A + B * B
    safe = np.where(denom == 0.0, 1.0, denom)
    value = (np.exp(A * T) * (A * np.sin(B * T) - B * np.cos(B * T)) + B) / safe
    return np.where(denom == 0.0, 0.0, value)


def time_integral_abs2(rep: ModeRepresentation, order: int, T: float) -> np.ndarray:
    """int_0^T |d^order/dt^order phi_hat(tau, r)|^2 dtau, exactly per mode."""
    (c1, c2, c3), a = rep.coeffs(order)
    l1, lR, lI = rep.l1, rep.lR, rep.lI

    # conjugate-pair branch
    i11 = _int_exp(2.0 * l1, T)
    i12 = _int_exp_cos(l1 + lR, lI, T)
    i13 = _int_exp_sin(l1 + lR, lI, T)
    iexp2 = _int_exp(2.0 * lR, T)
    icos2 = _int_exp_cos(2.0 * lR, 2.0 * lI, T)
    isin2 = _int_exp_sin(2.0 * lR, 2.0 * lI, T)
    pair_val = (
        np.abs(c1) ** 2 * i11
        + np.abs(c2) ** 2 * (iexp2 + icos2) / 2.0
        + np.abs(c3) ** 2 * (iexp2 - icos2) / 2.0
        + 2.0 * np.real(c1 * np.conj(c2)) * i12
        + 2.0 * np.real(c1 * np.conj(c3)) * i13
        + 2.0 * np.real(c2 * np.conj(c3)) * isin2 / 2.0
    )

    # distinct-real branch
    lam = np.where(rep.pair, 0.0, np.stack([l1, lR, lI]))
    real_val = np.zeros_like(l1)
    for j in range(3):
        real_val = real_val + np.abs(a[j]) ** 2 * _int_exp(2.0 * lam[j], T)
        for k in range(j + 1, 3):
            real_val = real_val + 2.0 * np.real(a[j] * np.conj(a[k])) * _int_exp(
                lam[j] + lam[k], T
            )

    out = np.where(rep.pair, pair_val, real_val)
    if np.any(rep.zero):
        if order == 0:
            # int_0^T |phi0 + tau phi1|^2 dtau expanded exactly
            p0, p1 = rep._phi0, rep._phi1
            limit = (
                np.abs(p0) ** 2 * T
                + np.real(p0 * np.conj(p1)) * T**2
                + np.abs(p1) ** 2 * T**3 / 3.0
            )
        elif order == 1:
            limit = np.abs(rep._phi1) ** 2 * T
        else:
            limit = np.zeros_like(np.real(out))
        out = np.where(rep.zero, limit, out)
    return np.real(out)


UNIFORM_VARIANTS = ("P54_j0", "P54_j1", "P54_j2", "P55", "P56")


def uniform_integrability_value(
    p: PhysicalParams,
    data: DataTriple,
    variant: str,
    T: float,
    n: int,
    rule: QuadratureRule | None = None,
) -> float:
    """One evaluation of the stated integral at horizon T."""
    if variant not in UNIFORM_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if n == 1 and variant == "P55":
        raise SingularAtOrigin("the 1/r weight is not integrable against r^0 near 0")
    if rule is None:
        # cumulative integrals keep their early-time mass at every radius, so
        # the cutoff comes from the datum decay; oscillation survives only
        # where the slowest mode envelope exp(-(gamma-1) D_th r^2 T) is alive
        R = data_truncation_radius(_data_decay(data))
        r_osc = math.sqrt(60.0 / ((p.gamma - 1.0) * p.D_th * max(T, 1.0)))
        rule = QuadratureRule.build(p, min(T, 1e4), R=R, fine_R=min(r_osc, R))

    if variant == "P56":
        taus = np.concatenate([[0.0], np.geomspace(1e-2, max(T, 1e-2), 25)])

        def integrand_at(tau):
            def f(r):
                r = np.asarray(r, dtype=float)
                rep = ModeRepresentation(p, r, data.even_hats(n, r), nu0=0.0)
                return rep.eval(float(tau), 1)

            return f

        return max(l1_norm_radial(integrand_at(tau), n, rule) for tau in taus)

    weights = {"P54_j0": 0, "P54_j1": 1, "P54_j2": 2}

    def integrand(r):
        r = np.asarray(r, dtype=float)
        rep = ModeRepresentation(p, r, data.even_hats(n, r), nu0=0.0)
        i2 = time_integral_abs2(rep, 2, T)
        i1 = time_integral_abs2(rep, 1, T)
        if variant == "P55":
            r2 = np.where(r > 0.0, r * r, 1.0)
            inner = np.where(r > 0.0, i2 / r2, 0.0) + r**2 * i1
        else:
            j = weights[variant]
            inner = r ** (2 * j) * i2 + r ** (2 * j + 4) * i1
        return np.sqrt(np.maximum(inner, 0.0))

    return l1_norm_radial(integrand, n, rule)


def uniform_integrability_check(
    p: PhysicalParams,
    data: DataTriple,
    variant: str,
    T_max: float,
    n: int,
    doublings: int = 5,
    plateau_rtol: float = 1e-3,
):
    """Value at T_max plus plateau detection over halving horizons.

    Evaluates the integral at T_max/2^k for k = doublings..0, verifies it is
    nondecreasing in T, and requires the final doubling to grow by less than
    plateau_rtol relatively; raises NotPlateaued otherwise.  Returns
    (value_at_T_max, history list of (T, value)).
    """
    horizons = [T_max / 2.0**k for k in range(doublings, -1, -1)]
    history = [(T, uniform_integrability_value(p, data, variant, T, n)) for T in horizons]
    values = [v for _, v in history]
    for earlier, later in zip(values, values[1:]):
        if later < earlier * (1.0 - 1e-9):
            raise ArithmeticError("uniform-integrability integral decreased with T")
    if values[-1] > 0.0 and (values[-1] - values[-2]) > plateau_rtol * values[-1]:
        raise NotPlateaued(
            f"{variant}: grew by {(values[-1] - values[-2]) / values[-1]:.2e} over the last doubling"
        )
    return values[-1], history


# ---------------------------------------------------------------------------
# WKB corrector
# ---------------------------------------------------------------------------


def wkb_corrector(
    p: PhysicalParams, data: DataTriple, r, t: float, n: int, steps: int = 1200
) -> np.ndarray:
    """First-order interior corrector: inviscid operator, zero data, source
    -(1+beta) r^2 phi_tt^(0) - (1+beta) gamma D_th r^4 phi_t^(0).

    Integrated by RK4 with the closed-form inviscid solution as the source.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    hats = data.even_hats(n, r)
    inv = ModeRepresentation(p, r, hats, nu0=0.0)
    bfac = 1.0 + p.beta

    def source(tau, rr):
        return -bfac * rr**2 * inv.eval(tau, 2) - bfac * p.gamma_Dth * rr**4 * inv.eval(tau, 1)

    zero = np.zeros_like(r, dtype=complex)
    state = rk4_oracle(
        p, r, hats, t, steps, nu0=0.0, source=source, initial_triple=(zero, zero, zero)
    )
    return state.phi_hat


def wkb_corrector_error(
    p: PhysicalParams,
    nu0_list,
    data: DataTriple,
    t: float = 1.0,
    n: int | None = None,
    include_corrector: bool = True,
    steps: int = 1200,
):
    """Fitted nu0-slope of || phi - phi^(0) - sqrt(nu0) phi^(I,1) ||_L2.

    With include_corrector=False the corrector term is omitted and the slope
    of || phi - phi^(0) || itself is fitted.  Returns (RateFitResult, table).
    """
    n = p.n if n is None else n
    nu0_list = [float(v) for v in nu0_list]
    if max(nu0_list) / min(nu0_list) < 100.0 * (1.0 - 1e-12):
        raise ValueError("nu0 list must span >= 2 decades")
    R = solution_truncation_radius(p, max(t, 1e-6), _data_decay(data))
    rule = QuadratureRule.build(p, t, R=R)
    rs = rule.nodes
    hats = data.even_hats(n, rs)
    inv = ModeRepresentation(p, rs, hats, nu0=0.0)
    phi_inv = inv.eval(t, 0)
    corr = wkb_corrector(p, data, rs, t, n, steps=steps) if include_corrector else 0.0

    samples = []
    for nu0 in nu0_list:
        vis = ModeRepresentation(p, rs, hats, nu0=nu0)
        err = vis.eval(t, 0) - phi_inv
        if include_corrector:
            err = err - math.sqrt(nu0) * corr
        norm = l2_norm_radial(lambda r, e=err: e, n, rule)
        samples.append((nu0, norm))
    return fit_rate(samples), samples
