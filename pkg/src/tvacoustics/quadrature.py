"""Deterministic phase-space quadrature, reference rates and log-log rate fits.

Radial integrals use composite Gauss-Legendre panels whose width resolves the
sin(sqrt(gamma) c0 r t) oscillation (at most an eighth of its period for
t > 1; a fixed 256-panel rule otherwise).  L1 norms of real oscillating
integrands additionally split panels at sign changes, located by vectorized
bisection, so absolute-value kinks never degrade the rule's accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import PhysicalParams, derive_constants


class TailNotNegligible(ArithmeticError):
    """The truncated integrand still carries weight at the cutoff radius."""


class InsufficientWindow(ValueError):
    """Rate fits need >= 5 samples spanning >= 2 decades."""


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1}; n = 1 gives the 2-point set."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def reference_rate(n: int, t) -> np.ndarray:
    """Optimal L2 growth/decay rate A_n(t): sqrt(t), sqrt(ln t), t^(1/2 - n/4)."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 1.0):
        raise ValueError("reference rate defined for t > 1")
    if n == 1:
        return np.sqrt(t)
    if n == 2:
        return np.sqrt(np.log(t))
    return t ** (0.5 - n / 4.0)


def truncation_radius(
    p: PhysicalParams, t: float, tol: float = 1e-16, data_decay: float = 0.0
) -> float:
    """Cutoff R with envelope tail exp(-(Gamma_min t + data_decay) R^2) below tol.

    Gamma_min = min(D_th, Gamma0) controls the slowest interior decay of the
    solution itself; `data_decay` adds the quadratic-exponent decay rate of
    the datum transforms when known (width a Gaussians give a^2/4).  The
    single-power envelope covers L1 integrands, hence a fortiori the squared
    L2 ones.  The floor R >= 1 keeps the bounded zone inside the range (its
    contribution dies like exp(-c t) there).
    """
    if t <= 0.0:
        raise ValueError("truncation radius needs t > 0")
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    gamma_min = min(p.D_th, derive_constants(p).Gamma0)
    envelope = math.sqrt(math.log(1.0 / tol) / (gamma_min * t + data_decay))
    return max(1.0, envelope)


def data_truncation_radius(data_decay: float, tol: float = 1e-22) -> float:
    """Cutoff certified by the datum transforms alone: exp(-data_decay R^2) = tol.

    Needed for cumulative (time-integrated) quantities, which retain their
    early-time magnitude at every radius and therefore never gain the
    exp(-c t) exterior smallness.
    """
    if not data_decay > 0.0:
        raise ValueError("datum-decay truncation needs a positive decay rate")
    return max(1.0, math.sqrt(math.log(1.0 / tol) / data_decay))


def solution_truncation_radius(
    p: PhysicalParams,
    t: float,
    data_decay: float,
    tol: float = 1e-22,
    include_inviscid: bool = True,
) -> float:
    """Cutoff for solution-type integrands carrying datum transforms.

    Outside the interior zone a solution only decays like exp(-c t) (with c
    the spectral gap at r = 1, where it is weakest), so the tail there must be
    certified by the datum decay exp(-data_decay r^2).  Solves
    c*t + data_decay*R^2 >= ln(1/tol), floored at R = 1.
    """
    from .spectral import char_roots_arrays

    if not data_decay > 0.0:
        raise ValueError("solution-type truncation needs datum decay")
    rates = []
    for nu0 in (None, 0.0) if include_inviscid else (None,):
        l1, lR, lI, pair, _ = char_roots_arrays(p, np.asarray([1.0]), nu0)
        absc = max(l1[0], lR[0] if pair[0] else max(lR[0], lI[0]))
        rates.append(-absc)
    c_gap = min(rates)
    budget = max(math.log(1.0 / tol) - c_gap * t, 0.0)
    return max(1.0, math.sqrt(budget / data_decay))


# eighth of the oscillation period, in r, at time-context t
def _panel_width(p: PhysicalParams, t: float) -> float:
    return (math.pi / 4.0) / (p.sqrt_gamma_c0 * t)


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule on [0, R] tied to a time context."""

    edges: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    R: float
    t_context: float
    points_per_panel: int
    panels_scale: int
    tail_rtol: float = 1e-12

    @classmethod
    def from_edges(
        cls,
        edges: np.ndarray,
        t_context: float,
        points_per_panel: int = 8,
        panels_scale: int = 1,
    ) -> "QuadratureRule":
        edges = np.asarray(edges, dtype=float)
        scale = max(1, int(panels_scale))
        if scale > 1:
            split = np.linspace(edges[:-1], edges[1:], scale + 1, axis=1)
            edges = np.concatenate([split[:, :-1].ravel(), edges[-1:]])
        gx, gw = np.polynomial.legendre.leggauss(points_per_panel)
        half = np.diff(edges) / 2.0
        mid = (edges[:-1] + edges[1:]) / 2.0
        nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        weights = (half[:, None] * gw[None, :]).ravel()
        return cls(
            edges=edges,
            nodes=nodes,
            weights=weights,
            R=float(edges[-1]),
            t_context=t_context,
            points_per_panel=points_per_panel,
            panels_scale=scale,
        )

    @classmethod
    def build(
        cls,
        p: PhysicalParams,
        t: float,
        R: float | None = None,
        points_per_panel: int = 8,
        panels_scale: int = 1,
        tol: float = 1e-18,
        min_panels: int = 256,
        data_decay: float = 0.0,
        fine_R: float | None = None,
        coarse_width: float = 0.05,
    ) -> "QuadratureRule":
        """Oscillation-resolving rule on [0, R].

        When ``fine_R`` is given, the eighth-period panel width applies only on
        [0, fine_R] and panels of ``coarse_width`` cover the rest; callers use
        this when the oscillatory part of the integrand is confined to small
        radii (cumulative time integrals).
        """
        if R is None:
            R = truncation_radius(p, max(t, 1e-12), tol, data_decay)
        if t > 1.0:
            width = _panel_width(p, t)
        else:
            width = R / min_panels
        if fine_R is not None and fine_R < R:
            n_fine = max(8, int(math.ceil(min(fine_R, R) / width)))
            fine_edges = np.linspace(0.0, min(fine_R, R), n_fine + 1)
            n_coarse = max(8, int(math.ceil((R - fine_edges[-1]) / coarse_width)))
            coarse_edges = np.linspace(fine_edges[-1], R, n_coarse + 1)
            edges = np.concatenate([fine_edges, coarse_edges[1:]])
        else:
            panels = max(min_panels, int(math.ceil(R / width)))
            edges = np.linspace(0.0, R, panels + 1)
        return cls.from_edges(
            edges, t_context=t, points_per_panel=points_per_panel, panels_scale=panels_scale
        )

    @property
    def panel_count(self) -> int:
        return len(self.edges) - 1

    def _check_tail(self, contributions: np.ndarray, total: float) -> None:
        per_panel = contributions.reshape(self.panel_count, self.points_per_panel).sum(axis=1)
        tail = abs(per_panel[-1])
        if tail > self.tail_rtol * max(abs(total), 1e-300):
            raise TailNotNegligible(
                f"last panel contributes {tail:.3e} of total {total:.3e}; increase R"
            )


def _evaluate(integrand, nodes: np.ndarray) -> np.ndarray:
    values = integrand(nodes) if callable(integrand) else np.asarray(integrand)
    if values.shape != nodes.shape:
        raise ValueError("integrand values must match the rule's node count")
    return values


def l2_norm_radial(integrand, n: int, rule: QuadratureRule) -> float:
    """L2 norm of a radial multiplier m(r): sqrt(|S^{n-1}| int r^{n-1} |m|^2 dr)."""
    values = _evaluate(integrand, rule.nodes)
    contrib = rule.weights * rule.nodes ** (n - 1) * np.abs(values) ** 2
    total = float(np.sum(contrib))
    rule._check_tail(contrib, total)
    return math.sqrt(sphere_area(n) * total)


def _bisect_roots(integrand, lo: np.ndarray, hi: np.ndarray, f_lo: np.ndarray, iters: int = 18):
    """Vectorized bisection for one sign change per bracket."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f_mid = np.real(integrand(mid))
        left = f_lo * f_mid <= 0.0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        f_lo = np.where(left, f_lo, f_mid)
    return 0.5 * (lo + hi)


def l1_norm_radial(integrand, n: int, rule: QuadratureRule) -> float:
    """L1 norm int r^{n-1} |m(r)| dr times |S^{n-1}|.

    Real-valued integrands get their sign changes located by bisection and the
    containing panels split there, so |m| stays panel-smooth.
    """
    values = _evaluate(integrand, rule.nodes)
    real = np.max(np.abs(np.imag(values))) <= 1e-12 * max(np.max(np.abs(values)), 1e-300)
    if not real:
        contrib = rule.weights * rule.nodes ** (n - 1) * np.abs(values)
        total = float(np.sum(contrib))
        rule._check_tail(contrib, total)
        return sphere_area(n) * total

    f_edges = np.real(_evaluate(integrand, rule.edges))
    flips = f_edges[:-1] * f_edges[1:] < 0.0
    contrib = rule.weights * rule.nodes ** (n - 1) * np.abs(np.real(values))
    per_panel = contrib.reshape(rule.panel_count, rule.points_per_panel).sum(axis=1)
    total_plain = float(np.sum(per_panel))

    if np.any(flips):
        idx = np.where(flips)[0]
        lo, hi = rule.edges[idx], rule.edges[idx + 1]
        roots = _bisect_roots(lambda x: np.real(integrand(x)), lo, hi, f_edges[idx])
        gx, gw = np.polynomial.legendre.leggauss(rule.points_per_panel)
        sub_edges = np.concatenate([np.stack([lo, roots], axis=1), np.stack([roots, hi], axis=1)])
        half = (sub_edges[:, 1] - sub_edges[:, 0]) / 2.0
        mid = (sub_edges[:, 1] + sub_edges[:, 0]) / 2.0
        nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        weights = (half[:, None] * gw[None, :]).ravel()
        split_vals = np.abs(np.real(integrand(nodes)))
        split_total = np.sum(weights * nodes ** (n - 1) * split_vals)
        total = total_plain - float(np.sum(per_panel[idx])) + float(split_total)
    else:
        total = total_plain
    rule._check_tail(contrib, total)
    return sphere_area(n) * total


def _slice_nodes(n: int, points: int):
    """Polar-angle nodes/weights for int_{-1}^{1} w_n(u) g(u) du.

    w_n(u) = |S^{n-2}| (1 - u^2)^{(n-3)/2}; Chebyshev-Gauss removes the n = 2
    endpoint singularity exactly, Gauss-Legendre handles n = 3, and n = 1 is
    the two-point set u = +-1.
    """
    if n == 1:
        return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
    if n == 2:
        k = np.arange(1, points + 1)
        u = np.cos((2.0 * k - 1.0) * math.pi / (2.0 * points))
        w = np.full(points, math.pi / points) * sphere_area(1)
        return u, w
    if n == 3:
        u, w = np.polynomial.legendre.leggauss(points)
        return u, w * sphere_area(2)
    raise ValueError("slice quadrature implemented for n in {1, 2, 3}")


def l2_norm_slice(integrand, n: int, rule: QuadratureRule, slice_points: int = 48) -> float:
    """L2 norm of f(r, u), u = cos(angle to the distinguished axis).

    Computes sqrt( int_0^R r^{n-1} int w_n(u) |f(r,u)|^2 du dr ).
    """
    u, uw = _slice_nodes(n, slice_points)
    r_grid = rule.nodes[:, None]
    values = integrand(r_grid, u[None, :])
    inner = np.sum(uw[None, :] * np.abs(values) ** 2, axis=1)
    contrib = rule.weights * rule.nodes ** (n - 1) * inner
    total = float(np.sum(contrib))
    rule._check_tail(contrib, total)
    return math.sqrt(total)


@dataclass(frozen=True)
class RateFitResult:
    """Least-squares slope of log(value) against log(t)."""

    slope: float
    intercept: float
    max_residual: float
    window: tuple[float, float]
    logarithmic_suspect: bool = False


def fit_rate(samples) -> RateFitResult:
    """Fit value ~ C * t^slope over (t, value) samples.

    Requires >= 5 positive samples spanning >= 2 decades.  Flags
    `logarithmic_suspect` when the slope is tiny yet value^2 is closely linear
    in ln t with positive coefficient (the sqrt(ln t) signature).
    """
    pts = sorted((float(t), float(v)) for t, v in samples)
    if len(pts) < 5:
        raise InsufficientWindow(f"need >= 5 samples, got {len(pts)}")
    ts = np.array([t for t, _ in pts])
    vs = np.array([v for _, v in pts])
    if np.any(vs <= 0.0) or np.any(ts <= 0.0):
        raise InsufficientWindow("rate fits need positive samples")
    if ts[-1] / ts[0] < 100.0 * (1.0 - 1e-12):
        raise InsufficientWindow(f"window {ts[0]:g}..{ts[-1]:g} spans < 2 decades")
    x = np.log(ts)
    y = np.log(vs)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)

    suspect = False
    if abs(slope) < 0.1:
        sq = vs**2
        a, b = np.polyfit(x, sq, 1)
        lin_resid = sq - (a * x + b)
        rel = float(np.max(np.abs(lin_resid))) / max(float(np.max(np.abs(sq))), 1e-300)
        suspect = a > 0.0 and rel < 0.02
    return RateFitResult(
        slope=float(slope),
        intercept=float(intercept),
        max_residual=float(np.max(np.abs(resid))),
        window=(float(ts[0]), float(ts[-1])),
        logarithmic_suspect=suspect,
    )
