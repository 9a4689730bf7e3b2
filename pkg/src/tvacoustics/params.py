"""Physical quantities of the thermoviscous acoustic system and derived constants.

All quantities are dimensionless program units.  Parameters may be supplied
either through the derived group (c0, gamma, beta, nu0, D_th, alpha_p) that
every formula actually consumes, or through the primitive quantities
(rho0, kappa_T, cP, cV, ...); when both are present they must agree to 1e-12
relative.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass


class ParameterError(ValueError):
    """Base class for parameter validation failures."""


class NonPositiveQuantity(ParameterError):
    def __init__(self, name: str, value: float):
        super().__init__(f"physical quantity {name!r} must be positive, got {value!r}")
        self.name = name
        self.value = value


class GammaNotGreaterThanOne(ParameterError):
    def __init__(self, gamma: float):
        super().__init__(f"thermodynamic identity requires gamma > 1, got {gamma!r}")
        self.gamma = gamma


class DegenerateDiffusion(ParameterError):
    def __init__(self, lhs: float, rhs: float):
        super().__init__(
            f"(1+beta)*nu0 = {lhs!r} equals gamma*D_th = {rhs!r}; "
            "this degenerate case is outside the model's standing assumption"
        )
        self.lhs = lhs
        self.rhs = rhs


#: relative tolerance for the degenerate-diffusion equality and for
#: consistency between primitive and derived parameter groups
EQUALITY_RTOL = 1e-12

#: below this separation the large-frequency transform matrices carry huge
#: entries; validation only warns
NEAR_DEGENERATE_WARN = 1e-6


@dataclass(frozen=True)
class PhysicalParams:
    """Parameter set for the coupled system.

    The derived group (c0, gamma, beta, nu0, D_th, alpha_p, n) is mandatory;
    primitive quantities are optional and only cross-checked.  `beta` is the
    viscosity ratio eta_b/eta_s + 1/3.
    """

    c0: float
    gamma: float
    beta: float
    nu0: float
    D_th: float
    alpha_p: float
    n: int = 2
    rho0: float | None = None
    kappa_T: float | None = None
    cP: float | None = None
    cV: float | None = None
    eta_s: float | None = None
    eta_b: float | None = None

    @property
    def one_plus_beta_nu0(self) -> float:
        return (1.0 + self.beta) * self.nu0

    @property
    def gamma_Dth(self) -> float:
        return self.gamma * self.D_th

    @property
    def sqrt_gamma_c0(self) -> float:
        return math.sqrt(self.gamma) * self.c0

    def with_nu0(self, nu0: float) -> "PhysicalParams":
        """Copy with a different momentum diffusion constant (for sweeps)."""
        return dataclasses.replace(self, nu0=nu0)

    def with_n(self, n: int) -> "PhysicalParams":
        return dataclasses.replace(self, n=n)


#: canonical desk-scale parameter set used throughout the experiments
CANON = PhysicalParams(c0=1.0, gamma=1.4, beta=1.0, nu0=0.1, D_th=0.1, alpha_p=1.0, n=2)


def _rel_close(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


def validate(p: PhysicalParams) -> None:
    """Check every invariant of the parameter set; raise on violation.

    Raises NonPositiveQuantity, GammaNotGreaterThanOne or DegenerateDiffusion.
    Emits a warning when (1+beta)*nu0 is within 1e-6 of gamma*D_th: the
    large-frequency matrices then carry large but finite entries.
    """
    for name in ("c0", "nu0", "D_th", "alpha_p"):
        value = getattr(p, name)
        if not value > 0.0:
            raise NonPositiveQuantity(name, value)
    for name in ("rho0", "kappa_T", "cP", "cV", "eta_s", "eta_b"):
        value = getattr(p, name)
        if value is not None and not value > 0.0:
            raise NonPositiveQuantity(name, value)
    if p.n < 1 or p.n != int(p.n):
        raise NonPositiveQuantity("n", p.n)
    if not p.gamma > 1.0:
        raise GammaNotGreaterThanOne(p.gamma)
    if not p.beta > 1.0 / 3.0:
        raise NonPositiveQuantity("beta - 1/3", p.beta - 1.0 / 3.0)

    if p.rho0 is not None and p.kappa_T is not None:
        c0_primitive = 1.0 / math.sqrt(p.rho0 * p.kappa_T)
        if not _rel_close(p.c0, c0_primitive, EQUALITY_RTOL):
            raise ParameterError(
                f"c0 = {p.c0!r} inconsistent with 1/sqrt(rho0*kappa_T) = {c0_primitive!r}"
            )
    if p.cP is not None and p.cV is not None:
        gamma_primitive = p.cP / p.cV
        if not gamma_primitive > 1.0:
            raise GammaNotGreaterThanOne(gamma_primitive)
        if not _rel_close(p.gamma, gamma_primitive, EQUALITY_RTOL):
            raise ParameterError(
                f"gamma = {p.gamma!r} inconsistent with cP/cV = {gamma_primitive!r}"
            )
    if p.eta_s is not None and p.eta_b is not None:
        beta_primitive = p.eta_b / p.eta_s + 1.0 / 3.0
        if not _rel_close(p.beta, beta_primitive, EQUALITY_RTOL):
            raise ParameterError(
                f"beta = {p.beta!r} inconsistent with eta_b/eta_s + 1/3 = {beta_primitive!r}"
            )

    lhs = p.one_plus_beta_nu0
    rhs = p.gamma_Dth
    if _rel_close(lhs, rhs, EQUALITY_RTOL):
        raise DegenerateDiffusion(lhs, rhs)
    if abs(lhs - rhs) < NEAR_DEGENERATE_WARN:
        warnings.warn(
            f"(1+beta)*nu0 - gamma*D_th = {lhs - rhs:.3e} is nearly degenerate; "
            "large-frequency transform matrices will carry large entries",
            stacklevel=2,
        )


@dataclass(frozen=True)
class DerivedConstants:
    """The two derived constants driving every asymptotic profile.

    Gamma0 is the diffusive width of the wave-part profile, Gamma1 the
    third-order dispersive correction of the conjugate roots.
    """

    Gamma0: float
    Gamma1: float


def derive_constants(p: PhysicalParams) -> DerivedConstants:
    """Compute (Gamma0, Gamma1) from the parameter set.

    Gamma0 = [(1+beta)*nu0 + (gamma-1)*D_th] / 2 > 0
    Gamma1 = [-Gamma0^2 - 2*D_th*Gamma0 + (1+beta)*nu0*gamma*D_th] / (2*sqrt(gamma)*c0)

    Accepts nu0 = 0 for the inviscid limit model, in which case
    Gamma0 = (gamma-1)*D_th/2.
    """
    bnu = p.one_plus_beta_nu0
    gamma0 = 0.5 * (bnu + (p.gamma - 1.0) * p.D_th)
    gamma1 = (-gamma0**2 - 2.0 * p.D_th * gamma0 + bnu * p.gamma * p.D_th) / (
        2.0 * p.sqrt_gamma_c0
    )
    return DerivedConstants(Gamma0=gamma0, Gamma1=gamma1)
