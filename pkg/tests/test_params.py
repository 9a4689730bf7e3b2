import math

import pytest

from tvacoustics.params import (
    CANON,
    DegenerateDiffusion,
    GammaNotGreaterThanOne,
    NonPositiveQuantity,
    ParameterError,
    PhysicalParams,
    derive_constants,
    validate,
)


def test_canon_validates(canon):
    validate(canon)
    assert canon.one_plus_beta_nu0 == pytest.approx(0.2)
    assert canon.gamma_Dth == pytest.approx(0.14)


def test_degenerate_diffusion_rejected():
    # (1+beta) nu0 = 0.14 = gamma D_th
    p = PhysicalParams(c0=1.0, gamma=1.4, beta=1.0, nu0=0.07, D_th=0.1, alpha_p=1.0)
    with pytest.raises(DegenerateDiffusion):
        validate(p)


def test_near_degenerate_warns():
    p = PhysicalParams(c0=1.0, gamma=1.4, beta=1.0, nu0=0.07 + 1e-8, D_th=0.1, alpha_p=1.0)
    with pytest.warns(UserWarning):
        validate(p)


def test_gamma_not_greater_than_one():
    p = PhysicalParams(c0=1.0, gamma=0.5, beta=1.0, nu0=0.1, D_th=0.1, alpha_p=1.0, cP=1.0, cV=2.0)
    with pytest.raises(GammaNotGreaterThanOne):
        validate(p)


@pytest.mark.parametrize("field,value", [("nu0", -0.1), ("D_th", 0.0), ("alpha_p", -1.0), ("c0", 0.0)])
def test_positivity(field, value):
    kwargs = dict(c0=1.0, gamma=1.4, beta=1.0, nu0=0.1, D_th=0.1, alpha_p=1.0)
    kwargs[field] = value
    with pytest.raises(NonPositiveQuantity):
        validate(PhysicalParams(**kwargs))


def test_primitive_consistency_checked():
    p = PhysicalParams(
        c0=1.0, gamma=1.4, beta=1.0, nu0=0.1, D_th=0.1, alpha_p=1.0, rho0=2.0, kappa_T=0.5
    )
    validate(p)  # 1/sqrt(2 * 0.5) = 1
    bad = PhysicalParams(
        c0=1.0, gamma=1.4, beta=1.0, nu0=0.1, D_th=0.1, alpha_p=1.0, rho0=2.0, kappa_T=1.0
    )
    with pytest.raises(ParameterError):
        validate(bad)


def test_derived_constants_canon(canon):
    dc = derive_constants(canon)
    # (0.2 + 0.4*0.1)/2 and (-0.0144 - 0.024 + 0.028)/(2 sqrt(1.4))
    assert dc.Gamma0 == pytest.approx(0.12, rel=1e-14)
    assert dc.Gamma1 == pytest.approx(-4.3948e-3, rel=1e-4)
    assert dc.Gamma1 == pytest.approx((-0.0144 - 0.024 + 0.028) / (2 * math.sqrt(1.4)), rel=1e-12)


def test_derived_constants_inviscid_limit(canon):
    dc = derive_constants(canon.with_nu0(0.0))
    assert dc.Gamma0 == pytest.approx((canon.gamma - 1.0) * canon.D_th / 2.0, rel=1e-14)


def test_gamma0_scaling(canon):
    # doubling both nu0 and D_th doubles Gamma0 exactly
    doubled = PhysicalParams(
        c0=canon.c0,
        gamma=canon.gamma,
        beta=canon.beta,
        nu0=2 * canon.nu0,
        D_th=2 * canon.D_th,
        alpha_p=canon.alpha_p,
    )
    assert derive_constants(doubled).Gamma0 == pytest.approx(
        2.0 * derive_constants(canon).Gamma0, rel=1e-15
    )


def test_gamma0_dominates_summands(canon):
    dc = derive_constants(canon)
    assert dc.Gamma0 > canon.one_plus_beta_nu0 / 2.0
    assert dc.Gamma0 > (canon.gamma - 1.0) * canon.D_th / 2.0
