"""Semi-analytic spectral laboratory for thermoviscous acoustic coupled systems.

The package solves the coupled velocity-potential / temperature system exactly
per Fourier mode, builds the frequency-zone diagonalization machinery, evaluates
large-time asymptotic profiles, and measures growth/decay/convergence rates with
deterministic phase-space quadrature.
"""

from .params import (
    CANON,
    DegenerateDiffusion,
    DerivedConstants,
    GammaNotGreaterThanOne,
    NonPositiveQuantity,
    ParameterError,
    PhysicalParams,
    derive_constants,
    validate,
)

__all__ = [
    "CANON",
    "DegenerateDiffusion",
    "DerivedConstants",
    "GammaNotGreaterThanOne",
    "NonPositiveQuantity",
    "ParameterError",
    "PhysicalParams",
    "derive_constants",
    "validate",
]

__version__ = "0.1.0"
