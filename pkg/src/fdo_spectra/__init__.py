"""Spectral laboratory for the functional difference operator ``cosh(D) + W``."""

from .coherent import GaussianParam, TestFunction, abs_moment, kinetic_multiplier, transform
from .errors import (
    BoundViolation,
    CertificateError,
    FDOError,
    NonIntegrableError,
    NumericalError,
    PotentialDomainError,
    PotentialRangeError,
    QuadratureError,
    ResolutionError,
    TruncationError,
)
from .estimator import FunctionalDifferenceOperator
from .phasespace import LeadingTerm, PhaseSpaceQuery, cosh_integral, leading_term, quadrant_integral
from .potential import (
    PotentialSpec,
    affine_certificate,
    binomial_majorant,
    dilation_certificate,
    heat_smooth,
)
from .schedule import ScaleSchedule, make_schedule, sandwich_report
from .spectral import Grid, SpectrumResult, assemble, build_grid, count_below, eigenvalues, riesz_mean

__version__ = "0.1.0"
