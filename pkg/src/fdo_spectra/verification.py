"""Identity and residual checks, reported as ``(check_name, value, threshold, pass)`` rows."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coherent import GaussianParam, TestFunction, kinetic_residual, marginal_residuals
from .phasespace import (
    PhaseSpaceQuery,
    ibp_residual_exp,
    ibp_residual_power,
    quadrant_integral,
    quadrant_integral_2d,
)
from .potential import PotentialSpec
from .schedule import karamata_check

IDENTITY_TOL = 1e-8
IBP_TOL = 1e-9
KARAMATA_TOL = 1e-12
REDUCTION_TOL = 1e-6

WINDOW_PARAMS = (0.5, 1.0, 4.0)
IBP_POWER_GRID = ((100.0, 1.0, 2.0), (10.0, 5.0, 1.0), (10.0, 9.99, 1.0))
IBP_EXP_GRID = ((1e3, 1.0, 10.0, 1.0), (1e3, 1.0, 10.0, 0.5), (1e4, 10.0, math.e ** 2, 2.0))
REDUCTION_SPECS = ((1.0, 0.0), (2.0, 0.0), (0.0, 1.0), (1.0, 1.0))
REDUCTION_LAMBDAS = (10.0, 100.0, 1000.0)
REDUCTION_CS = (0.5, 1.0, 5.0)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.value < self.threshold)

    def row(self):
        return (self.name, float(self.value), float(self.threshold), self.passed)


def coherent_checks():
    out = []
    w = PotentialSpec(2.0)
    for a in WINDOW_PARAMS:
        g = GaussianParam(a)
        for psi in (TestFunction.gaussian(a=1.0), TestFunction.hermite(1)):
            r_k, r_y, r_w = marginal_residuals(psi, g, w)
            for label, val in (("k", r_k), ("y", r_y), ("W", r_w)):
                out.append(Check(f"marginal_{label}[{psi.tag};a={a:g}]", val, IDENTITY_TOL))
        out.append(Check(f"kinetic_residual[a={a:g}]", kinetic_residual(g), IDENTITY_TOL))
    return out


def ibp_checks():
    out = [Check(f"ibp_power[lam={l:g};C={c:g};p={p:g}]", ibp_residual_power(l, c, p), IBP_TOL)
           for l, c, p in IBP_POWER_GRID]
    out += [Check(f"ibp_exp[lam={l:g};C={c:g};L={L:.6g};r={r:g}]", ibp_residual_exp(l, c, L, r), IBP_TOL)
            for l, c, L, r in IBP_EXP_GRID]
    return out


def reduction_checks():
    """Reduced energy form against the direct ``(k, y)`` quadrature on the 36-point grid."""
    out = []
    for p, beta in REDUCTION_SPECS:
        spec = PotentialSpec(p, beta)
        for lam in REDUCTION_LAMBDAS:
            for C in REDUCTION_CS:
                q = PhaseSpaceQuery(lam, C, spec)
                reduced, direct = quadrant_integral(q), quadrant_integral_2d(q)
                err = abs(reduced - direct) / abs(direct)
                out.append(Check(f"reduction[p={p:g};beta={beta:g};lam={lam:g};C={C:g}]",
                                 err, REDUCTION_TOL))
    return out


def karamata_checks(spectrum, lambdas):
    out = []
    for lam in lambdas:
        riesz = sum(max(lam - v, 0.0) for v in spectrum.eigenvalues)
        out.append(Check(f"karamata[lam={lam:g}]", karamata_check(spectrum, lam) / (1.0 + riesz),
                         KARAMATA_TOL))
    return out


def run_suite(spectrum=None, lambdas=()):
    """All checks; ``spectrum`` and ``lambdas`` feed the layer-cake rows."""
    checks = coherent_checks() + ibp_checks() + reduction_checks()
    if spectrum is not None:
        checks += karamata_checks(spectrum, lambdas)
    return checks
