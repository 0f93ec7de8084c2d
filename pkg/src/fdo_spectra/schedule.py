"""Energy-dependent scale schedules and the two-sided Riesz-mean bounds.

Power potentials (``beta = 0``) use the affine smoothing certificate,
exponential ones (``beta > 0``) the dilation certificate.  Either way the
bounds reduce to quadrant-folded phase-space integrals at shifted energies
``lambda1, lambda2`` and kinetic prefactors ``C1, C2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BoundViolation, CertificateError, ResolutionError
from .phasespace import LeadingTerm, PhaseSpaceQuery, quadrant_integral
from .potential import PotentialSpec, affine_certificate, dilation_certificate
from .spectral import (
    Grid,
    SpectrumResult,
    assemble,
    eigenvalues,
    layer_cake_integral,
    resolution_check,
    riesz_mean,
)

SANDWICH_SLACK = 0.005
VACUOUS = math.inf


@dataclass(frozen=True)
class ScaleSchedule:
    lam: float
    a: float
    s: float
    C1: float
    C2: float
    lambda1: float
    lambda2: float
    sigma: Optional[float] = None  # power branch
    tau: Optional[float] = None
    epsilon: Optional[float] = None  # exponential branch
    K: Optional[float] = None
    mu: Optional[float] = None

    @property
    def branch(self) -> str:
        return "power" if self.sigma is not None else "exponential"


def make_schedule(spec: PotentialSpec, lam: float, a_override: Optional[float] = None,
                  epsilon_override: Optional[float] = None, *, verify: bool = True) -> ScaleSchedule:
    """Scales for energy ``lam``: ``a = log log lam`` and, for ``beta > 0``,
    ``epsilon = 1 / log log log lam`` unless overridden.

    The exponential branch needs the dilation certificate at ``a`` (lower
    bound) and at ``a mu**2`` (upper bound, via the rescaled potential);
    an invalid certificate raises ``CertificateError``.
    """
    if a_override is None:
        if not lam > math.exp(math.e):
            raise ValueError("a = log log lam needs lam > e**e; pass a_override")
        a = math.log(math.log(lam))
    else:
        a = float(a_override)
    s = a / (16.0 * math.pi ** 2)

    if spec.beta == 0:
        cert = affine_certificate(spec, a, verify=verify)
        sigma, tau = cert.sigma, cert.tau
        # tau is kept as certified instead of being replaced by 1
        return ScaleSchedule(
            lam=lam, a=a, s=s, sigma=sigma, tau=tau,
            lambda1=(1.0 + sigma) * lam + tau, C1=0.5 * (1.0 + sigma) * math.exp(-s),
            lambda2=(lam - tau) / (1.0 + sigma), C2=math.exp(s) / (1.0 + sigma),
        )

    if epsilon_override is None:
        if not lam > math.exp(math.exp(math.e)) * (1 - 1e-15):
            raise ValueError("epsilon = 1/log log log lam needs lam >= e**e**e; "
                             "pass epsilon_override")
        eps = 1.0 / math.log(math.log(math.log(lam)))
    else:
        eps = float(epsilon_override)
    lower_cert = dilation_certificate(spec, a, eps, verify=verify)
    if not lower_cert.valid:
        raise CertificateError(
            f"dilation certificate invalid at a={a:.6g}, epsilon={eps:.6g} "
            f"(residuals {lower_cert.residual_main:.3g}, {lower_cert.residual_tail:.3g}); "
            "raise a_override or lam")
    mu = lower_cert.mu
    upper_cert = dilation_certificate(spec, a * mu * mu, eps, verify=verify)
    if not upper_cert.valid:
        raise CertificateError(f"dilation certificate invalid at a mu^2 = {a * mu * mu:.6g}")
    return ScaleSchedule(
        lam=lam, a=a, s=s, epsilon=eps, K=lower_cert.K, mu=mu,
        lambda1=2.0 * (lam + 1.0), C1=math.exp(-s),
        lambda2=lam / 2.0 - 1.0, C2=0.5 * math.exp(s),
    )


def upper_bound(spec: PotentialSpec, sched: ScaleSchedule) -> float:
    """Upper Riesz-mean bound; ``inf`` when ``C1 >= lambda1`` (vacuous)."""
    if not sched.C1 < sched.lambda1:
        return VACUOUS
    value = quadrant_integral(PhaseSpaceQuery(sched.lambda1, sched.C1, spec))
    if sched.branch == "power":
        return value / (1.0 + sched.sigma)
    return 0.5 * sched.mu * value


def lower_bound(spec: PotentialSpec, sched: ScaleSchedule) -> float:
    """Lower Riesz-mean bound; 0 when ``C2 >= lambda2``."""
    if not (sched.lambda2 > 0 and sched.C2 < sched.lambda2):
        return 0.0
    value = quadrant_integral(PhaseSpaceQuery(sched.lambda2, sched.C2, spec))
    if sched.branch == "power":
        return (1.0 + sched.sigma) * value
    return 2.0 / sched.mu * value


@dataclass(frozen=True)
class BoundReport:
    lam: float
    lower: float
    upper: float
    riesz: float
    leading: float

    @property
    def ratios(self):
        """``(riesz, lower, upper)`` over the leading term."""
        return (self.riesz / self.leading, self.lower / self.leading, self.upper / self.leading)

    def holds(self, slack: float = SANDWICH_SLACK) -> bool:
        pad = slack * self.riesz
        return self.lower - pad <= self.riesz <= self.upper + pad


def sandwich_report(spec: PotentialSpec, lambdas: Sequence[float], grid: Grid, *,
                    a_override=None, epsilon_override=None, margin: float = 2.0,
                    spectrum: Optional[SpectrumResult] = None,
                    slack: float = SANDWICH_SLACK) -> list:
    """Lower bound, computed Riesz mean and upper bound for each ``lam``.

    Raises ``ResolutionError`` if the grid does not resolve ``max(lambdas)``
    and ``BoundViolation`` if any report breaks its invariants.
    """
    lambdas = [float(v) for v in lambdas]
    diag = resolution_check(grid, spec, max(lambdas), margin)
    if not diag.ok:
        raise ResolutionError("grid does not resolve the requested energies", diag.as_dict())
    if spectrum is None:
        spectrum = eigenvalues(assemble(grid, spec))
    reports = []
    for lam in lambdas:
        sched = make_schedule(spec, lam, a_override, epsilon_override)
        lo, up = lower_bound(spec, sched), upper_bound(spec, sched)
        lead = LeadingTerm.riesz(spec)(lam) if lam > math.e else math.nan
        rep = BoundReport(lam=lam, lower=lo, upper=up, riesz=riesz_mean(spectrum, lam), leading=lead)
        if not lo <= up:
            raise BoundViolation(f"lower bound {lo} exceeds upper bound {up} at lam = {lam}")
        if not rep.holds(slack):
            raise BoundViolation(f"sandwich fails at lam = {lam}: {lo} <= {rep.riesz} <= {up}")
        reports.append(rep)
    return reports


def karamata_check(spectrum: SpectrumResult, lam: float) -> float:
    """``|sum_j (lam - lambda_j)_+ - int_0^lam N(t) dt|`` from two independent formulas."""
    direct = float(np.sum(np.maximum(lam - spectrum.eigenvalues, 0.0)))
    return abs(direct - layer_cake_integral(spectrum, lam))


@dataclass(frozen=True)
class RatioSeries:
    lambdas: np.ndarray
    measured: np.ndarray
    predicted: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        return self.measured / self.predicted

    @property
    def deltas(self) -> np.ndarray:
        return np.diff(self.ratios)

    @property
    def monotone_toward_one(self) -> bool:
        """Distance to 1 never grows along the sweep (ratios exactly 1 count as converged)."""
        dist = np.abs(self.ratios - 1.0)
        return bool(np.all(np.diff(dist) <= 1e-12))

    def rows(self):
        r = self.ratios
        d = np.concatenate([[np.nan], self.deltas])
        return [(float(a), float(m), float(p), float(x), float(y))
                for a, m, p, x, y in zip(self.lambdas, self.measured, self.predicted, r, d)]


def ratio_series(values, predictor: LeadingTerm) -> RatioSeries:
    """Measured values ``[(lam, value), ...]`` against a leading-term predictor."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ValueError("need at least three (lam, value) pairs")
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise ValueError("lam values must be strictly increasing")
    return RatioSeries(arr[:, 0], arr[:, 1], predictor(arr[:, 0]))
