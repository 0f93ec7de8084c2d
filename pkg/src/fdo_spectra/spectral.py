"""Periodic discretization of ``H = F^-1 cosh(xi) F + W`` and its spectrum.

The kinetic part is the circulant matrix that the discrete Fourier basis
diagonalizes with eigenvalues ``cosh(xi_m)``, so the only discretization
errors are truncation of ``W`` to ``[-L, L)`` and aliasing at the Nyquist
frequency.  ``resolution_check`` measures both against an energy window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import NumericalError, PotentialRangeError, ResolutionError
from .potential import PotentialSpec, evaluate

COUNT_TOL = 1e-12  # relative to ||A||: eigenvalues this close to lambda count as <= lambda


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid of ``N`` nodes on ``[-L, L)``."""

    L: float
    N: int

    def __post_init__(self):
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"L must be positive, got {self.L!r}")
        if int(self.N) != self.N or self.N < 8 or self.N % 2:
            raise ValueError(f"N must be an even integer >= 8, got {self.N!r}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @property
    def xi(self) -> np.ndarray:
        """Frequencies ``m / (N h)`` for ``m = -N/2 .. N/2 - 1``."""
        return np.arange(-self.N // 2, self.N // 2) / (self.N * self.h)

    @property
    def xi_max(self) -> float:
        return 1.0 / (2.0 * self.h)


def build_grid(L: float, N: int) -> Grid:
    return Grid(L, N)


@dataclass(frozen=True)
class SymOperator:
    """Dense real symmetric discretization of ``H``; ``matrix`` is read-only."""

    matrix: np.ndarray
    grid: Grid
    spec: Optional[PotentialSpec]
    norm: float = field(init=False)

    def __post_init__(self):
        self.matrix.setflags(write=False)
        object.__setattr__(self, "norm", float(np.max(np.sum(np.abs(self.matrix), axis=1))))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def kinetic_column(grid: Grid) -> np.ndarray:
    """First column ``c_j = (1/N) sum_m cosh(xi_m) cos(2 pi m j / N)`` of the kinetic circulant."""
    with np.errstate(over="ignore"):
        symbol = np.cosh(np.fft.fftfreq(grid.N, d=grid.h))
    if not np.all(np.isfinite(symbol)):
        raise ResolutionError(f"cosh(xi_max) overflows for h = {grid.h}; grid too fine",
                              {"xi_max": grid.xi_max})
    return np.fft.ifft(symbol).real


def assemble(grid: Grid, spec: Optional[PotentialSpec]) -> SymOperator:
    """``A = C + diag(W(x_j))``; ``spec=None`` assembles the free operator (``W = 0``)."""
    c = kinetic_column(grid)
    idx = np.arange(grid.N)
    A = c[(idx[:, None] - idx[None, :]) % grid.N]
    A = 0.5 * (A + A.T)
    if spec is not None:
        A[idx, idx] += evaluate(spec, grid.x)
    return SymOperator(A, grid, spec)


@dataclass(frozen=True)
class ResolutionDiagnostics:
    lambda_max: float
    margin: float
    frequency_ok: bool
    domain_ok: bool
    frequency_headroom: float  # cosh(xi_max) / (margin * lambda_max)
    domain_headroom: float  # W(L) / (margin * lambda_max)

    @property
    def ok(self) -> bool:
        return self.frequency_ok and self.domain_ok

    def as_dict(self):
        return {
            "lambda_max": self.lambda_max, "margin": self.margin,
            "frequency_ok": self.frequency_ok, "domain_ok": self.domain_ok,
            "frequency_headroom": self.frequency_headroom,
            "domain_headroom": self.domain_headroom,
        }


def resolution_check(grid: Grid, spec: PotentialSpec, lambda_max: float,
                     margin: float = 2.0) -> ResolutionDiagnostics:
    """Does the grid resolve energies up to ``lambda_max`` with factor ``margin`` headroom?"""
    if margin < 2:
        raise ValueError(f"margin must be >= 2, got {margin!r}")
    target = margin * lambda_max
    with np.errstate(over="ignore"):
        top = float(np.cosh(grid.xi_max))
    try:
        wall = evaluate(spec, grid.L)
    except PotentialRangeError:
        wall = math.inf
    return ResolutionDiagnostics(
        lambda_max=float(lambda_max), margin=float(margin),
        frequency_ok=bool(top >= target), domain_ok=bool(wall >= target),
        frequency_headroom=top / target, domain_headroom=wall / target,
    )


@dataclass(frozen=True)
class SpectrumResult:
    """Sorted eigenvalues plus diagnostics.

    ``backward_errors`` holds ``||A v - lam v|| / ||A||`` for a few randomly
    chosen eigenpairs, ``resolution`` the window check (if one was requested).
    """

    eigenvalues: np.ndarray
    grid: Optional[Grid] = None
    spec: Optional[PotentialSpec] = None
    backward_errors: np.ndarray = field(default_factory=lambda: np.empty(0))
    resolution: Optional[ResolutionDiagnostics] = None

    def __post_init__(self):
        ev = np.array(self.eigenvalues, dtype=float)
        if np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be sorted")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @classmethod
    def from_values(cls, values):
        return cls(np.sort(np.asarray(values, dtype=float)))

    def __len__(self):
        return self.eigenvalues.size


def eigenvalues(op: SymOperator, *, check_pairs: int = 10, seed: int = 0,
                lambda_max: Optional[float] = None, margin: float = 2.0,
                tol: float = 1e-10) -> SpectrumResult:
    """Full spectrum by Householder tridiagonalization and implicit QL.

    ``check_pairs`` eigenpairs (chosen with ``seed``) are re-derived by inverse
    iteration and must have backward error below ``tol``; otherwise
    ``NumericalError`` is raised.
    """
    A = op.matrix
    d, e, V = linalg.tridiagonalize(A)
    ev = linalg.tridiagonal_eigenvalues(d, e)
    n = ev.size
    if check_pairs and n:
        picks = np.random.default_rng(seed).choice(n, size=min(check_pairs, n), replace=False)
        berr = linalg.eigen_backward_errors(A, d, e, V, ev, np.sort(picks))
        if np.any(berr > tol):
            raise NumericalError(f"eigenpair backward error {berr.max():.2e} exceeds {tol:.0e}")
    else:
        berr = np.empty(0)
    res = None
    if lambda_max is not None and op.spec is not None:
        res = resolution_check(op.grid, op.spec, lambda_max, margin)
    return SpectrumResult(ev, op.grid, op.spec, berr, res)


def count_below(op: SymOperator, lam: float) -> int:
    """``#{lambda_j <= lam}`` from the inertia of ``A - lam I``.

    The shift is nudged up by ``1e-12 ||A||`` so that eigenvalues at ``lam``
    are counted.  Falls back to the full spectrum if the factorization breaks
    down.
    """
    shift = lam + COUNT_TOL * op.norm
    neg = linalg.negative_count(op.matrix, shift)
    if neg is None:
        return int(np.sum(eigenvalues(op, check_pairs=0).eigenvalues < shift))
    return neg


def _checked(spectrum: SpectrumResult, lam: float):
    res = spectrum.resolution
    if res is not None and (not res.ok or lam > res.lambda_max):
        raise ResolutionError(f"lambda = {lam} is not resolved by the grid", res.as_dict())


def counting_function(spectrum: SpectrumResult, lam) -> np.ndarray:
    """``N(lam)`` (closed counting) from sorted eigenvalues; vectorized in ``lam``."""
    lam = np.asarray(lam, dtype=float)
    _checked(spectrum, float(np.max(lam)))
    out = np.searchsorted(spectrum.eigenvalues, lam, side="right")
    return int(out) if out.ndim == 0 else out


def riesz_mean(spectrum: SpectrumResult, lam: float) -> float:
    """``sum_j (lam - lambda_j)_+``."""
    _checked(spectrum, lam)
    return float(np.sum(np.maximum(lam - spectrum.eigenvalues, 0.0)))


def layer_cake_integral(spectrum: SpectrumResult, lam: float) -> float:
    """``int_0^lam N(t) dt`` integrated exactly over the step function ``N``.

    Equals the Riesz mean when the spectrum is nonnegative.
    """
    if lam <= 0:
        return 0.0
    ev = spectrum.eigenvalues
    knots = np.clip(ev[ev <= lam], 0.0, None)
    widths = np.diff(np.append(knots, lam))
    return float(np.dot(np.arange(1, knots.size + 1), widths))
