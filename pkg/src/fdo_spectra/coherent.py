"""Gaussian coherent states and the phase-space identities they satisfy.

Conventions: the Fourier transform is ``psi_hat(xi) = int exp(-2 pi i x xi) psi(x) dx``
and the window is ``g_a(y) = (a/pi)**(1/4) * exp(-a y**2 / 2)``, so ``g_a**2`` is
a centred normal density of variance ``1/(2a)`` and ``|g_a_hat|**2`` one of
variance ``a/(8 pi**2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc, eval_hermite, gammaln

from .errors import TruncationError
from .quadrature import quad_batch

TWO_PI = 2.0 * math.pi
EDGE_DECAY = 1e-12
WINDOW_MASS_TOL = 1e-8


@dataclass(frozen=True)
class GaussianParam:
    """Gaussian window parameter ``a`` with its two heat times.

    Convolution with ``g_a**2`` is heat flow for time ``t = 1/(4a)`` in position;
    convolution with ``|g_a_hat|**2`` is heat flow for ``s = a/(16 pi**2)`` in
    frequency.
    """

    a: float

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"a must be positive and finite, got {self.a!r}")

    @property
    def t(self) -> float:
        return 1.0 / (4.0 * self.a)

    @property
    def s(self) -> float:
        return self.a / (16.0 * math.pi ** 2)

    @property
    def position_variance(self) -> float:
        return 1.0 / (2.0 * self.a)

    @property
    def frequency_variance(self) -> float:
        return self.a / (8.0 * math.pi ** 2)

    def __call__(self, y):
        return gaussian_eval(self, y)

    def squared(self, y):
        """``g_a(y)**2``, the normal density of variance ``1/(2a)``."""
        y = np.asarray(y, dtype=float)
        return math.sqrt(self.a / math.pi) * np.exp(-self.a * y * y)

    def hat(self, xi):
        """Closed-form Fourier transform of the window."""
        xi = np.asarray(xi, dtype=float)
        return (4.0 * math.pi / self.a) ** 0.25 * np.exp(-2.0 * math.pi ** 2 * xi * xi / self.a)

    def hat_squared(self, xi):
        xi = np.asarray(xi, dtype=float)
        return math.sqrt(4.0 * math.pi / self.a) * np.exp(-4.0 * math.pi ** 2 * xi * xi / self.a)


def gaussian_eval(g: GaussianParam, y):
    """``(a/pi)**(1/4) * exp(-a y**2 / 2)``."""
    y = np.asarray(y, dtype=float)
    out = (g.a / math.pi) ** 0.25 * np.exp(-0.5 * g.a * y * y)
    return float(out) if out.ndim == 0 else out


def abs_moment(g: GaussianParam, gamma: float) -> float:
    """Central absolute moment ``int |y|**gamma g_a(y)**2 dy``.

    Closed form ``Gamma((gamma+1)/2) / (sqrt(pi) a**(gamma/2))``.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    return math.exp(gammaln(0.5 * (gamma + 1.0)) - 0.5 * math.log(math.pi)
                    - 0.5 * gamma * math.log(g.a))


@dataclass(frozen=True)
class TestFunction:
    """A unit-normalized function sampled on a uniform grid.

    ``x`` must be uniformly spaced; ``values`` may be complex.
    """

    __test__ = False  # not a pytest class

    x: np.ndarray
    values: np.ndarray
    tag: str = "custom"
    h: float = field(init=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.ndim != 1 or x.shape != v.shape or x.size < 8:
            raise ValueError("x and values must be 1-D arrays of equal length >= 8")
        h = (x[-1] - x[0]) / (x.size - 1)
        if not np.allclose(np.diff(x), h, rtol=1e-9, atol=0):
            raise ValueError("grid must be uniform")
        norm = float(np.sum(np.abs(v) ** 2) * h)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"test function not normalized: ||psi||^2 = {norm!r}")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "h", float(h))

    @classmethod
    def gaussian(cls, a=1.0, center=0.0, extent=12.0, n=481):
        """The window ``g_a`` itself, translated to ``center``."""
        x = np.linspace(-extent, extent, n)
        v = GaussianParam(a)(x - center)
        return cls(x, v / _discrete_norm(v, x), tag="gaussian")

    @classmethod
    def hermite(cls, k=1, extent=12.0, n=481):
        """Hermite function ``h_k`` (``h_0`` is the standard Gaussian)."""
        x = np.linspace(-extent, extent, n)
        log_norm = 0.5 * (k * math.log(2.0) + gammaln(k + 1.0) + 0.5 * math.log(math.pi))
        v = eval_hermite(k, x) * np.exp(-0.5 * x * x - log_norm)
        return cls(x, v / _discrete_norm(v, x), tag=f"hermite_{k}")

    @classmethod
    def custom(cls, x, values):
        x = np.asarray(x, dtype=float)
        v = np.asarray(values, dtype=complex)
        return cls(x, v / _discrete_norm(v, x), tag="custom")

    @property
    def density(self):
        return np.abs(self.values) ** 2


def _discrete_norm(v, x):
    h = (x[-1] - x[0]) / (len(x) - 1)
    return math.sqrt(float(np.sum(np.abs(v) ** 2) * h))


def _check_window(psi: TestFunction, g: GaussianParam, y):
    y = np.asarray(y, dtype=float)
    lo, hi = psi.x[0], psi.x[-1]
    root_a = math.sqrt(g.a)
    off = 0.5 * erfc((y - lo) * root_a) + 0.5 * erfc((hi - y) * root_a)
    if np.any(off > WINDOW_MASS_TOL):
        worst = float(np.max(off))
        raise TruncationError(f"window mass {worst:.2e} lies off the grid [{lo}, {hi}]")


def transform(psi: TestFunction, g: GaussianParam, k, y):
    """Coherent state transform ``int exp(-2 pi i k x) g_a(x - y) psi(x) dx``.

    ``k`` and ``y`` broadcast against each other.  The integral is the
    trapezoid sum on the test function's grid, which is spectrally accurate
    for the smooth, decaying integrands used here.
    """
    k, y = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(y, dtype=float))
    _check_window(psi, g, y)
    kf, yf = k.ravel(), y.ravel()
    out = np.empty(kf.shape, dtype=complex)
    chunk = max(1, 2_000_000 // psi.x.size)
    for s in range(0, kf.size, chunk):
        kk, yy = kf[s:s + chunk, None], yf[s:s + chunk, None]
        integrand = np.exp(-1j * TWO_PI * kk * psi.x) * g(psi.x - yy) * psi.values
        out[s:s + chunk] = integrand.sum(axis=1) * psi.h
    out = out.reshape(k.shape)
    return complex(out) if out.ndim == 0 else out


def transform_table(psi: TestFunction, g: GaussianParam, k, y):
    """``transform`` on the tensor grid ``y x k``; returns shape ``(len(y), len(k))``.

    No window check: callers guarantee ``psi`` itself decays at the grid edges,
    which bounds the truncated part of every product ``g_a(x - y) psi(x)``.
    """
    k = np.asarray(k, dtype=float)
    y = np.asarray(y, dtype=float)
    windowed = g(psi.x[None, :] - y[:, None]) * psi.values[None, :]
    phases = np.exp(-1j * TWO_PI * np.outer(psi.x, k)) * psi.h
    return windowed @ phases


def _trapezoid(values, step, axis=-1):
    # grids decay to below EDGE_DECAY at both ends, so end corrections are negligible
    return np.sum(values, axis=axis) * step


def marginal_residuals(psi: TestFunction, g: GaussianParam, potential, scale=1.0):
    """Residuals of the three phase-space marginal identities.

    Returns ``(r_k, r_y, r_W)``:

    * ``r_k`` -- max over ``y`` of ``|int |psi~|^2 dk - (|psi|^2 * g_a^2)(y)|``,
    * ``r_y`` -- max over ``k`` of ``|int |psi~|^2 dy - (|psi_hat|^2 * |g_a_hat|^2)(k)|``,
    * ``r_W`` -- ``|int int W(y)|psi~|^2 dk dy - int (W * g_a^2)|psi|^2 dx|``.

    ``scale`` multiplies the potential (``scale=0`` is the ``W = 0`` limit).
    Position, ``y`` and frequency grids are shared across both sides.
    """
    from .potential import heat_smooth

    x, h = psi.x, psi.h
    if np.abs(psi.values[[0, -1]]).max() > EDGE_DECAY:
        raise TruncationError("test function does not decay below 1e-12 at the grid edges")
    n = x.size
    # one full period of the sampled transform in k; discrete Parseval is then exact
    dk = 1.0 / (n * h)
    k = (np.arange(n) - n // 2) * dk
    y = x

    table = transform_table(psi, g, k, y)
    power = np.abs(table) ** 2

    lhs_k = _trapezoid(power, dk, axis=1)
    rhs_k = (g.squared(y[:, None] - x[None, :]) * psi.density[None, :]).sum(axis=1) * h
    r_k = float(np.max(np.abs(lhs_k - rhs_k)))

    lhs_y = _trapezoid(power, h, axis=0)
    psi_hat = (np.exp(-1j * TWO_PI * np.outer(k, x)) @ psi.values) * h
    rhs_y = (g.hat_squared(k[:, None] - k[None, :]) * np.abs(psi_hat)[None, :] ** 2).sum(axis=1) * dk
    r_y = float(np.max(np.abs(lhs_y - rhs_y)))

    if scale == 0:
        return r_k, r_y, 0.0
    w_y = scale * np.asarray(potential(y), dtype=float)
    lhs_w = float(np.sum(w_y[:, None] * power) * dk * h)
    smoothed = scale * np.asarray(heat_smooth(potential, g.a, x), dtype=float)
    rhs_w = float(np.sum(smoothed * psi.density) * h)
    return r_k, r_y, abs(lhs_w - rhs_w)


def kinetic_multiplier(g: GaussianParam) -> float:
    """Prefactor ``exp(-s)`` of the coherent-state symbol ``T(k) = exp(-s) cosh(k)``."""
    return math.exp(-g.s)


def kinetic_residual(g: GaussianParam, k_range=(-5.0, 5.0), n=201) -> float:
    """Max relative error of ``(T * |g_a_hat|^2)(k) = cosh(k)`` on a ``k`` grid.

    The convolution is evaluated by adaptive quadrature, independently of the
    closed form used to derive ``T``.
    """
    k = np.linspace(k_range[0], k_range[1], n)
    pref = kinetic_multiplier(g)
    half = 14.0 * math.sqrt(g.frequency_variance)

    def integrand(xi, owner):
        return pref * np.cosh(k[owner][:, None] - xi) * g.hat_squared(xi)

    conv = quad_batch(integrand, np.full(n, -half), np.full(n, half),
                      abstol=0.0, reltol=1e-13)
    return float(np.max(np.abs(conv - np.cosh(k)) / np.cosh(k)))
