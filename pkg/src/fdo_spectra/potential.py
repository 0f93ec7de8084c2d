"""The potential family ``W(x) = |x|**p * exp(|x|**beta)`` and its error certificates.

``beta = 0`` denotes the pure power ``|x|**p`` (no exponential factor), matching
the two regimes of the Riesz-mean asymptotics.  Besides evaluation and
inversion, this module computes the Gaussian heat smoothing ``W * g_a**2``
and two kinds of certified upper estimates for it:

* an *affine* certificate ``W * g_a**2 <= (1 + sigma) W + tau`` for powers,
* a *dilation* certificate ``W * g_a**2 <= 2 (W(mu x) + 1)`` for ``beta > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from math import comb, factorial

import numpy as np

from .coherent import GaussianParam, abs_moment
from .errors import (
    CertificateError,
    NonIntegrableError,
    PotentialDomainError,
    PotentialRangeError,
)
from .quadrature import quad_batch

# log-density drop treated as negligible when sizing integration windows
_LOG_CUTOFF = 80.0
_CERT_SLACK = 1e-9

LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class PotentialSpec:
    """Exponents of ``W(x) = |x|**p * exp(|x|**beta)``."""

    p: float
    beta: float = 0.0

    def __post_init__(self):
        p, beta = float(self.p), float(self.beta)
        if not (math.isfinite(p) and math.isfinite(beta)):
            raise ValueError("p and beta must be finite")
        if p < 0:
            raise ValueError(f"p must be >= 0, got {p}")
        if not 0 <= beta <= 2:
            raise ValueError(f"beta must lie in [0, 2], got {beta}")
        if p == 0 and beta == 0:
            raise ValueError("p = beta = 0 gives a constant potential")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "beta", beta)

    @property
    def W0(self) -> float:
        """``W(0)``: 1 for the pure exponential ``p = 0``, else 0."""
        return 1.0 if self.p == 0 else 0.0

    @property
    def is_power(self) -> bool:
        return self.beta == 0

    def __call__(self, x):
        return evaluate(self, x)

    def log(self, t):
        """``log W(t)`` for ``t >= 0`` (``-inf`` at a zero of W)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        with np.errstate(divide="ignore"):
            if self.p > 0:
                out = out + self.p * np.log(t)
        if self.beta > 0:
            out = out + t ** self.beta
        return out


def _scalar_or_array(out):
    return float(out) if np.ndim(out) == 0 else out


def evaluate(spec: PotentialSpec, x):
    """``W(x)``; raises ``PotentialRangeError`` when the value overflows."""
    ax = np.abs(np.asarray(x, dtype=float))
    with np.errstate(over="ignore"):
        out = ax ** spec.p if spec.p > 0 else np.ones_like(ax)
        if spec.beta > 0:
            out = out * np.exp(ax ** spec.beta)
    if not np.all(np.isfinite(out)):
        bad = ax[~np.isfinite(out)] if ax.ndim else ax
        raise PotentialRangeError(float(np.min(bad)))
    return _scalar_or_array(out)


def derivative(spec: PotentialSpec, x):
    """``W'(x) = (p x**(p-1) + beta x**(p+beta-1)) exp(x**beta)`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise PotentialDomainError("W' is only evaluated at x > 0")
    p, b = spec.p, spec.beta
    with np.errstate(over="ignore"):
        out = p * x ** (p - 1.0) if p > 0 else np.zeros_like(x)
        if b > 0:
            out = (out + b * x ** (p + b - 1.0)) * np.exp(x ** b)
    if not np.all(np.isfinite(out)):
        raise PotentialRangeError(float(np.min(x[~np.isfinite(out)])) if x.ndim else float(x))
    return _scalar_or_array(out)


def inverse(spec: PotentialSpec, v):
    """The unique ``y >= 0`` with ``W(y) = v``.

    Works on ``z = log y``, where ``p z + exp(beta z) = log v`` has a convex,
    increasing left-hand side.  Newton's method started to the right of the
    root then decreases monotonically onto it, so the starting point and the
    root bracket the whole iteration.
    """
    v = np.asarray(v, dtype=float)
    if np.any(np.isnan(v)) or np.any(v < spec.W0):
        raise PotentialDomainError(f"inverse needs v >= W(0) = {spec.W0}")
    out = np.zeros_like(v)
    pos = v > spec.W0
    if not np.any(pos):
        return _scalar_or_array(out)
    lv = np.log(v[pos])
    p, b = spec.p, spec.beta
    if b == 0:
        out[pos] = np.exp(lv / p)
        return _scalar_or_array(out)

    # phi(z_hi) >= 0 for both candidates whenever they are admissible
    with np.errstate(divide="ignore", invalid="ignore"):
        z_log = np.where(lv > 0, np.log(np.where(lv > 0, lv, 1.0)) / b, np.inf)
    if p > 0:
        z = np.where(z_log >= 0, np.minimum(z_log, lv / p), lv / p)
    else:
        z = z_log
    for _ in range(200):
        ez = np.exp(b * z)
        step = (p * z + ez - lv) / (p + b * ez)
        step = np.maximum(step, 0.0)  # convexity: iterates never cross the root
        z = z - step
        if np.all(step <= 4e-16 * np.maximum(1.0, np.abs(z))):
            break
    out[pos] = np.exp(z)
    return _scalar_or_array(out)


def inverse_asymptotic(spec: PotentialSpec, v):
    """Large-``v`` form of the inverse: ``(log v)**(1/beta)`` or ``v**(1/p)``."""
    v = np.asarray(v, dtype=float)
    if np.any(~(v > max(spec.W0, 1.0))):
        raise PotentialDomainError("inverse_asymptotic needs v > max(W(0), 1)")
    out = np.log(v) ** (1.0 / spec.beta) if spec.beta > 0 else v ** (1.0 / spec.p)
    return _scalar_or_array(out)


# ---------------------------------------------------------------------------
# binomial majorant for |x - y|**p
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MajorantData:
    """Certified ``|x-y|**p <= |x|**p + C (1 + |x|**p) sum_gamma |y|**gamma``.

    ``coefficients`` keeps the per-exponent constants from the multinomial
    expansion; ``constant_C`` is their maximum.
    """

    p: float
    constant_C: float
    gamma_set: tuple
    coefficients: dict = field(compare=False)

    @property
    def gamma_min(self) -> float:
        return self.gamma_set[0]

    def sigma_sum(self, y):
        ay = np.abs(np.asarray(y, dtype=float))
        return sum(ay ** g for g in self.gamma_set)

    def bound(self, x, y):
        ax = np.abs(np.asarray(x, dtype=float))
        xp = ax ** self.p
        return xp + self.constant_C * (1.0 + xp) * self.sigma_sum(y)


def _power_majorant(p: float) -> MajorantData:
    if not p > 0:
        raise PotentialDomainError("the majorant needs p > 0")
    terms: dict[tuple[float, float], float] = {}

    def add(ax, by, c):
        key = (round(ax, 12), round(by, 12))
        terms[key] = terms.get(key, 0.0) + c

    if p < 2:
        # (x^2 + 2|x||y| + y^2)^(p/2) split by subadditivity of t -> t^(p/2)
        add(p, 0.0, 1.0)
        add(p / 2, p / 2, 2.0 ** (p / 2))
        add(0.0, p, 1.0)
    else:
        q = math.floor(p / 2)
        r = p / 2 - q
        # multinomial expansion of (x^2 + 2|x||y| + y^2)^q
        base = []
        for i in range(q + 1):
            for j in range(q - i + 1):
                l_ = q - i - j
                c = factorial(q) // (factorial(i) * factorial(j) * factorial(l_)) * 2 ** j
                base.append((2 * i + j, j + 2 * l_, float(c)))
        if r > 0:
            frac = [(2 * r, 0.0, 1.0), (r, r, 2.0 ** r), (0.0, 2 * r, 1.0)]
        else:
            frac = [(0.0, 0.0, 1.0)]
        for (a1, b1, c1), (a2, b2, c2) in product(base, frac):
            add(a1 + a2, b1 + b2, c1 * c2)

    lead = terms.pop((round(p, 12), 0.0))
    if abs(lead - 1.0) > 1e-12 or any(b == 0 for _, b in terms):
        raise AssertionError("majorant expansion lost its leading term")
    coeffs: dict[float, float] = {}
    for (_, b), c in terms.items():
        coeffs[b] = coeffs.get(b, 0.0) + c
    gammas = tuple(sorted(coeffs))
    return MajorantData(p=p, constant_C=max(coeffs.values()), gamma_set=gammas,
                        coefficients=coeffs)


def binomial_majorant(spec: PotentialSpec, *, verify=True) -> MajorantData:
    """Constant and exponents bounding ``|x-y|**p`` for a pure power potential.

    The construction is exact (binomial/multinomial coefficients plus
    subadditivity of fractional powers); with ``verify`` the inequality is
    re-checked on a 100 x 100 grid over ``[-50, 50]**2``.
    """
    if spec.beta != 0:
        raise PotentialDomainError("binomial_majorant applies to beta = 0 only")
    maj = _power_majorant(spec.p)
    if verify:
        s = np.linspace(-50.0, 50.0, 100)
        x, y = np.meshgrid(s, s)
        lhs = np.abs(x - y) ** spec.p
        if np.any(lhs > maj.bound(x, y) * (1 + 1e-12)):
            raise CertificateError(f"majorant for p={spec.p} fails on the sample grid")
    return maj


# ---------------------------------------------------------------------------
# Gaussian heat smoothing
# ---------------------------------------------------------------------------

def _window_radius(log_upper, probe_log_max, scale):
    """Radius beyond which ``log_upper(r)`` stays below the cutoff.

    ``log_upper`` maps an ``(n, m)`` array of radii to log bounds of the
    integrand, ``probe_log_max`` is an ``(n,)`` reference level.
    """
    r = scale[:, None] * np.geomspace(1e-3, 1e8, 400)[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        bound = log_upper(r)
    above = bound >= (probe_log_max - _LOG_CUTOFF)[:, None]
    last = np.where(above.any(axis=1), 399 - np.argmax(above[:, ::-1], axis=1), 0)
    if np.any(last >= 399):
        raise NonIntegrableError("integrand does not decay within the search range")
    return r[np.arange(r.shape[0]), last + 1]


def heat_smooth(W, a: float, x, *, reltol=1e-11, points=None):
    """Gaussian smoothing ``(W * g_a**2)(x) = int W(x - y) g_a(y)**2 dy``.

    ``W`` is a ``PotentialSpec`` or any vectorized callable.  For a
    ``PotentialSpec`` the integration window is sized from a log-bound on the
    integrand (so it follows the shifted peak in the ``beta = 2`` case) and
    the kink at ``y = x`` is a breakpoint.  Plain callables are integrated on
    ``x +- 12/sqrt(a)`` around the window centre, with optional extra
    breakpoints ``points`` given relative to ``x``.
    """
    if not (a > 0 and math.isfinite(a)):
        raise ValueError(f"a must be positive, got {a!r}")
    x_arr = np.asarray(x, dtype=float).ravel()
    n = x_arr.size
    log_norm = 0.5 * math.log(a / math.pi)

    if isinstance(W, PotentialSpec):
        if W.beta == 2 and a <= 1:
            raise NonIntegrableError("beta = 2 smoothing needs a > 1")
        scale = np.full(n, 1.0 / math.sqrt(2 * a))
        probe = scale[:, None] * np.concatenate([-np.geomspace(1e-2, 1e8, 200), [0.0],
                                                 np.geomspace(1e-2, 1e8, 200)])[None, :]
        with np.errstate(over="ignore", invalid="ignore"):
            lp = W.log(np.abs(x_arr[:, None] - probe)) - a * probe ** 2
        lp = np.where(np.isfinite(lp), lp, -np.inf)
        ref = lp.max(axis=1)
        radius = _window_radius(lambda r: W.log(np.abs(x_arr)[:, None] + r) - a * r * r, ref, scale)

        def integrand(y, owner):
            t = np.abs(x_arr[owner][:, None] - y)
            with np.errstate(divide="ignore", over="ignore"):
                lw = W.p * np.log(t) if W.p > 0 else 0.0
                if W.beta > 0:
                    lw = lw + t ** W.beta
                out = np.exp(lw - a * y * y + log_norm)
            if not np.all(np.isfinite(out)):
                raise PotentialRangeError(float(np.max(np.abs(x_arr[owner]))))
            return out

        kinks = x_arr[:, None]
    else:
        radius = np.full(n, 12.0 / math.sqrt(a))

        def integrand(y, owner):
            return np.asarray(W(x_arr[owner][:, None] - y), dtype=float) * np.exp(-a * y * y + log_norm)

        extra = np.atleast_1d(np.asarray(points if points is not None else [], dtype=float))
        kinks = x_arr[:, None] - extra[None, :] if extra.size else np.empty((n, 0))

    lo, hi = -radius, radius
    edges = np.concatenate([lo[:, None], np.clip(kinks, lo[:, None], hi[:, None]), hi[:, None]], axis=1)
    edges.sort(axis=1)
    a_seg, b_seg = edges[:, :-1].ravel(), edges[:, 1:].ravel()
    owner = np.repeat(np.arange(n), edges.shape[1] - 1)
    val = quad_batch(integrand, a_seg, b_seg, owner, n, abstol=0.0, reltol=reltol)
    if not np.all(np.isfinite(val)):
        raise PotentialRangeError(float(np.max(np.abs(x_arr))))
    return float(val[0]) if np.ndim(x) == 0 else val.reshape(np.shape(x))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineCertificate:
    """``(W * g_a**2)(x) <= (1 + sigma) W(x) + tau`` for all ``x``."""

    sigma: float
    tau: float
    a: float
    spec: PotentialSpec

    def rhs(self, x):
        return (1.0 + self.sigma) * evaluate(self.spec, x) + self.tau

    def holds(self, x, smoothed=None):
        """Pointwise check on samples ``x`` (quadrature slack 1e-9 relative)."""
        lhs = heat_smooth(self.spec, self.a, x) if smoothed is None else smoothed
        return np.asarray(lhs) <= np.asarray(self.rhs(x)) * (1 + _CERT_SLACK)


def affine_certificate(spec: PotentialSpec, a: float, *, verify=True,
                       n_samples=1000, extent=50.0) -> AffineCertificate:
    """Affine smoothing estimate with ``sigma = tau = C * sum_gamma m_gamma(a)``.

    ``m_gamma`` is the Gaussian absolute moment, so both constants decay like
    ``a**(-gamma_min/2)``.
    """
    if spec.beta != 0:
        raise PotentialDomainError("affine_certificate applies to beta = 0 only")
    maj = binomial_majorant(spec, verify=verify)
    g = GaussianParam(a)
    sigma = maj.constant_C * sum(abs_moment(g, gam) for gam in maj.gamma_set)
    cert = AffineCertificate(sigma=sigma, tau=sigma, a=float(a), spec=spec)
    if verify:
        xs = np.linspace(-extent, extent, n_samples)
        ok = cert.holds(xs)
        if not ok.all():
            bad = float(xs[~ok][0])
            raise CertificateError(f"affine certificate fails at x = {bad} (p={spec.p}, a={a})")
    return cert


@dataclass(frozen=True)
class DilationCertificate:
    """``(W * g_a**2)(x) <= 2 (W(mu x) + 1)``, trusted only when ``valid``."""

    epsilon: float
    K: float
    mu: float
    a: float
    residual_main: float
    residual_tail: float
    valid: bool
    spec: PotentialSpec

    def rhs(self, x):
        return 2.0 * (evaluate(self.spec, self.mu * np.asarray(x, dtype=float)) + 1.0)

    def holds(self, x, smoothed=None):
        lhs = heat_smooth(self.spec, self.a, x) if smoothed is None else smoothed
        return np.asarray(lhs) <= np.asarray(self.rhs(x)) * (1 + _CERT_SLACK)


def dilation_constants(beta: float, epsilon: float) -> tuple[float, float]:
    """``K = 2**(beta-2)/epsilon`` (Young's inequality) and ``mu = (1+epsilon)**(1/beta)``."""
    return 2.0 ** (beta - 2.0) / epsilon, (1.0 + epsilon) ** (1.0 / beta)


def dilation_certificate(spec: PotentialSpec, a: float, epsilon: float, *, verify=True,
                         n_samples=1001, extent=10.0) -> DilationCertificate:
    """Dilation estimate for ``beta > 0``.

    The two Gaussian integrals

    * ``int ((1 + 2 C S(y)) exp((1+K)|y|**beta) - 1) g_a**2``,
    * ``int e**2 C S(y) exp((1+K)|y|**beta) g_a**2``,

    with ``(C, S)`` the power majorant, are computed by quadrature.  The
    certificate is ``valid`` when both are below 1, which is enough for the
    pointwise bound; valid certificates are then re-checked on samples.
    """
    if not spec.beta > 0:
        raise PotentialDomainError("dilation_certificate needs beta > 0")
    if not 0 < epsilon <= 1:
        raise PotentialDomainError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    b = spec.beta
    K, mu = dilation_constants(b, epsilon)
    if b == 2 and a <= 1 + K:
        raise NonIntegrableError(f"beta = 2 needs a > 1 + K = {1 + K:.6g}, got a = {a:.6g}")

    if spec.p > 0:
        maj = _power_majorant(spec.p)
        C, gammas = maj.constant_C, maj.gamma_set
    else:
        C, gammas = 0.0, ()
    log_norm = 0.5 * math.log(a / math.pi)
    growth = 1.0 + K

    def S(y):
        return sum(y ** gam for gam in gammas) if gammas else np.zeros_like(y)

    def log_upper(r):
        return growth * r ** b - a * r * r + np.log1p(3.0 * math.e ** 2 * C * S(r))

    probe = np.geomspace(1e-3, 1e4, 400) / math.sqrt(2 * a)
    ref = np.array([np.max(log_upper(probe))])
    radius = float(_window_radius(log_upper, ref, np.array([1.0 / math.sqrt(2 * a)]))[0])

    def main(y, _o):
        g = -a * y * y + log_norm
        up = np.exp(growth * y ** b + g)
        return 2.0 * (up - np.exp(g) + 2.0 * C * S(y) * up)

    def tail(y, _o):
        return 2.0 * math.e ** 2 * C * S(y) * np.exp(growth * y ** b - a * y * y + log_norm)

    if ref[0] + log_norm > LOG_FLOAT_MAX - 10.0:
        # the integrand itself overflows, so the residual is far above 1
        res_main = res_tail = math.inf
    else:
        res_main = float(quad_batch(main, [0.0], [radius], abstol=1e-14, reltol=1e-11)[0])
        res_tail = float(quad_batch(tail, [0.0], [radius], abstol=1e-14, reltol=1e-11)[0]) if C else 0.0
    valid = res_main < 1.0 and res_tail < 1.0
    cert = DilationCertificate(epsilon=float(epsilon), K=K, mu=mu, a=float(a),
                               residual_main=res_main, residual_tail=res_tail,
                               valid=valid, spec=spec)
    if valid and verify:
        xs = np.linspace(-extent, extent, n_samples)
        ok = cert.holds(xs)
        if not ok.all():
            raise CertificateError(f"dilation bound fails at x = {float(xs[~ok][0])}")
    return cert
