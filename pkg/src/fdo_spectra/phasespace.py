"""Positive-part phase-space integrals and their one-dimensional reductions.

All integrals use the quadrant-folded convention: with ``u = C e^k`` the
first-quadrant integral of ``(lam - C e^k - W(y))_+`` over ``k, y >= 0`` is

    int_C^{lam - W(0)} int_{W(0)}^{lam - u} (lam - u - v) / (u W'(W^-1(v))) dv du,

and the reported value is four times that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .potential import PotentialSpec, derivative, evaluate, inverse
from .quadrature import quad, quad_batch

INNER_RELTOL = 1e-12
OUTER_RELTOL = 1e-10
SLIVER = 1.0  # y-form is used on [0, SLIVER] where W' may vanish or blow up


@dataclass(frozen=True)
class PhaseSpaceQuery:
    lam: float
    C: float
    spec: PotentialSpec

    def __post_init__(self):
        if not (self.lam > 0 and self.C > 0):
            raise ValueError("lam and C must be positive")

    @property
    def active(self) -> bool:
        """Nonzero region requires ``C < lam - W(0)``."""
        return self.C < self.lam - self.spec.W0


@dataclass(frozen=True)
class LeadingTerm:
    """``coefficient * lam**lambda_exponent * log(lam)**log_exponent``."""

    coefficient: float
    lambda_exponent: float
    log_exponent: float

    @classmethod
    def riesz(cls, spec: PotentialSpec) -> "LeadingTerm":
        if spec.beta == 0:
            p = spec.p
            return cls(4.0 * p / (p + 1.0), 1.0 + 1.0 / p, 1.0)
        return cls(4.0, 1.0, 1.0 + 1.0 / spec.beta)

    @classmethod
    def counting(cls, spec: PotentialSpec) -> "LeadingTerm":
        """Leading behaviour of ``N(lam)``, the lam-derivative of the Riesz term."""
        if spec.beta == 0:
            return cls(4.0, 1.0 / spec.p, 1.0)
        return cls(4.0, 0.0, 1.0 + 1.0 / spec.beta)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if np.any(lam <= math.e):
            raise ValueError("leading terms are defined for lam > e")
        out = self.coefficient * lam ** self.lambda_exponent * np.log(lam) ** self.log_exponent
        return float(out) if out.ndim == 0 else out


def leading_term(spec: PotentialSpec, lam):
    return LeadingTerm.riesz(spec)(lam)


def counting_term(spec: PotentialSpec, lam):
    return LeadingTerm.counting(spec)(lam)


# ---------------------------------------------------------------------------
# reduced (v-form) quadrant integral
# ---------------------------------------------------------------------------

def _inner_energy(spec: PotentialSpec, E, reltol=INNER_RELTOL):
    """``int_{W(0)}^E (E - v) / W'(W^-1(v)) dv`` for each entry of ``E``.

    On ``v <= W(SLIVER)`` the integral is taken in the original variable,
    ``int_0^{min(SLIVER, W^-1(E))} (E - W(y)) dy``.
    """
    E = np.asarray(E, dtype=float).ravel()
    cut = evaluate(spec, SLIVER)
    y_top = np.minimum(inverse(spec, np.maximum(E, spec.W0)), SLIVER)
    near = quad_batch(lambda y, o: E[o][:, None] - evaluate(spec, y),
                      np.zeros_like(E), y_top, abstol=0.0, reltol=reltol)
    far_idx = np.flatnonzero(E > cut)
    if far_idx.size:
        Ef = E[far_idx]

        def far_integrand(v, o):
            return (Ef[o][:, None] - v) / derivative(spec, inverse(spec, v))

        near[far_idx] += quad_batch(far_integrand, np.full(Ef.size, cut), Ef,
                                    abstol=0.0, reltol=reltol)
    return near


def quadrant_integral(q: PhaseSpaceQuery, *, reltol=OUTER_RELTOL) -> float:
    """Quadrant-folded integral via the one-dimensional-in-energy reduction."""
    if not q.active:
        return 0.0
    spec, lam, C = q.spec, q.lam, q.C
    top = lam - spec.W0

    def outer(u, _o):
        return _inner_energy(spec, lam - u).reshape(u.shape) / u

    kink = lam - evaluate(spec, SLIVER)
    edges = [C, top] if not C < kink < top else [C, kink, top]
    val = quad_batch(outer, edges[:-1], edges[1:], np.zeros(len(edges) - 1, dtype=np.intp), 1,
                     abstol=0.0, reltol=reltol)
    return 4.0 * float(val[0])


def quadrant_integral_2d(q: PhaseSpaceQuery, *, reltol=OUTER_RELTOL) -> float:
    """Same quantity integrated directly over ``k`` then ``y``; an independent path."""
    if not q.active:
        return 0.0
    spec, lam, C = q.spec, q.lam, q.C
    k_top = math.log((lam - spec.W0) / C)

    def outer(k, _o):
        E = (lam - C * np.exp(k)).ravel()
        Y = inverse(spec, np.maximum(E, spec.W0))
        inner = quad_batch(lambda y, o: E[o][:, None] - evaluate(spec, y),
                           np.zeros_like(E), Y, abstol=0.0, reltol=INNER_RELTOL)
        return inner.reshape(k.shape)

    return 4.0 * float(quad_batch(outer, [0.0], [k_top], abstol=0.0, reltol=reltol)[0])


def cosh_integral(q: PhaseSpaceQuery, *, reltol=OUTER_RELTOL) -> float:
    """``int_{R^2} (lam - C cosh(k) - W(y))_+ dk dy`` using evenness in both variables."""
    spec, lam, C = q.spec, q.lam, q.C
    if not C < lam - spec.W0:
        return 0.0
    y_top = inverse(spec, lam - C)

    def outer(y, _o):
        E = (lam - evaluate(spec, y)).ravel()
        k_top = np.arccosh(np.maximum(E / C, 1.0))
        inner = quad_batch(lambda k, o: E[o][:, None] - C * np.cosh(k),
                           np.zeros_like(E), k_top, abstol=0.0, reltol=INNER_RELTOL)
        return inner.reshape(y.shape)

    return 4.0 * float(quad_batch(outer, [0.0], [y_top], abstol=0.0, reltol=reltol)[0])


def cosh_line_integral(lam: float, C: float = 1.0) -> float:
    """``int_R (lam - C cosh(k))_+ dk``: the kinetic part alone."""
    if not C < lam:
        return 0.0
    top = math.acosh(lam / C)
    return 2.0 * quad(lambda k: lam - C * np.cosh(k), 0.0, top, abstol=0.0, reltol=OUTER_RELTOL)


def minus_u_part(q: PhaseSpaceQuery) -> float:
    """``int_C^{lam-W(0)} int_{W(0)}^{lam-u} dv / W'(W^-1(v)) du = int W^-1(lam - u) du``.

    The part of the reduced integrand with numerator ``-u`` (sign dropped, no
    factor 4); it is of lower order, at most ``lam W^-1(lam)``.
    """
    if not q.active:
        return 0.0
    spec, lam = q.spec, q.lam
    return quad(lambda u: inverse(spec, lam - u), q.C, lam - spec.W0,
                abstol=0.0, reltol=OUTER_RELTOL)


# ---------------------------------------------------------------------------
# integration-by-parts identities
# ---------------------------------------------------------------------------

def _power_kernel_integral(p: float, lo: float, f) -> float:
    """``int_lo^1 f(u) (1-u)**(1/p - 1) du`` with ``u = 1 - w**p`` on ``[1/2, 1]``."""
    r = 1.0 / p - 1.0
    mid = max(lo, 0.5)
    total = 0.0
    if lo < mid:
        total += quad(lambda u: f(u) * (1.0 - u) ** r, lo, mid, abstol=0.0, reltol=1e-12)
    w_top = (1.0 - mid) ** (1.0 / p)
    # (1-u)^(1/p-1) du = p w^(1-p) w^(p-1) dw = p dw
    total += quad(lambda w: p * f(1.0 - w ** p), 0.0, w_top, abstol=0.0, reltol=1e-12)
    return total


def tail_integral(p: float) -> float:
    """``int_0^1 u (1-u)**(1/p - 1) log(u) du``, finite and negative for ``p > 0``."""
    if not p > 0:
        raise ValueError("p must be positive")
    return _power_kernel_integral(p, 0.0, lambda u: u * np.log(u))


def ibp_residual_power(lam: float, C: float, p: float) -> float:
    """Residual of the power-case integration-by-parts identity in ``u = C/lam``.

    Returned as ``|LHS - RHS| / (1 + |LHS|)``.
    """
    if not 0 < C < lam:
        raise ValueError("need 0 < C < lam")
    c = C / lam
    lhs = _power_kernel_integral(p, c, lambda u: (1.0 - u) * (p + u) / u)
    rhs = (math.log(lam / C) * (1.0 - c) ** (1.0 / p) * (p + c)
           + (p + 1.0) / p * _power_kernel_integral(p, c, lambda u: u * np.log(u)))
    return abs(lhs - rhs) / (1.0 + abs(lhs))


def _log_double(lam, C, L, r) -> float:
    """``int_C^{lam-L} int_L^{lam-u} (log v)**r / u dv du``."""

    def outer(u, _o):
        top = (lam - u).ravel()
        inner = quad_batch(lambda v, o: np.log(v) ** r, np.full(top.size, L), top,
                           abstol=0.0, reltol=INNER_RELTOL)
        return inner.reshape(u.shape) / u

    return float(quad_batch(outer, [C], [lam - L], abstol=0.0, reltol=1e-12)[0])


def ibp_residual_exp(lam: float, C: float, L_cut: float, r: float) -> float:
    """Residual of ``int int (log v)^r / u = boundary term - r int int (log v)^(r-1) / u``.

    Returned as ``|LHS - RHS| / (1 + |LHS|)``.
    """
    if not (L_cut > 1 and 0 < C < lam - L_cut and r > 0):
        raise ValueError("need 1 < L_cut, 0 < C < lam - L_cut and r > 0")
    lhs = _log_double(lam, C, L_cut, r)
    edge_L = L_cut * math.log(L_cut) ** r
    boundary = quad(lambda u: ((lam - u) * np.log(lam - u) ** r - edge_L) / u,
                    C, lam - L_cut, abstol=0.0, reltol=1e-12)
    rhs = boundary - r * _log_double(lam, C, L_cut, r - 1.0)
    return abs(lhs - rhs) / (1.0 + abs(lhs))
