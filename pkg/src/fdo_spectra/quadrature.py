"""Vectorized adaptive Gauss-Kronrod quadrature.

Many independent integrals are refined together: every round evaluates the
15-point Kronrod rule on all live subintervals with a single integrand call,
so nested integrals (an inner integral per outer node) stay cheap.

The integrand signature is ``f(t, owner)`` where ``t`` has shape ``(M, 15)``
and ``owner`` has shape ``(M,)``, giving the index of the integral each row
belongs to.  It must return an array of the same shape as ``t``.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

# Kronrod abscissae on [0, 1] in decreasing order; odd positions are the
# 7-point Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]

_EPS = np.finfo(float).eps


def _kronrod(f, left, right, owner):
    centre = 0.5 * (left + right)
    half = 0.5 * (right - left)
    t = centre[:, None] + half[:, None] * NODES[None, :]
    fv = np.asarray(f(t, owner), dtype=float)
    if fv.shape != t.shape:
        raise ValueError(f"integrand returned shape {fv.shape}, expected {t.shape}")
    if not np.all(np.isfinite(fv)):
        raise QuadratureError("integrand is not finite on the integration path")
    resk = fv @ KRONROD_WEIGHTS
    resg = fv @ GAUSS_WEIGHTS
    resabs = np.abs(fv) @ KRONROD_WEIGHTS
    mean = 0.5 * resk
    resasc = np.abs(fv - mean[:, None]) @ KRONROD_WEIGHTS
    ahalf = np.abs(half)
    value = resk * half
    err = np.abs((resk - resg) * half)
    resasc = resasc * ahalf
    resabs = resabs * ahalf
    # QUADPACK error heuristic
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(
            (resasc != 0) & (err != 0),
            resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5),
            err,
        )
    floor = 50.0 * _EPS * resabs
    err = np.maximum(scaled, floor)
    return value, err, err <= floor


def quad_batch(f, a, b, owner=None, n=None, *, abstol=1e-12, reltol=1e-10,
               presplit=4, max_rounds=120, max_intervals=4_000_000, full_output=False):
    """Integrate a family of functions over ``[a[i], b[i]]``.

    Several segments may share an owner, which is how breakpoints are passed:
    the integral for owner ``j`` is the sum over its segments.  Each integral
    is refined until its error estimate is below ``max(abstol, reltol*|I|)``.

    Parameters
    ----------
    f : callable
        ``f(t, owner) -> ndarray`` evaluated on ``(M, 15)`` node arrays.
    a, b : array_like
        Segment endpoints.  Segments with ``a == b`` contribute zero.
    owner : array_like of int, optional
        Integral index of each segment; defaults to ``arange(len(a))``.
    n : int, optional
        Number of integrals; defaults to ``owner.max() + 1``.
    presplit : int
        Each segment is cut into this many equal pieces before the first
        error estimate; guards against false convergence on one coarse rule.

    Returns
    -------
    values : ndarray
        One value per owner.  With ``full_output`` also the error estimates.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    a, b = np.broadcast_arrays(a, b)
    if owner is None:
        owner = np.arange(a.size)
    owner = np.atleast_1d(np.asarray(owner, dtype=np.intp))
    if n is None:
        n = int(owner.max()) + 1 if owner.size else 0
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("integration limits must be finite")

    span = np.bincount(owner, weights=np.abs(b - a), minlength=n)
    keep = a != b
    frac = np.linspace(0.0, 1.0, presplit + 1)
    cuts = a[keep, None] + (b[keep] - a[keep])[:, None] * frac[None, :]
    left, right = cuts[:, :-1].ravel(), cuts[:, 1:].ravel()
    own = np.repeat(owner[keep], presplit)
    acc_val = np.zeros(n)
    acc_err = np.zeros(n)

    for _ in range(max_rounds):
        if left.size == 0:
            break
        val, err, at_floor = _kronrod(f, left, right, own)
        total = acc_val + np.bincount(own, weights=val, minlength=n)
        total_err = acc_err + np.bincount(own, weights=err, minlength=n)
        tol = np.maximum(abstol, reltol * np.abs(total))
        converged = total_err <= tol
        width = np.abs(right - left)
        share = np.divide(width, span[own], out=np.zeros_like(width), where=span[own] > 0)
        too_narrow = width <= 64.0 * _EPS * np.maximum(np.abs(left), np.abs(right))
        split = ~converged[own] & (err > 0.5 * tol[own] * share) & ~too_narrow & ~at_floor
        done = ~split
        acc_val += np.bincount(own[done], weights=val[done], minlength=n)
        acc_err += np.bincount(own[done], weights=err[done], minlength=n)
        if not split.any():
            left = left[:0]
            break
        if 2 * int(split.sum()) > max_intervals:
            raise QuadratureError("interval budget exhausted; integrand may be too rough")
        mid = 0.5 * (left[split] + right[split])
        left = np.concatenate([left[split], mid])
        right = np.concatenate([mid, right[split]])
        own = np.concatenate([own[split], own[split]])
    else:
        raise QuadratureError(f"no convergence after {max_rounds} refinement rounds")

    tol = np.maximum(abstol, reltol * np.abs(acc_val))
    # accepted pieces are frozen, so allow a little slack against the final tolerance
    bad = acc_err > 2.0 * tol
    if bad.any():
        i = int(np.argmax(acc_err / tol))
        raise QuadratureError(
            f"integral {i}: error estimate {acc_err[i]:.3e} exceeds tolerance {tol[i]:.3e}"
        )
    if full_output:
        return acc_val, acc_err
    return acc_val


def quad(f, a, b, points=(), *, abstol=1e-12, reltol=1e-10, full_output=False):
    """Adaptive integral of a scalar-vectorized function ``f(t)`` over [a, b].

    ``points`` are interior breakpoints (kinks, integrable singularities).
    """
    if a == b:
        return (0.0, 0.0) if full_output else 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    edges = np.unique(np.concatenate([[a, b], [p for p in points if a < p < b]]))
    owner = np.zeros(edges.size - 1, dtype=np.intp)
    res = quad_batch(lambda t, _o: f(t), edges[:-1], edges[1:], owner, 1,
                     abstol=abstol, reltol=reltol, full_output=full_output)
    if full_output:
        return sign * float(res[0][0]), float(res[1][0])
    return sign * float(res[0])
