"""Dense symmetric kernels: Householder tridiagonalization, implicit QL, and
Bunch-Kaufman inertia.

The loops are compiled with numba; everything else in the package is plain
numpy.  Only eigenvalues are produced by QL.  Individual eigenvectors, needed
for backward-error spot checks, come from inverse iteration on the
tridiagonal matrix followed by back-transformation with the stored reflectors.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from .errors import NumericalError

BK_ALPHA = (1.0 + math.sqrt(17.0)) / 8.0
MAX_QL_SWEEPS = 50


@njit(cache=True)
def _tridiagonalize(a):
    """Reduce symmetric ``a`` (overwritten, lower triangle used) to tridiagonal form.

    Returns ``(d, e, V)`` with diagonal ``d``, subdiagonal ``e`` and the unit
    Householder vectors ``V[k, k+1:]`` such that ``A = Q T Q^T`` with
    ``Q = H_0 H_1 ... H_{n-3}`` and ``H_k = I - 2 v_k v_k^T``.
    """
    n = a.shape[0]
    d = np.empty(n)
    e = np.zeros(max(n - 1, 0))
    V = np.zeros((n, n))
    p = np.empty(n)
    v = np.empty(n)
    for k in range(n - 2):
        m = k + 1
        norm2 = 0.0
        for i in range(m, n):
            norm2 += a[i, k] * a[i, k]
        d[k] = a[k, k]
        norm = math.sqrt(norm2)
        if norm == 0.0:
            e[k] = 0.0
            continue
        alpha = -norm if a[m, k] >= 0.0 else norm
        vn2 = 0.0
        for i in range(m, n):
            v[i] = a[i, k]
        v[m] -= alpha
        for i in range(m, n):
            vn2 += v[i] * v[i]
        vn = math.sqrt(vn2)
        for i in range(m, n):
            v[i] /= vn
            V[k, i] = v[i]
        e[k] = alpha
        # p = 2 A22 v from the lower triangle
        for i in range(m, n):
            p[i] = 0.0
        for i in range(m, n):
            s = 0.0
            vi = v[i]
            for j in range(m, i):
                aij = a[i, j]
                s += aij * v[j]
                p[j] += aij * vi
            p[i] += s + a[i, i] * vi
        kk = 0.0
        for i in range(m, n):
            p[i] *= 2.0
            kk += v[i] * p[i]
        for i in range(m, n):
            p[i] -= kk * v[i]  # p now holds w
        for i in range(m, n):
            vi = v[i]
            wi = p[i]
            for j in range(m, i + 1):
                a[i, j] -= vi * p[j] + wi * v[j]
    if n >= 2:
        d[n - 2] = a[n - 2, n - 2]
        e[n - 2] = a[n - 1, n - 2]
    if n >= 1:
        d[n - 1] = a[n - 1, n - 1]
    return d, e, V


@njit(cache=True)
def _tql(d, e):
    """Implicit-shift QL on a symmetric tridiagonal matrix, eigenvalues only.

    ``d`` (length n) and ``e`` (length n, ``e[i]`` couples ``i`` and ``i+1``)
    are overwritten.  Returns the index of a non-converged eigenvalue or -1.
    """
    n = d.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > 50:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


@njit(cache=True)
def _bk_negative_count(a):
    """Negative inertia of symmetric ``a`` (overwritten) by Bunch-Kaufman pivoting.

    Returns ``(count, ok)``; ``ok`` is False when a non-finite pivot appears.
    """
    n = a.shape[0]
    alpha = (1.0 + math.sqrt(17.0)) / 8.0
    neg = 0
    k = 0
    while k < n:
        akk = abs(a[k, k])
        colmax = 0.0
        imax = k
        for i in range(k + 1, n):
            if abs(a[i, k]) > colmax:
                colmax = abs(a[i, k])
                imax = i
        if max(akk, colmax) == 0.0:
            # exact zero pivot: eigenvalue at the shift, not counted as negative
            k += 1
            continue
        size = 1
        kp = k
        if akk < alpha * colmax:
            rowmax = 0.0
            for j in range(k, n):
                if j != imax and abs(a[imax, j]) > rowmax:
                    rowmax = abs(a[imax, j])
            if akk * rowmax >= alpha * colmax * colmax:
                kp = k
            elif abs(a[imax, imax]) >= alpha * rowmax:
                kp = imax
            else:
                kp = imax
                size = 2
        target = k + size - 1
        if kp != target:
            # symmetric interchange of rows/columns target and kp
            for j in range(n):
                tmp = a[target, j]
                a[target, j] = a[kp, j]
                a[kp, j] = tmp
            for i in range(n):
                tmp = a[i, target]
                a[i, target] = a[i, kp]
                a[i, kp] = tmp
        if size == 1:
            piv = a[k, k]
            if not math.isfinite(piv):
                return neg, False
            if piv < 0.0:
                neg += 1
            col = a[k + 1:, k].copy()
            for i in range(k + 1, n):
                li = col[i - k - 1] / piv
                for j in range(k + 1, n):
                    a[i, j] -= li * col[j - k - 1]
        else:
            d11 = a[k, k]
            d21 = a[k + 1, k]
            d22 = a[k + 1, k + 1]
            det = d11 * d22 - d21 * d21
            if not math.isfinite(det) or det == 0.0:
                return neg, False
            if det < 0.0:
                neg += 1
            elif d11 < 0.0:
                neg += 2
            i11 = d22 / det
            i12 = -d21 / det
            i22 = d11 / det
            c1 = a[k + 2:, k].copy()
            c2 = a[k + 2:, k + 1].copy()
            for i in range(k + 2, n):
                x1 = c1[i - k - 2]
                x2 = c2[i - k - 2]
                l1 = x1 * i11 + x2 * i12
                l2 = x1 * i12 + x2 * i22
                for j in range(k + 2, n):
                    a[i, j] -= l1 * c1[j - k - 2] + l2 * c2[j - k - 2]
        k += size
    return neg, True


def tridiagonalize(A):
    """Householder reduction; returns ``(d, e, reflectors)``."""
    work = np.array(A, dtype=np.float64, order="C", copy=True)
    return _tridiagonalize(work)


def tridiagonal_eigenvalues(d, e):
    """Sorted eigenvalues of the tridiagonal matrix ``(d, e)`` by implicit QL."""
    n = len(d)
    dd = np.array(d, dtype=np.float64)
    ee = np.zeros(n)
    ee[: n - 1] = e
    bad = _tql(dd, ee)
    if bad >= 0:
        raise NumericalError(f"QL did not converge for eigenvalue {bad} within "
                             f"{MAX_QL_SWEEPS} sweeps")
    return np.sort(dd)


def symmetric_eigenvalues(A):
    """All eigenvalues of a dense real symmetric matrix, ascending."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if A.shape[0] == 0:
        return np.empty(0)
    d, e, _ = tridiagonalize(A)
    return tridiagonal_eigenvalues(d, e)


def tridiagonal_eigenvector(d, e, lam, iterations=3):
    """Unit eigenvector of ``T`` for the computed eigenvalue ``lam`` by inverse iteration."""
    n = len(d)
    scale = max(np.max(np.abs(d)), np.max(np.abs(e)) if n > 1 else 0.0, 1.0)
    shift = lam + 4.0 * np.finfo(float).eps * scale
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1] = np.asarray(d) - shift
    ab[2, :-1] = e
    x = np.random.default_rng(0).standard_normal(n)  # fixed start: deterministic
    for _ in range(iterations):
        with np.errstate(all="ignore"):
            x = solve_banded((1, 1), ab, x, check_finite=False)
        x /= np.linalg.norm(x)
    return x


def back_transform(V, z):
    """Apply ``Q = H_0 ... H_{n-3}`` to ``z``."""
    z = np.array(z, dtype=float)
    n = z.size
    for k in range(n - 3, -1, -1):
        v = V[k, k + 1:]
        z[k + 1:] -= 2.0 * v * (v @ z[k + 1:])
    return z


def eigen_backward_errors(A, d, e, V, eigs, indices):
    """``||A x - lam x|| / ||A||_2``-style residuals for the selected eigenpairs."""
    A = np.asarray(A, dtype=float)
    norm = np.linalg.norm(A, ord=np.inf)
    out = []
    for i in indices:
        lam = eigs[i]
        x = back_transform(V, tridiagonal_eigenvector(d, e, lam))
        out.append(float(np.linalg.norm(A @ x - lam * x) / max(norm, 1e-300)))
    return np.array(out)


def negative_count(A, shift=0.0):
    """Number of eigenvalues of ``A`` strictly below ``shift`` (inertia of ``A - shift I``).

    Returns ``None`` if the factorization breaks down.
    """
    work = np.array(A, dtype=np.float64, order="C", copy=True)
    work[np.diag_indices_from(work)] -= shift
    neg, ok = _bk_negative_count(work)
    return int(neg) if ok else None
