"""scikit-learn style facade over the discretized operator.

Example::

    op = FunctionalDifferenceOperator(p=2, beta=0, L=20, N=256).fit()
    op.predict([10.0, 20.0])      # eigenvalue counts N(lam)
    op.transform([10.0, 20.0])    # columns: N(lam), Riesz mean
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import _validation as V
from .errors import PotentialRangeError, ResolutionError
from .potential import evaluate
from .spectral import (
    ResolutionDiagnostics,
    assemble,
    build_grid,
    counting_function,
    eigenvalues,
    resolution_check,
    riesz_mean,
)


class FunctionalDifferenceOperator(TransformerMixin, BaseEstimator):
    """Discretized ``H = cosh(D) + W`` with ``W(x) = |x|**p exp(|x|**beta)``.

    ``fit`` assembles the periodic grid operator and computes its full
    spectrum.  Energies passed to ``predict``/``transform`` must lie below
    ``lambda_max_``, the largest energy resolved with the requested ``margin``.

    Parameters
    ----------
    p, beta : float
        Potential exponents.
    L : float
        Half-width of the periodic box ``[-L, L)``.
    N : int
        Number of grid points (even).
    margin : float
        Resolution headroom factor, at least 2.
    check_pairs : int
        Eigenpairs re-derived for the backward-error check.
    """

    def __init__(self, p=2.0, beta=0.0, L=40.0, N=1024, margin=2.0, check_pairs=10):
        self.p = p
        self.beta = beta
        self.L = L
        self.N = N
        self.margin = margin
        self.check_pairs = check_pairs

    def _validate(self):
        spec = V.check_spec(self.p, self.beta)
        L = V.check_positive(self.L, "L")
        N = V.check_even_int(self.N, "N")
        margin = V.check_positive(self.margin, "margin")
        if margin < 2:
            raise ValueError(f"margin must be >= 2, got {margin}")
        return spec, build_grid(L, N), margin

    def fit(self, X=None, y=None):
        """Assemble and diagonalize.  ``X`` and ``y`` are ignored."""
        spec, grid, margin = self._validate()
        self.spec_ = spec
        self.grid_ = grid
        self.operator_ = assemble(grid, spec)
        with np.errstate(over="ignore"):
            top = float(np.cosh(grid.xi_max))
        try:
            wall = evaluate(spec, grid.L)
        except PotentialRangeError:
            wall = math.inf
        self.lambda_max_ = min(top, wall) / margin
        self.spectrum_ = eigenvalues(self.operator_, check_pairs=self.check_pairs,
                                     lambda_max=self.lambda_max_, margin=margin)
        self.eigenvalues_ = self.spectrum_.eigenvalues
        self.n_features_in_ = 1
        return self

    def resolution(self, lambda_max) -> ResolutionDiagnostics:
        check_is_fitted(self)
        return resolution_check(self.grid_, self.spec_, float(lambda_max), self.margin)

    def _energies(self, X):
        check_is_fitted(self)
        lam = V.check_lambdas(X)
        if lam.size and lam.max() > self.lambda_max_:
            raise ResolutionError(
                f"energy {lam.max():.6g} exceeds the resolved window {self.lambda_max_:.6g}",
                self.resolution(lam.max()).as_dict())
        return lam

    def predict(self, X):
        """Eigenvalue counts ``N(lam) = #{lambda_j <= lam}``."""
        lam = self._energies(X)
        return np.asarray(counting_function(self.spectrum_, lam), dtype=np.int64)

    def transform(self, X):
        """``(n, 2)`` array of ``[N(lam), sum_j (lam - lambda_j)_+]``."""
        lam = self._energies(X)
        counts = np.asarray(counting_function(self.spectrum_, lam), dtype=float)
        means = np.array([riesz_mean(self.spectrum_, v) for v in lam])
        return np.column_stack([counts, means]).reshape(-1, 2)
