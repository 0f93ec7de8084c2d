import math

import numpy as np
import pytest

from fdo_spectra.errors import ResolutionError
from fdo_spectra.potential import PotentialSpec
from fdo_spectra.spectral import (
    Grid,
    SpectrumResult,
    SymOperator,
    assemble,
    build_grid,
    count_below,
    counting_function,
    eigenvalues,
    layer_cake_integral,
    resolution_check,
    riesz_mean,
)
from oracles import circulant_entry, jacobi_eigenvalues


class TestGrid:
    @pytest.mark.parametrize("L,N,h,xi", [(1, 8, 0.25, 2.0), (40, 1024, 0.078125, 6.4),
                                          (12, 512, 0.046875, 10.666666666666666)])
    def test_examples(self, L, N, h, xi):
        g = build_grid(L, N)
        assert g.h == h
        assert g.xi_max == pytest.approx(xi, rel=1e-15)
        assert g.h * g.N == 2 * L

    def test_nodes_and_frequencies(self):
        g = build_grid(3.0, 12)
        assert g.x[0] == -3.0 and g.x.size == 12
        assert g.xi[0] == -g.xi_max
        assert np.allclose(np.sort(g.xi[1:]), np.sort(-g.xi[1:]))

    @pytest.mark.parametrize("N", [7, 6, 9.5])
    def test_rejects_bad_n(self, N):
        with pytest.raises(ValueError):
            build_grid(1.0, N)

    def test_rejects_bad_l(self):
        with pytest.raises(ValueError):
            Grid(0.0, 8)


class TestAssemble:
    def test_free_spectrum_is_symbol(self):
        g = build_grid(5.0, 32)
        ev = eigenvalues(assemble(g, None)).eigenvalues
        assert ev == pytest.approx(np.sort(np.cosh(g.xi)), rel=1e-12)
        assert ev[0] == pytest.approx(1.0, abs=1e-12)

    def test_direct_summation_small(self):
        g = build_grid(6.0, 16)
        A = assemble(g, PotentialSpec(2.0)).matrix
        for j in range(16):
            for k in range(16):
                ref = circulant_entry(16, g.h, j, k) + (g.x[j] ** 2 if j == k else 0.0)
                assert A[j, k] == pytest.approx(ref, abs=1e-12)

    def test_diagonal_large(self):
        g = build_grid(40.0, 1024)
        A = assemble(g, PotentialSpec(2.0)).matrix
        mean_symbol = math.fsum(math.cosh(v) for v in g.xi) / g.N
        assert np.max(np.abs(np.diag(A) - (mean_symbol + g.x ** 2))) < 1e-12 * mean_symbol

    def test_symmetric_circulant_readonly(self):
        op = assemble(build_grid(4.0, 24), PotentialSpec(1.0, 1.0))
        A = op.matrix
        assert np.array_equal(A, A.T)
        K = A - np.diag(np.diag(A))
        assert np.allclose(K[1:, 1:], K[:-1, :-1], atol=1e-15)
        with pytest.raises(ValueError):
            A[0, 0] = 1.0

    def test_overflow(self):
        with pytest.raises(ResolutionError):
            assemble(build_grid(1.0, 4096), None)


class TestEigenvalues:
    def test_against_jacobi_assembled(self):
        op = assemble(build_grid(6.0, 16), PotentialSpec(2.0))
        res = eigenvalues(op)
        assert np.max(np.abs(res.eigenvalues - jacobi_eigenvalues(op.matrix))) < 1e-9
        assert len(res) == 16
        assert res.backward_errors.max() < 1e-10

    def test_form_bound_and_sorted(self):
        res = eigenvalues(assemble(build_grid(10.0, 128), PotentialSpec(1.0)))
        assert np.all(np.diff(res.eigenvalues) >= 0)
        assert res.eigenvalues[0] >= 1 - 1e-9

    def test_deterministic(self):
        op = assemble(build_grid(8.0, 64), PotentialSpec(2.0))
        assert np.array_equal(eigenvalues(op).eigenvalues, eigenvalues(op).eigenvalues)

    def test_resolution_attached(self):
        op = assemble(build_grid(12.0, 512), PotentialSpec(0.0, 1.0))
        res = eigenvalues(op, lambda_max=math.exp(8))
        assert res.resolution.ok


class TestCountBelow:
    def _op(self, diag):
        return SymOperator(np.diag(np.asarray(diag, dtype=float)), build_grid(1.0, 8), None)

    def test_examples(self):
        assert count_below(self._op([1.0, 2.0, 3.0]), 2.5) == 2
        op = assemble(build_grid(30.0, 64), PotentialSpec(1.0))
        assert count_below(op, 0.5) == 0

    def test_closed_counting(self):
        assert count_below(self._op([1.0, 2.0, 3.0]), 2.0) == 2

    def test_matches_spectrum(self):
        op = assemble(build_grid(30.0, 64), PotentialSpec(1.0))
        spec = eigenvalues(op)
        for lam in (2.0, 5.0, 10.0, 20.0):
            assert count_below(op, lam) == counting_function(spec, lam)


class TestResolution:
    def test_examples(self):
        d = resolution_check(build_grid(12.0, 512), PotentialSpec(0.0, 1.0), math.exp(8), 2.0)
        assert d.frequency_ok and d.domain_ok and d.ok
        d = resolution_check(build_grid(1.0, 8), PotentialSpec(2.0), 100.0)
        assert not d.frequency_ok and not d.domain_ok

    def test_margin_monotone(self):
        g, spec = build_grid(12.0, 512), PotentialSpec(0.0, 1.0)
        flags = [resolution_check(g, spec, 2000.0, m).ok for m in (2.0, 4.0, 8.0, 16.0, 32.0)]
        assert flags == sorted(flags, reverse=True)
        assert flags[0] and not flags[-1]

    def test_margin_below_two(self):
        with pytest.raises(ValueError):
            resolution_check(build_grid(1.0, 8), PotentialSpec(2.0), 1.0, margin=1.5)

    def test_consumers_enforce(self):
        op = assemble(build_grid(12.0, 512), PotentialSpec(0.0, 1.0))
        res = eigenvalues(op, lambda_max=100.0)
        riesz_mean(res, 100.0)
        with pytest.raises(ResolutionError):
            riesz_mean(res, 101.0)
        with pytest.raises(ResolutionError):
            counting_function(res, [10.0, 200.0])


class TestRiesz:
    def test_examples(self):
        s = SpectrumResult.from_values([3.0, 1.0, 2.0])
        assert riesz_mean(s, 2.5) == 2.0
        assert riesz_mean(s, 0.5) == 0.0
        assert riesz_mean(s, 10.0) == 24.0

    def test_counting_vectorized(self):
        s = SpectrumResult.from_values([1.0, 2.0, 2.0, 3.0])
        assert list(counting_function(s, [0.5, 2.0, 2.5, 9.0])) == [0, 3, 3, 4]
        assert counting_function(s, 2.0) == 3

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError):
            SpectrumResult(np.array([2.0, 1.0]))

    def test_layer_cake(self):
        s = SpectrumResult.from_values([1.0, 2.0, 3.0])
        assert layer_cake_integral(s, 2.5) == 2.0
        assert layer_cake_integral(s, 0.0) == 0.0
        rng = np.random.default_rng(5)
        s = SpectrumResult.from_values(rng.uniform(1, 50, 200))
        for lam in (0.5, 10.0, 33.3, 80.0):
            r = riesz_mean(s, lam)
            assert abs(layer_cake_integral(s, lam) - r) <= 1e-12 * (1 + r)


@pytest.mark.slow
def test_grid_refinement(spectra):
    base = spectra.get(2, 0, 40, 1024).eigenvalues[:10]
    assert np.max(np.abs(spectra.get(2, 0, 40, 2048).eigenvalues[:10] - base)) < 1e-8
