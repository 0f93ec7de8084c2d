"""Acceptance criteria; one PASS/FAIL line each is printed in the terminal summary."""

import math

import numpy as np
from fdo_spectra.coherent import GaussianParam, abs_moment
from fdo_spectra.errors import NonIntegrableError
from fdo_spectra.linalg import symmetric_eigenvalues
from fdo_spectra.phasespace import LeadingTerm, PhaseSpaceQuery, quadrant_integral
from fdo_spectra.potential import PotentialSpec, affine_certificate, binomial_majorant, dilation_certificate
from fdo_spectra.schedule import karamata_check, ratio_series, sandwich_report
from fdo_spectra.spectral import assemble, build_grid, count_below, counting_function, eigenvalues
from fdo_spectra.verification import coherent_checks, ibp_checks, reduction_checks
from oracles import jacobi_eigenvalues


def record_checks(rec, checks):
    for c in checks:
        rec.check(c.passed, f"{c.name}: {c.value:.3e} < {c.threshold:.0e}")


def test_ac1_coherent_identities(acceptance):
    rec = acceptance("AC1", "coherent-state marginal and kinetic identities < 1e-8", 10)
    checks = coherent_checks()
    assert len(checks) == 3 * (2 * 3 + 1)
    record_checks(rec, checks)
    assert rec.finish(), rec.details


def test_ac3_sandwich(acceptance, spectra):
    rec = acceptance("AC3", "lower <= Riesz mean <= upper for x^2 at lam 25, 50, 100", 180)
    grid = build_grid(40, 1024)
    spectrum = spectra.get(2, 0, 40, 1024)
    reports = sandwich_report(PotentialSpec(2, 0), [25, 50, 100], grid, spectrum=spectrum)
    for r in reports:
        pad = 0.005 * r.riesz
        rec.check(r.lower - pad <= r.riesz <= r.upper + pad,
                  f"lam={r.lam:g}: {r.lower:.6g} <= {r.riesz:.6g} <= {r.upper:.6g}")
    riesz_ratios = [r.ratios[0] for r in reports]
    rec.check(riesz_ratios == sorted(riesz_ratios), f"riesz/leading increasing: {riesz_ratios}")
    assert rec.finish(), rec.details


def test_ac4_exponential_counting(acceptance, spectra):
    rec = acceptance("AC4", "N(lam)/(4 log^2 lam) for e^|x| in [0.6, 1.4], monotone toward 1", 60)
    op = assemble(build_grid(12, 512), PotentialSpec(0, 1))
    lams = [math.exp(k) for k in (4, 5, 6, 7, 8)]
    res = eigenvalues(op, lambda_max=lams[-1])
    rec.check(res.resolution.ok, f"resolution headroom {res.resolution.as_dict()}")
    counts = counting_function(res, lams)
    rec.check(np.array_equal(res.eigenvalues, spectra.get(0, 1, 12, 512).eigenvalues), "spectrum reproducible")
    for lam, n in zip(lams, counts):
        rec.check(count_below(op, lam) == n, f"inertia count at lam={lam:.6g} equals {n}")
    series = ratio_series(list(zip(lams, counts)), LeadingTerm.counting(PotentialSpec(0, 1)))
    for lam, r in zip(lams, series.ratios):
        rec.check(0.6 <= r <= 1.4, f"lam=e^{math.log(lam):.0f}: ratio {r:.5f}")
    rec.check(series.monotone_toward_one, f"ratios {np.round(series.ratios, 5).tolist()} monotone toward 1")
    assert rec.finish(), rec.details


def test_ac5_power_leading_term(acceptance):
    rec = acceptance("AC5", "quadrant integral / leading term within 3/log lam, monotone", 60)
    lams = [1e3, 1e4, 1e5]
    for p in (1.0, 2.0):
        spec = PotentialSpec(p)
        vals = [(lam, quadrant_integral(PhaseSpaceQuery(lam, 1.0, spec))) for lam in lams]
        series = ratio_series(vals, LeadingTerm.riesz(spec))
        for lam, r in zip(lams, series.ratios):
            rec.check(abs(r - 1) <= 3 / math.log(lam), f"p={p:g} lam={lam:g}: ratio {r:.5f}")
        rec.check(series.monotone_toward_one, f"p={p:g}: monotone toward 1")
    assert rec.finish(), rec.details


def test_ac6_eigensolver_oracle(acceptance):
    rec = acceptance("AC6", "eigensolver and inertia counts agree with Jacobi oracle", 10)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        B = rng.standard_normal((16, 16))
        A = 0.5 * (B + B.T)
        worst = max(worst, float(np.max(np.abs(symmetric_eigenvalues(A) - jacobi_eigenvalues(A)))))
    rec.check(worst < 1e-9, f"20 random 16x16: max diff {worst:.2e}")
    op = assemble(build_grid(6.0, 16), PotentialSpec(2, 0))
    res = eigenvalues(op)
    ref = jacobi_eigenvalues(op.matrix)
    diff = float(np.max(np.abs(res.eigenvalues - ref)))
    rec.check(diff < 1e-9, f"assembled N=16: max diff {diff:.2e}")
    big = assemble(build_grid(30.0, 64), PotentialSpec(1, 0))
    spec_big = eigenvalues(big)
    lams = rng.uniform(0.5, spec_big.eigenvalues[-1] + 1, 50)
    mismatches = sum(count_below(big, lam) != counting_function(spec_big, lam) for lam in lams)
    rec.check(mismatches == 0, f"count_below vs spectrum at 50 random lam: {mismatches} mismatches")
    assert rec.finish(), rec.details


def test_ac7_discretization_convergence(acceptance, spectra):
    rec = acceptance("AC7", "10 lowest eigenvalues stable under N->2N and (L,N)->(2L,2N)", 300)
    base = spectra.get(2, 0, 40, 1024).eigenvalues[:10]
    finer = spectra.get(2, 0, 40, 2048).eigenvalues[:10]
    wider = spectra.get(2, 0, 80, 2048).eigenvalues[:10]
    d1 = float(np.max(np.abs(finer - base)))
    d2 = float(np.max(np.abs(wider - base)))
    rec.check(d1 < 1e-8, f"N 1024->2048 at L=40: {d1:.2e}")
    rec.check(d2 < 1e-8, f"(L,N) (40,1024)->(80,2048): {d2:.2e}")
    assert rec.finish(), rec.details


def test_ac8_certificates(acceptance):
    rec = acceptance("AC8", "affine and dilation certificates, moment decay", 60)
    xs = np.linspace(-50.0, 50.0, 10_000)
    for p in (1.0, 2.0, 4.0):
        for a in (1.0, 10.0, 100.0):
            cert = affine_certificate(PotentialSpec(p), a, verify=False)
            ok = cert.holds(xs)
            rec.check(bool(ok.all()), f"affine p={p:g} a={a:g}: {int(ok.sum())}/{xs.size} points")
    # moment decay: a**(gamma/2) m_gamma(a) is independent of a, so sigma(a) follows the same law
    for p in (1.0, 2.0, 4.0):
        maj = binomial_majorant(PotentialSpec(p), verify=False)
        m1 = {g: abs_moment(GaussianParam(1.0), g) for g in maj.gamma_set}
        for a in (10.0, 100.0):
            law = maj.constant_C * sum(m * a ** (-g / 2) for g, m in m1.items())
            sigma = affine_certificate(PotentialSpec(p), a, verify=False).sigma
            rec.check(abs(sigma - law) <= 1e-9 * law, f"moment law p={p:g} a={a:g}: rel {abs(sigma - law) / law:.1e}")
    cert = dilation_certificate(PotentialSpec(0, 1), 25.0, 0.25, verify=False)
    grid = np.linspace(-10.0, 10.0, 1001)
    rec.check(cert.valid, f"dilation (p=0, beta=1, a=25, eps=0.25) valid, residual {cert.residual_main:.4f}")
    rec.check(bool(cert.holds(grid).all()), "dilation inequality holds on [-10, 10]")
    # beta = 2: the Gaussian integral diverges for a <= 1 + K and is >= 1 just above it
    spec2 = PotentialSpec(0, 2)
    for eps in (1.0, 0.5):
        K = dilation_certificate(spec2, 100.0, eps, verify=False).K
        for a in (0.5 * (1 + K), 1 + K):
            try:
                dilation_certificate(spec2, a, eps, verify=False)
                rec.check(False, f"beta=2 eps={eps:g} a={a:g} accepted")
            except NonIntegrableError:
                rec.check(True, f"beta=2 eps={eps:g} a={a:g} <= 1+K rejected")
        a = 1 + K + 0.25
        c = dilation_certificate(spec2, a, eps, verify=False)
        exact = math.sqrt(a / (a - 1 - K)) - 1
        rec.check(not c.valid and abs(c.residual_main - exact) < 1e-9 * exact,
                  f"beta=2 eps={eps:g} a={a:g}: invalid, residual {c.residual_main:.6g} vs {exact:.6g}")
    assert rec.finish(), rec.details


# runs last so that every spectrum computed above is in the session cache
def test_ac2_exact_identities(acceptance, spectra, harmonic_spectrum, exp_spectrum):
    rec = acceptance("AC2", "Karamata, integration-by-parts and reduction identities", 120)
    for key, spec in spectra.items():
        for lam in (10.0, 25.0, 50.0, 100.0):
            riesz = float(np.sum(np.maximum(lam - spec.eigenvalues, 0.0)))
            r = karamata_check(spec, lam) / (1 + riesz)
            rec.check(r < 1e-12, f"karamata {key} lam={lam:g}: {r:.1e}")
    record_checks(rec, ibp_checks())
    red = reduction_checks()
    assert len(red) == 36
    record_checks(rec, red)
    assert rec.finish(), rec.details
