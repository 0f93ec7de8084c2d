import time

import pytest

from fdo_spectra.potential import PotentialSpec
from fdo_spectra.spectral import assemble, build_grid, eigenvalues

ACCEPTANCE = {}


class AcceptanceRecorder:
    """Collects one status line per acceptance criterion."""

    def __init__(self, key, title, budget_s):
        self.key, self.title, self.budget = key, title, budget_s
        self.details = []
        self.ok = True
        self.t0 = time.perf_counter()

    def check(self, cond, detail):
        self.details.append(("ok " if cond else "FAIL ") + detail)
        self.ok = self.ok and bool(cond)
        return cond

    def finish(self):
        elapsed = time.perf_counter() - self.t0
        within = elapsed <= self.budget
        self.ok = self.ok and within
        ACCEPTANCE[self.key] = (self.ok, self.title, elapsed, self.budget, list(self.details))
        return self.ok


@pytest.fixture
def acceptance(request):
    made = []

    def factory(key, title, budget_s):
        rec = AcceptanceRecorder(key, title, budget_s)
        made.append(rec)
        return rec

    yield factory
    for rec in made:
        if rec.key not in ACCEPTANCE:
            rec.ok = False
            rec.finish()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, title, elapsed, budget, details = ACCEPTANCE[key]
        tr.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.1f} s, budget {budget:.0f} s)")
    for key in sorted(ACCEPTANCE):
        ok, *_, details = ACCEPTANCE[key]
        if not ok:
            for d in details:
                tr.write_line(f"    {key}: {d}")


class SpectrumCache:
    """Session-wide eigensolves, so each dense spectrum is computed once."""

    def __init__(self):
        self._store = {}

    def get(self, p, beta, L, N):
        key = (float(p), float(beta), float(L), int(N))
        if key not in self._store:
            op = assemble(build_grid(L, N), PotentialSpec(p, beta))
            self._store[key] = eigenvalues(op)
        return self._store[key]

    def items(self):
        return list(self._store.items())


@pytest.fixture(scope="session")
def spectra():
    return SpectrumCache()


@pytest.fixture(scope="session")
def harmonic_spectrum(spectra):
    return spectra.get(2, 0, 40, 1024)


@pytest.fixture(scope="session")
def exp_spectrum(spectra):
    return spectra.get(0, 1, 12, 512)

