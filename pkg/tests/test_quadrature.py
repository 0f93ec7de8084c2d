import math

import numpy as np
import pytest
from scipy import integrate

from fdo_spectra.errors import QuadratureError
from fdo_spectra.quadrature import quad, quad_batch


def test_polynomial_exact():
    assert quad(lambda t: t ** 3 - 2 * t, 0.0, 2.0) == pytest.approx(0.0, abs=1e-13)
    assert quad(lambda t: t ** 6, -1.0, 1.0) == pytest.approx(2.0 / 7.0, rel=1e-14)


def test_reversed_and_empty_interval():
    assert quad(np.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1.0), rel=1e-13)
    assert quad(np.exp, 3.0, 3.0) == 0.0


def test_kink_breakpoint():
    val, err = quad(lambda t: np.abs(t - 0.3), 0.0, 1.0, points=(0.3,), full_output=True)
    assert val == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-14)
    assert err < 1e-12


@pytest.mark.parametrize("alpha", [0.5, -0.5])
def test_endpoint_singularity_against_scipy(alpha):
    f = lambda t: t ** alpha  # noqa: E731
    ref, _ = integrate.quad(f, 0.0, 1.0, epsabs=0, epsrel=1e-13)
    assert quad(f, 0.0, 1.0, reltol=1e-10) == pytest.approx(ref, rel=1e-9)


def test_batch_owners_sum_segments():
    # owner 0: [0,1] + [1,2] of t**2 ; owner 1: [0, pi] of sin
    a = [0.0, 1.0, 0.0]
    b = [1.0, 2.0, math.pi]
    owner = [0, 0, 1]

    def f(t, o):
        return np.where(o[:, None] == 0, t * t, np.sin(t))

    vals = quad_batch(f, a, b, owner, 2)
    assert vals == pytest.approx([8.0 / 3.0, 2.0], rel=1e-13)


def test_batch_parameterized_family():
    c = np.linspace(0.5, 4.0, 8)
    vals = quad_batch(lambda t, o: np.exp(-c[o][:, None] * t), np.zeros(8), np.full(8, 5.0),
                      abstol=0.0, reltol=1e-12)
    assert vals == pytest.approx((1 - np.exp(-5 * c)) / c, rel=1e-12)


def test_non_finite_integrand_raises():
    with pytest.raises(QuadratureError):
        quad(lambda t: 1.0 / t, 0.0, 1.0)


def test_infinite_limits_rejected():
    with pytest.raises(ValueError):
        quad_batch(lambda t, o: t, [0.0], [np.inf])
