import math

import numpy as np
import pytest

from casimir_pw.quadrature import (
    ConvergenceError, gauss_legendre, integrate_exp_decay, integrate_unit_decay, tanh_sinh_unit,
)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(6, 0.0, 2.0)
    assert np.sum(w * x ** 11) == pytest.approx(2 ** 12 / 12, rel=1e-14)


def test_tanh_sinh_complement():
    x, xc, w = tanh_sinh_unit(5)
    np.testing.assert_allclose(x + xc, 1.0, rtol=1e-15)
    assert np.all(xc > 0)
    assert np.sum(w) == pytest.approx(1.0, rel=1e-14)


def test_exp_decay_endpoint_singularity():
    # int_0^inf log(y) exp(-2 y) dy = -(euler_gamma + log 2)/2
    val, err = integrate_exp_decay(lambda y, w, wc: np.log(y) * w, rtol=1e-13)
    assert val == pytest.approx(-(np.euler_gamma + math.log(2)) / 2, rel=1e-12)
    assert err < 1e-10


def test_exp_decay_complement_accuracy():
    # 1 - w from the complement is accurate at tiny y, where 1/(1 - w) ~ 1/(2y)
    val, _ = integrate_exp_decay(lambda y, w, wc: y * w / wc, rtol=1e-13)
    assert val == pytest.approx(math.pi ** 2 / 24, rel=1e-12)


def test_exp_decay_leading_axes():
    val, _ = integrate_exp_decay(lambda y, w, wc: np.stack([w, 2 * w]))
    np.testing.assert_allclose(val, [0.5, 1.0], rtol=1e-12)


def test_unit_decay():
    # int_0^1 dt int_0^inf t**2 exp(-2 y) dy = 1/6
    val, _ = integrate_unit_decay(lambda t, y, w, wc: t ** 2 * w + 0 * y)
    assert val == pytest.approx(1 / 6, rel=1e-12)


def test_unit_decay_panels():
    f = lambda t, y, w, wc: np.exp(-1e4 * t) * w + 0 * y
    val, _ = integrate_unit_decay(f, t_breaks=(0.0, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0))
    assert val == pytest.approx(-math.expm1(-1e4) / 2e4, rel=1e-10)


def test_nonconvergence_raises():
    with pytest.raises(ConvergenceError):
        integrate_exp_decay(lambda y, w, wc: np.sin(1e3 * y) * w, rtol=1e-14, max_level=4)
