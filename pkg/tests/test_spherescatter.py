import math

import numpy as np
import pytest

from casimir_pw.materials import PEMC, Dielectric
from casimir_pw.quadrature import ConvergenceError
from casimir_pw.spherescatter import (
    ScatteringKinematics, diffractive_correction, mie_oracle_pec, wkb_amplitude,
    zero_freq_X, zero_freq_amplitude_series,
)


def _slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


class TestKinematics:
    def test_properties(self):
        k = ScatteringKinematics(2.0)
        assert (k.c_sq, k.mu, k.t) == (-3.0, -7.0, 0.5)
        assert ScatteringKinematics.from_mu(-7.0).s == pytest.approx(2.0)

    def test_real_frequency_rejected(self):
        with pytest.raises(ValueError):
            ScatteringKinematics(0.9)


class TestDiffractiveCorrection:
    @pytest.mark.parametrize("s", [1.0, 1.3, 2.0, 5.0])
    def test_pec_closed(self, s):
        assert diffractive_correction("TE", "TE", "PEC", s) == pytest.approx((1 - 2 * s * s) / (2 * s ** 3), rel=1e-14)
        # PEC TM reflection is +1, so the absolute and relative coefficients agree
        assert diffractive_correction("TM", "TM", "PEC", s) == pytest.approx(-1 / (2 * s ** 3), rel=1e-14)
        assert diffractive_correction("TM", "TE", "PEC", s) == 0.0

    def test_pec_signs(self):
        for s in np.linspace(1, 10, 19):
            assert diffractive_correction("TE", "TE", "PEC", s) < 0
            assert diffractive_correction("TM", "TM", "PEC", s) < 0

    def test_pemc_cross_at_backscattering(self):
        assert diffractive_correction("TM", "TE", PEMC(math.pi / 4), 1.0) == pytest.approx(0.5, rel=1e-15)

    def test_dielectric_tends_to_pec(self):
        for s in (1.2, 3.0):
            for p in ("TE", "TM"):
                pec = diffractive_correction(p, p, "PEC", s)
                assert diffractive_correction(p, p, 1e4, s) == pytest.approx(pec, rel=1e-3)

    def test_dielectric_cross_zero(self):
        assert diffractive_correction(0, 1, Dielectric(2.0), 1.5) == 0.0

    def test_pemc_continuity(self):
        for s in (1.0, 2.5):
            for po in (0, 1):
                for pi_ in (0, 1):
                    at0 = diffractive_correction(po, pi_, PEMC(0.0), s)
                    near0 = diffractive_correction(po, pi_, PEMC(1e-9), s)
                    assert near0 == pytest.approx(at0, abs=1e-8)

    def test_invalid(self):
        with pytest.raises(ValueError):
            diffractive_correction("TE", "TE", "PEC", 0.5)
        with pytest.raises(ValueError):
            diffractive_correction("XX", "TE", "PEC", 1.5)


class TestWkb:
    def test_pec_signs(self):
        _, s_te, r_te = wkb_amplitude("TE", "TE", 50.0, 1.5)
        _, s_tm, r_tm = wkb_amplitude("TM", "TM", 50.0, 1.5)
        assert (s_te, r_te, s_tm, r_tm) == (-1.0, -1.0, 1.0, 1.0)

    def test_cross_vanishes_for_pec(self):
        log_abs, sign, r = wkb_amplitude("TE", "TM", 80.0, 2.0, corrected=True)
        assert log_abs == -math.inf and sign == 0.0

    def test_log_magnitude(self):
        xi, s = 30.0, 1.4
        log_abs, _, _ = wkb_amplitude("TM", "TM", xi, s)
        assert log_abs == pytest.approx(math.log(xi / 2) + 2 * xi * s, rel=1e-15)

    def test_large_argument_finite(self):
        log_abs, _, _ = wkb_amplitude("TE", "TE", 1e6, 3.0)
        assert math.isfinite(log_abs) and log_abs > 709

    def test_invalid(self):
        with pytest.raises(ValueError):
            wkb_amplitude("TE", "TE", 0.0, 1.5)


class TestMieOracle:
    def test_deviation_at_100(self):
        mu = 1 - 2 * 1.25 ** 2
        for p in ("TE", "TM"):
            lm, sm = mie_oracle_pec(p, 100.0, mu)
            l0, s0, _ = wkb_amplitude(p, p, 100.0, 1.25)
            assert sm == s0
            assert abs(math.expm1(l0 - lm)) < 0.02

    def test_slopes(self):
        xis = [25.0, 50.0, 100.0, 200.0, 400.0]
        s = 1.25
        mu = 1 - 2 * s * s
        for p in ("TE", "TM"):
            d0, d1 = [], []
            for xi in xis:
                lm, _ = mie_oracle_pec(p, xi, mu)
                d0.append(abs(math.expm1(wkb_amplitude(p, p, xi, s)[0] - lm)))
                d1.append(abs(math.expm1(wkb_amplitude(p, p, xi, s, corrected=True)[0] - lm)))
            assert _slope(xis, d0) == pytest.approx(-1.0, abs=0.15)
            assert _slope(xis, d1) == pytest.approx(-2.0, abs=0.2)
            assert all(b < a for a, b in zip(d0, d1))

    def test_truncation_detected(self):
        with pytest.raises(ConvergenceError):
            mie_oracle_pec("TE", 100.0, -2.0, lmax=20)

    def test_invalid(self):
        with pytest.raises(ValueError):
            mie_oracle_pec("TE", 10.0, -0.5)


class TestZeroFrequency:
    def test_pec_parameters(self):
        assert zero_freq_X("TM", "TM", 0.0, 3) == 1.0
        assert zero_freq_X("TE", "TE", 0.0, 3) == pytest.approx(-0.75)
        assert zero_freq_X("TE", "TM", 0.0, 3) == 0.0

    def test_cross_parameter(self):
        assert zero_freq_X("TE", "TM", math.pi / 4, 1) == pytest.approx(-0.75)

    def test_cosh_identity(self):
        # X = 1 for every l turns the series into xi (cosh sqrt(z) - 1)
        xi, mu = 3.0, -2.0
        z = -2 * xi * xi * mu
        log_abs, sign = zero_freq_amplitude_series("TM", "TM", 0.0, xi, mu)
        assert sign == 1.0
        assert math.exp(log_abs) == pytest.approx(xi * (math.cosh(math.sqrt(z)) - 1), rel=1e-13)

    def test_te_ratio_tends_to_minus_one(self):
        # the dominant l grows like sqrt(z)/2, so X -> -1 as z grows
        ratios = []
        for z in (400.0, 4e4):
            xi = math.sqrt(z / 2)
            log_abs, sign = zero_freq_amplitude_series("TE", "TE", 0.0, xi, -1.0)
            log_ref = math.log(xi) + math.sqrt(z) - math.log(2)
            ratios.append(sign * math.exp(log_abs - log_ref))
        assert -1 < ratios[1] < ratios[0] < 0
        assert ratios[1] == pytest.approx(-1.0, abs=0.02)

    def test_large_z_te(self):
        # X -> -l/(l+1): the ratio to the cosh series is near -10/11 at z = 400
        xi, mu = math.sqrt(200.0), -1.0
        z = -2 * xi * xi * mu
        log_abs, sign = zero_freq_amplitude_series("TE", "TE", 0.0, xi, mu)
        ref = xi * (math.cosh(math.sqrt(z)) - 1)
        ratio = sign * math.exp(log_abs) / ref
        assert ratio == pytest.approx(-10 / 11, rel=0.1)

    def test_invalid(self):
        with pytest.raises(ValueError):
            zero_freq_amplitude_series("TE", "TE", 0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            zero_freq_X("TE", "TE", 0.0, 0)


class TestPemcAmplitudes:
    @pytest.mark.parametrize("theta", [0.2, math.pi / 4, 1.3])
    def test_cross_leading(self, theta):
        _, _, r = wkb_amplitude("TM", "TE", 50.0, 1.7, material=PEMC(theta))
        assert r == pytest.approx(-math.sin(2 * theta), rel=1e-14)

    def test_pec_corrected_te(self):
        xi = 20.0
        _, _, r = wkb_amplitude("TE", "TE", xi, 2.0, corrected=True)
        assert r == pytest.approx(-(1 - 7 / (16 * xi)), rel=1e-14)

    @pytest.mark.parametrize("s", [1.0, 1.5, 4.0])
    def test_pec_tm_absolute(self, s):
        assert diffractive_correction("TM", "TM", PEMC(0.0), s) == pytest.approx(-0.5 / s ** 3, rel=1e-14)

    def test_pmc_continuity(self):
        for p in ("TM", "TE"):
            for q in ("TM", "TE"):
                near = diffractive_correction(p, q, PEMC(0.5 * math.pi - 1e-9), 1.3)
                at = diffractive_correction(p, q, PEMC(0.5 * math.pi), 1.3)
                assert near == pytest.approx(at, abs=1e-8)


class TestZeroFrequencyModel:
    @pytest.mark.parametrize("theta", [0.0, 0.4, 1.1])
    def test_te_limit(self, theta):
        assert zero_freq_X("TE", "TE", theta, 1e9) == pytest.approx(-math.cos(2 * theta), abs=1e-8)

    def test_bounded(self):
        ell = np.arange(1, 200, dtype=float)
        for theta in np.linspace(0, 0.5 * math.pi, 7):
            for p, q in [("TE", "TE"), ("TM", "TM"), ("TE", "TM")]:
                x = zero_freq_X(p, q, theta, ell)
                assert np.all(np.abs(x) <= 1.0)

    @pytest.mark.parametrize("theta", [0.0, 0.4])
    def test_dominant_term(self, theta):
        # the series is carried by l near sqrt(z)/2, so S ~ (xi/2) exp(sqrt z) X(sqrt(z)/2)
        dev = []
        for z in (1e2, 1e3, 1e4):
            xi = math.sqrt(z / 2)
            log_abs, sign = zero_freq_amplitude_series("TE", "TE", theta, xi, -1.0)
            ref = math.log(xi) + math.sqrt(z) - math.log(2)
            dev.append(sign * math.exp(log_abs - ref) / zero_freq_X("TE", "TE", theta, math.sqrt(z) / 2) - 1)
        assert abs(dev[2]) < abs(dev[1]) < abs(dev[0]) < 0.05
        # deviations fall like 1/z, so one Richardson step removes them
        assert 1 + (10 * dev[2] - dev[1]) / 9 == pytest.approx(1.0, abs=2e-5)
