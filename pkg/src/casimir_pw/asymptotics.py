"""Closed-form PEMC coefficients and the x**(3/2) resummation for PEC spheres.

Energies are dimensionless: PFA energies in units of ``hbar c R_eff/L**2``
and first corrections in units of ``hbar c/L``.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import kv

from .quadrature import gauss_legendre

__all__ = [
    "CriticalPointError", "e_pfa_closed", "e_diff_closed", "beta_coefficients",
    "delta_crit", "e1_closed", "sigma_pair", "bessel_roundtrip_sum",
    "bessel_roundtrip_asymptotic", "NtloResult", "ntlo_energy", "ntlo_fit",
    "BETA_3_2_DIFF", "TE_SHARE", "FIT_CONSTANT",
]

PI = math.pi
BETA_3_2_DIFF = 15.0 * (10.0 + 3.0 * PI) / (4.0 * PI ** 3)
TE_SHARE = (3 * PI / 8 + 1) / (3 * PI / 8 + 5 / 4)
# slope of the published fit to full plane-sphere numerics, used for comparison only
FIT_CONSTANT = 2.65
Z_SWITCH = 1e-5


class CriticalPointError(ArithmeticError):
    """The PFA energy vanishes, so the relative coefficients are undefined.

    The finite first correction is available as ``e1``.
    """

    def __init__(self, delta, e1):
        super().__init__(f"E_PFA vanishes at delta={delta!r}; beta coefficients undefined")
        self.delta = delta
        self.e1 = e1


def _quartic(delta):
    d = np.asarray(delta, dtype=float)
    return PI ** 4 - 30.0 * d * d * (PI - d) ** 2


def _quadratic(delta):
    d = np.asarray(delta, dtype=float)
    return PI ** 2 - 6.0 * d * (PI - d)


def _check_delta(delta):
    d = np.asarray(delta, dtype=float)
    if np.any((d < 0) | (d > 0.5 * PI)):
        raise ValueError("delta must lie in [0, pi/2]")


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def e_pfa_closed(delta):
    """``-[pi**4 - 30 delta**2 (pi - delta)**2]/(720 pi)``."""
    _check_delta(delta)
    return _out(-_quartic(delta) / (720.0 * PI))


def e_diff_closed(delta):
    """Diffractive energy ``15 [pi**2 - 6 delta (pi - delta)]/(720 pi)``."""
    _check_delta(delta)
    return _out(15.0 * _quadratic(delta) / (720.0 * PI))


def e1_closed(delta, u):
    """First correction ``E_1`` in units of ``hbar c/L``."""
    _check_delta(delta)
    return _out((20.0 * _quadratic(delta) - (1.0 / 3.0 - u) * _quartic(delta)) / (720.0 * PI))


def beta_coefficients(delta, u):
    """``(beta_diff, beta_geo, beta1)`` for two PEMC spheres.

    Raises
    ------
    CriticalPointError
        If the PFA energy vanishes (``delta`` at the critical angle to
        rounding); the exception carries the finite ``E_1``.
    """
    _check_delta(delta)
    q4 = float(_quartic(delta))
    if abs(q4) <= 1e-14 * PI ** 4:
        raise CriticalPointError(delta, e1_closed(delta, u))
    b_diff = -15.0 * float(_quadratic(delta)) / q4
    b_geo = 1.0 / 3.0 - u + b_diff / 3.0
    return b_diff, b_geo, b_diff + b_geo


def delta_crit(tol=1e-15):
    """Zero of the PFA energy on (0, pi/2), by Newton iteration from 0.75.

    Falls back to bisection if an iterate leaves the bracket.
    """
    f = lambda d: float(_quartic(d))
    fp = lambda d: -60.0 * d * (PI - d) * (PI - 2.0 * d)
    d = 0.75
    for _ in range(50):
        step = f(d) / fp(d)
        d_new = d - step
        if not 0.0 < d_new < 0.5 * PI:
            return brentq(f, 0.1, 0.5 * PI, xtol=1e-16)
        if abs(d_new - d) <= tol * d:
            return d_new
        d = d_new
    return brentq(f, 0.1, 0.5 * PI, xtol=1e-16)


def sigma_pair(t):
    """``(sigma_TE, sigma_TM) = ((2 - t**2)/4, t**2/4)``."""
    t = np.asarray(t, dtype=float)
    return (2.0 - t * t) / 4.0, t * t / 4.0


def bessel_roundtrip_asymptotic(z):
    """Three-term small-z form ``pi**4/(720 z) - pi**2/12 + 2 pi sqrt(z)/3``."""
    z = np.asarray(z, dtype=float)
    return _out(PI ** 4 / (720.0 * z) - PI ** 2 / 12.0 + 2.0 * PI * np.sqrt(z) / 3.0)


def _direct_sum(z):
    # K_2(a) < 2e-20 for a > 45, far below 1e-16 of the partial sum
    root = math.sqrt(z)
    r_max = int(math.ceil(45.0 / (4.0 * root))) + 1
    if r_max > 10 ** 7:
        raise OverflowError("direct round-trip sum would need more than 1e7 terms")
    r = np.arange(1, r_max + 1, dtype=float)
    terms = kv(2, 4.0 * r * root) / (r * r)
    return math.fsum(terms[::-1])


def bessel_roundtrip_sum(z, method="auto", z_switch=Z_SWITCH):
    """``sum_{r>=1} K_2(4 r sqrt(z))/r**2``.

    Parameters
    ----------
    z : float or array_like
        Positive argument.
    method : {"auto", "direct", "asymptotic"}
        ``auto`` sums directly for ``z >= z_switch`` and uses the three-term
        asymptotic form below, where the direct sum needs ``O(z**-1/2)`` terms.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z_arr <= 0):
        raise ValueError("z must be positive")
    out = np.empty_like(z_arr)
    for i, zi in enumerate(z_arr):
        use_direct = method == "direct" or (method == "auto" and zi >= z_switch)
        if method not in ("auto", "direct", "asymptotic"):
            raise ValueError(f"unknown method {method!r}")
        out[i] = _direct_sum(zi) if use_direct else bessel_roundtrip_asymptotic(zi)
    return float(out[0]) if np.ndim(z) == 0 else out


@dataclass(frozen=True)
class NtloResult:
    """Resummed leading saddle-point energy of two PEC spheres at aspect ratio ``x``.

    ``ratio`` is ``E_LO-SPA/E_PFA`` from quadrature; ``ratio_te``/``ratio_tm``
    split it by polarization. ``e_lo_spa`` is in units of ``hbar c R_eff/L**2``.
    """

    x: float
    ratio: float
    ratio_te: float
    ratio_tm: float
    e_lo_spa: float
    e_lo_spa_asymptotic: float
    beta_3_2_analytic: float = BETA_3_2_DIFF
    te_share_analytic: float = TE_SHARE

    @property
    def beta_3_2_diff(self):
        """Analytic diffractive x**(3/2) coefficient ``15 (10 + 3 pi)/(4 pi**3)``."""
        return self.beta_3_2_analytic

    @property
    def te_share(self):
        """Analytic TE share of the x**(3/2) coefficient."""
        return self.te_share_analytic

    @property
    def beta_3_2_local(self):
        """``(ratio - 1 + 15 x/pi**2)/x**1.5`` at this single ``x``."""
        return (self.ratio - 1.0 + 15.0 * self.x / PI ** 2) / self.x ** 1.5

    @property
    def te_share_local(self):
        te = self.ratio_te - 0.5 + 12.5 * self.x / PI ** 2
        tm = self.ratio_tm - 0.5 + 2.5 * self.x / PI ** 2
        return te / (te + tm)


def ntlo_energy(geom_or_x, n_t=48, z_switch=1e-8):
    """Resummed diffractive energy ``E_LO-SPA`` for two PEC spheres.

    The kappa integral is done analytically,
    ``int kappa exp(-a kappa - b/kappa) dkappa = 2 (b/a) K_2(2 sqrt(a b))``,
    leaving ``E/E_PFA = (360 x/pi**4) sum_p int_0^1 sigma_p S(sigma_p x) dt``
    with ``S`` the Bessel round-trip sum. The t integral uses Gauss-Legendre
    nodes; round-trip sums are direct above ``z_switch``.

    Parameters
    ----------
    geom_or_x : Geometry or float
        Geometry, or the aspect ratio ``x = L/R_eff`` directly.
    """
    x = float(getattr(geom_or_x, "x", geom_or_x))
    if not x > 0:
        raise ValueError("x must be positive")
    if x > 0.1:
        warnings.warn("x > 0.1 lies outside the asymptotic regime", RuntimeWarning, stacklevel=2)
    tn, tw = gauss_legendre(n_t)
    parts = []
    for sig in sigma_pair(tn):
        s = bessel_roundtrip_sum(sig * x, z_switch=z_switch)
        parts.append(360.0 * x / PI ** 4 * float(np.sum(tw * sig * s)))
    ratio = parts[0] + parts[1]
    e_pfa = -PI ** 3 / 720.0
    asym = 1.0 - 15.0 * x / PI ** 2 + BETA_3_2_DIFF * x ** 1.5
    return NtloResult(x=x, ratio=ratio, ratio_te=parts[0], ratio_tm=parts[1],
                      e_lo_spa=e_pfa * ratio, e_lo_spa_asymptotic=e_pfa * asym)


def ntlo_fit(x_grid=(1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3), **kwargs):
    """Extract the x-linear and x**(3/2) coefficients from quadrature.

    ``q(x) = (ratio - 1 + 15 x/pi**2)/x**1.5`` is fitted by least squares to
    ``beta + a sqrt(x) log(x) + b sqrt(x)``, the form implied by the
    ``O(z log z)`` remainder of the round-trip sum. The linear coefficient is
    fitted independently from ``(ratio - 1)/x = c1 + c32 sqrt(x) + ...``.

    Returns
    -------
    dict
        ``beta_3_2``, ``beta_3_2_te``, ``beta_3_2_tm``, ``te_share``,
        ``beta_lin``, ``ratio_to_fit_constant`` and the per-x ``results``.
    """
    res = [ntlo_energy(x, **kwargs) for x in x_grid]
    x = np.array([r.x for r in res])
    sx = np.sqrt(x)
    design = np.column_stack([np.ones_like(x), sx * np.log(x), sx])

    def fit(q):
        return float(np.linalg.lstsq(design, q, rcond=None)[0][0])

    q_all = np.array([r.beta_3_2_local for r in res])
    q_te = np.array([(r.ratio_te - 0.5 + 12.5 * r.x / PI ** 2) / r.x ** 1.5 for r in res])
    q_tm = np.array([(r.ratio_tm - 0.5 + 2.5 * r.x / PI ** 2) / r.x ** 1.5 for r in res])
    beta, b_te, b_tm = fit(q_all), fit(q_te), fit(q_tm)
    lin = np.array([(r.ratio - 1.0) / r.x for r in res])
    design_lin = np.column_stack([np.ones_like(x), sx, x * np.log(x), x])
    beta_lin = float(np.linalg.lstsq(design_lin, lin, rcond=None)[0][0])
    return {
        "beta_3_2": beta,
        "beta_3_2_te": b_te,
        "beta_3_2_tm": b_tm,
        "te_share": b_te / (b_te + b_tm),
        "beta_lin": beta_lin,
        "ratio_to_fit_constant": beta / FIT_CONSTANT,
        "results": res,
    }
