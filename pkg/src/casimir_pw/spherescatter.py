"""Large-sphere scattering amplitudes at imaginary frequencies.

Amplitudes grow like ``exp(2 xi_tilde s)`` and are therefore carried as
``(log|S|, sign)`` pairs. The direct Mie sum for a perfectly conducting
sphere serves as the reference for the WKB expansion.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .materials import PEMC, Dielectric, POLARIZATIONS, TM, TE, dielectric_correction
from .quadrature import ConvergenceError
from .specfun import log_angular_functions, log_bessel_i_half, log_bessel_k_half

__all__ = [
    "ScatteringKinematics", "wkb_amplitude", "diffractive_correction",
    "zero_freq_X", "zero_freq_amplitude_series", "mie_oracle_pec",
]


@dataclass(frozen=True)
class ScatteringKinematics:
    """Half-angle sine ``s >= 1`` of an imaginary-frequency scattering angle."""

    s: float

    def __post_init__(self):
        if not self.s >= 1:
            raise ValueError("s must be at least 1 at imaginary frequencies")

    @property
    def c_sq(self):
        return 1.0 - self.s * self.s

    @property
    def mu(self):
        return 1.0 - 2.0 * self.s * self.s

    @property
    def t(self):
        return 1.0 / self.s

    @classmethod
    def from_mu(cls, mu):
        return cls(math.sqrt(0.5 * (1.0 - mu)))


def _pol(p):
    if isinstance(p, str) and p.upper() in POLARIZATIONS:
        return POLARIZATIONS[p.upper()]
    if p in (TM, TE):
        return int(p)
    raise ValueError(f"unknown polarization {p!r}")


def _material(material):
    if isinstance(material, (PEMC, Dielectric)):
        return material
    if isinstance(material, str) and material.upper() == "PEC":
        return PEMC(0.0)
    return Dielectric(float(material))


def _s_of(kin):
    return kin.s if isinstance(kin, ScatteringKinematics) else float(kin)


def diffractive_correction(p_out, p_in, material, kin):
    """First diffractive correction of the sphere reflection coefficient.

    For isotropic materials (dielectric or PEC) this is the relative
    correction ``s_pp`` with ``r_tilde = r (1 + s_pp/xi_tilde)``. For PEMC
    materials the leading coefficient may vanish, so the absolute
    coefficient of ``1/xi_tilde`` is returned instead.

    Parameters
    ----------
    p_out, p_in : {"TM", "TE"} or {0, 1}
    material : PEMC, Dielectric, "PEC" or float
        A float is read as the refractive index of a dielectric.
    kin : ScatteringKinematics or float
        Kinematics or the half-angle sine ``s >= 1``.
    """
    po, pi_ = _pol(p_out), _pol(p_in)
    s = _s_of(kin)
    if s < 1:
        raise ValueError("s must be at least 1")
    # the string "PEC" names the isotropic limit n -> inf, reported as s_pp
    mat = Dielectric(math.inf) if isinstance(material, str) else _material(material)
    t = 1.0 / s
    if isinstance(mat, PEMC):
        return float(mat.correction(t)[po, pi_])
    if po != pi_:
        return 0.0
    stm, ste = dielectric_correction(mat.n, t)
    return float(stm if po == TM else ste)


def wkb_amplitude(p_out, p_in, xi_tilde, kin, material="PEC", corrected=False):
    """WKB scattering amplitude ``S = (xi_tilde/2) exp(2 xi_tilde s) r_tilde``.

    Returns
    -------
    log_abs : float
        ``log|S|`` (``-inf`` when the amplitude vanishes).
    sign : float
        Sign of ``S``.
    rtilde : float
        The reflection factor, including the ``1/xi_tilde`` correction when
        ``corrected`` is true.
    """
    if not xi_tilde > 0:
        raise ValueError("xi_tilde must be positive")
    po, pi_ = _pol(p_out), _pol(p_in)
    s = _s_of(kin)
    mat = _material(material)
    t = 1.0 / s
    r = float(mat.reflection(t)[po, pi_])
    if corrected:
        r += float(mat.correction(t)[po, pi_]) / xi_tilde
    if r == 0:
        return -math.inf, 0.0, 0.0
    log_abs = math.log(0.5 * xi_tilde) + 2.0 * xi_tilde * s + math.log(abs(r))
    return log_abs, math.copysign(1.0, r), r


def zero_freq_X(p_out, p_in, theta, ell):
    """Zero-frequency model parameters of a PEMC sphere at (real) angular momentum ``ell``."""
    po, pi_ = _pol(p_out), _pol(p_in)
    ell = np.asarray(ell, dtype=float)
    if np.any(ell <= 0):
        raise ValueError("ell must be positive")
    a, b = 1.0, -ell / (ell + 1.0)
    if po == pi_ == TE:
        out = math.sin(theta) ** 2 * a + math.cos(theta) ** 2 * b
    elif po == pi_ == TM:
        out = math.cos(theta) ** 2 * a + math.sin(theta) ** 2 * b
    else:
        out = -0.5 * math.sin(2 * theta) * (a - b)
    return out[()] if np.ndim(out) == 0 else out


def zero_freq_amplitude_series(p_out, p_in, theta, xi_tilde, mu, rtol=1e-18, l_cap=200000):
    """Direct sum of the small-frequency amplitude series.

    Evaluates ``xi_tilde * sum_l X(l) z**l/(2l)!`` with ``z = -2 xi_tilde**2 mu``.

    Returns
    -------
    log_abs, sign : float
    """
    if not mu < 0:
        raise ValueError("mu must be negative")
    z = -2.0 * xi_tilde * xi_tilde * mu
    logz = math.log(z)
    lmax = int(math.sqrt(z) / 2 + 10 * z ** 0.25) + 50
    while True:
        if lmax > l_cap:
            raise ConvergenceError(f"zero-frequency series needs more than {l_cap} terms")
        ell = np.arange(1, lmax + 1, dtype=float)
        logt = ell * logz - gammaln(2 * ell + 1)
        x = zero_freq_X(p_out, p_in, theta, ell)
        with np.errstate(divide="ignore"):
            logt = logt + np.log(np.abs(x))
        sgn = np.sign(x)
        top = np.max(logt)
        # the terms are log-concave in ell, so the last term bounds the tail
        if logt[-1] - top < math.log(rtol) and logt[-1] < logt[-2]:
            break
        lmax *= 2
    total = np.sum(sgn * np.exp(logt - top))
    if total == 0:
        return -math.inf, 0.0
    return math.log(xi_tilde) + top + math.log(abs(total)), math.copysign(1.0, total)


def mie_oracle_pec(p_out_in, xi_tilde, mu, lmax=None):
    """Direct Mie sum for a perfectly conducting sphere.

    Uses ``r_l^MM = (-1)**l (pi/2) i_l/k_l`` and
    ``r_l^EE = (-1)**l (pi/2) (x i_l)'/(x k_l)'`` at ``x = xi_tilde`` with the
    modified spherical Bessel functions normalized as ``i_0 = sinh(x)/x`` and
    ``k_0 = (pi/2) exp(-x)/x``. The sign pattern reproduces ``r_TE,TE = -1``
    and ``r_TM,TM = +1`` in the WKB limit.

    Parameters
    ----------
    p_out_in : {"TE", "TM"}
        Polarization-conserving channel; cross amplitudes vanish for PEC.
    xi_tilde : float
        Size parameter in [1, 500].
    mu : float
        Cosine of the scattering angle, ``mu <= -1``.

    Returns
    -------
    log_abs, sign : float
    """
    p = _pol(p_out_in)
    if not 1 <= xi_tilde <= 500:
        raise ValueError("xi_tilde must lie in [1, 500]")
    if mu > -1:
        raise ValueError("mu must satisfy mu <= -1")
    s = math.sqrt(0.5 * (1.0 - mu))
    if lmax is None:
        lmax = int(math.ceil(5.0 * xi_tilde * s)) + 50
    x = float(xi_tilde)
    log_i, rho = log_bessel_i_half(lmax + 1, x)
    log_k, q = log_bessel_k_half(lmax, x)
    ell = np.arange(1, lmax + 1)
    li, lk = log_i[1:lmax + 1], log_k[1:]
    # (x i_l)' = x i_{l-1} - l i_l = i_l [(l+1) + x i_{l+1}/i_l]
    log_dxi = li + np.log((ell + 1) + x * rho[2:lmax + 2])
    # (x k_l)' = -k_l [x k_{l-1}/k_l + l]
    log_dxk = lk + np.log(x / q[:lmax] + ell)
    half_pi = math.log(0.5 * math.pi)
    log_mm = half_pi + li - lk
    log_ee = half_pi + log_dxi - log_dxk
    lpi, spi, ltau, stau = log_angular_functions(lmax, mu)
    lpi, spi, ltau, stau = lpi[1:], spi[1:], ltau[1:], stau[1:]
    alt = np.where(ell % 2 == 0, 1.0, -1.0)
    s_mm, s_ee = alt, -alt
    logw = np.log((2 * ell + 1) / (ell * (ell + 1.0)))
    if p == TE:
        parts = [(ltau + log_mm, stau * s_mm), (lpi + log_ee, spi * s_ee)]
    else:
        parts = [(ltau + log_ee, stau * s_ee), (lpi + log_mm, spi * s_mm)]
    logs = np.concatenate([logw + parts[0][0], logw + parts[1][0]])
    signs = -np.concatenate([parts[0][1], parts[1][1]])
    keep = signs != 0
    val, sgn = logsumexp(logs[keep], b=signs[keep], return_sign=True)
    tail = np.max(logs[keep][np.r_[ell[keep[:lmax]] >= lmax - 5, ell[keep[lmax:]] >= lmax - 5]]) - val
    if tail > math.log(1e-16):
        raise ConvergenceError("Mie sum not converged at lmax; increase lmax")
    return float(val), float(sgn)
