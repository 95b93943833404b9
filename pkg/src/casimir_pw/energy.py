"""Spectral densities and energies: PFA, diffractive and geometric parts.

Internally everything is dimensionless. With ``eta = xi L/c`` the frequency
densities are

* ``pfa``: the free energy per frequency in units of ``R_eff/L``,
* ``diff`` and ``geo``: dimensionless,

and the zero-temperature energies follow from ``E = (hbar c/2 pi L) int deta``.
Energies are reported in units of ``hbar c R_eff/L**2`` (PFA) and
``hbar c/L`` (corrections). The double integrals use ``t = xi/(c kappa)`` and
``y = kappa L`` so that ``int dxi int k dk = c int_0^1 dt int kappa**2 dkappa``.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar, k as K_B, c as C_LIGHT

from .materials import PEMC, Dielectric, PemcPair, eigen_slots
from .quadrature import ConvergenceError, integrate_exp_decay, integrate_unit_decay
from .roundtrip import one_minus_eigen
from .specfun import polylog

__all__ = [
    "Geometry", "EnergyBreakdown", "MaterialPair",
    "pfa_density", "pfa_density_closed", "diff_density", "diff_density_general",
    "geo_density", "pfa_energy", "diff_energy", "geo_energy",
    "casimir_energy_pfa", "casimir_energy_with_corrections", "matsubara_parameter",
]



@dataclass(frozen=True)
class Geometry:
    """Two spheres of radii ``R1``, ``R2`` (``R2 = inf`` for a plane) at gap ``L`` (m)."""

    R1: float
    R2: float
    L: float

    def __post_init__(self):
        if not (self.R1 > 0 and self.R2 > 0 and self.L > 0):
            raise ValueError("radii and distance must be positive")
        if math.isinf(self.R1):
            raise ValueError("R1 must be finite; put the plane in R2")

    @property
    def R_eff(self):
        if math.isinf(self.R2):
            return self.R1
        return self.R1 * self.R2 / (self.R1 + self.R2)

    @property
    def u(self):
        if math.isinf(self.R2):
            return 0.0
        return self.R1 * self.R2 / (self.R1 + self.R2) ** 2

    @property
    def x(self):
        return self.L / self.R_eff

    @property
    def rho(self):
        """``(R_eff/R1, R_eff/R2)``."""
        return self.R_eff / self.R1, self.R_eff / self.R2

    @classmethod
    def from_x(cls, x, ratio=1.0, L=1e-6):
        """Geometry with aspect ratio ``x`` and radius ratio ``R2/R1`` (may be inf)."""
        if math.isinf(ratio):
            return cls(L / x, math.inf, L)
        r_eff = L / x
        R1 = r_eff * (1.0 + ratio) / ratio
        return cls(R1, R1 * ratio, L)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Zero-temperature energy split and its expansion coefficients.

    ``e_pfa`` is in units of ``hbar c R_eff/L**2``; ``e_diff``, ``e_geo`` and
    ``e1`` in units of ``hbar c/L``. The ``*_si`` fields are in joule.
    ``beta_*`` are NaN where ``e_pfa`` vanishes.
    """

    e_pfa: float
    e_diff: float
    e_geo: float
    beta_diff: float
    beta_geo: float
    beta1: float
    e_pfa_si: float
    e1_si: float
    errors: dict = field(default_factory=dict)

    @property
    def e1(self):
        return self.e_diff + self.e_geo


class MaterialPair:
    """Leading and correction reflection data of two surfaces at the saddle point.

    Parameters
    ----------
    mat1, mat2 : PEMC or Dielectric
    rho1, rho2 : float
        ``R_eff/R_i``; only used by the diffractive coefficients.
    """

    def __init__(self, mat1, mat2, rho1=0.5, rho2=0.5):
        self.mat1, self.mat2 = mat1, mat2
        self.rho1, self.rho2 = rho1, rho2
        self.pemc_delta = None
        if isinstance(mat1, PEMC) and isinstance(mat2, PEMC):
            self.pemc_delta = abs(mat2.theta - mat1.theta)

    @classmethod
    def coerce(cls, pair, rho1=0.5, rho2=0.5):
        if isinstance(pair, cls):
            return pair
        if isinstance(pair, PemcPair):
            return cls(PEMC(pair.theta1), PEMC(pair.theta2), rho1, rho2)
        if isinstance(pair, tuple):
            return cls(pair[0], pair[1], rho1, rho2)
        delta = float(pair)
        if not 0 <= delta <= 0.5 * math.pi:
            raise ValueError("delta must lie in [0, pi/2]")
        return cls(PEMC(0.0), PEMC(delta), rho1, rho2)

    def t_breaks(self):
        """Panel edges in ``t`` resolving the ``t ~ 1/n`` layer of good reflectors."""
        ns = [m.n for m in (self.mat1, self.mat2) if isinstance(m, Dielectric) and math.isfinite(m.n)]
        if not ns or max(ns) < 10:
            return None
        inner = 0.1 / max(ns)
        edges = inner * 10.0 ** np.arange(0, int(math.ceil(-math.log10(inner))))
        return np.concatenate([[0.0], edges[edges < 1.0], [1.0]])

    def slots(self, t):
        """Stripped eigenvalues of ``R1 R2`` as (modulus, phase), shape ``t.shape + (2,)``."""
        t = np.asarray(t, dtype=float)
        if self.pemc_delta is not None:
            rho = np.ones(t.shape + (2,))
            phi = np.broadcast_to(np.array([2.0, -2.0]) * self.pemc_delta, t.shape + (2,))
            return rho, phi
        return eigen_slots(self.mat1.reflection(t) @ self.mat2.reflection(t))

    def alpha_hat(self, t):
        """``alpha0, alpha1`` with the weight factors removed (functions of ``t``)."""
        t = np.asarray(t, dtype=float)
        r1, r2 = self.mat1.reflection(t), self.mat2.reflection(t)
        a = r1 @ r2
        a1 = self.rho1 * (self.mat1.correction(t) @ r2) + self.rho2 * (r1 @ self.mat2.correction(t))
        alpha0 = a1[..., 0, 0] + a1[..., 1, 1]
        alpha1 = (-a[..., 0, 0] * a1[..., 1, 1] - a[..., 1, 1] * a1[..., 0, 0]
                  + a[..., 0, 1] * a1[..., 1, 0] + a[..., 1, 0] * a1[..., 0, 1])
        return alpha0, alpha1


def _eig_sum_li(n, rho, phi, w):
    """``sum_i Re Li_n(lambda_i)`` over the two eigenvalue slots."""
    return (polylog(n, rho[..., 0] * w, phi[..., 0])
            + polylog(n, rho[..., 1] * w, phi[..., 1]))


def _one_minus(rho, phi, w, wc):
    return one_minus_eigen(rho, phi, w[..., None], wc[..., None])


def _broadcast_t(t, y):
    return np.broadcast_to(t, np.broadcast_shapes(np.shape(t), np.shape(y)))


# ---------------------------------------------------------------- integrands

def _pfa_kernel(pair, t, y, w, wc):
    rho, phi = pair.slots(_broadcast_t(t, y))
    return _eig_sum_li(2, rho, phi, w)


def _diff_kernel_pemc(pair, t, y, w, wc):
    """``B/t`` for PEMC: ``-(1/2) sum_i log|1 - lambda_i|``."""
    rho, phi = pair.slots(_broadcast_t(t, y))
    d = _one_minus(rho, phi, w, wc)
    return -0.5 * np.sum(np.log(np.abs(d)), axis=-1)


def _log_ratio_over_gap(mu1, mu2, w, d2):
    """``[log(1 - mu1 w) - log(1 - mu2 w)]/(mu1 - mu2)``, finite as ``mu1 -> mu2``.

    ``d2`` holds ``1 - mu2 w``.
    """
    gap = mu1 - mu2
    z = -gap * w / d2
    small = np.abs(z) < 1e-3
    zs = np.where(small, z, 0.0)
    # log1p(z)/z by its Taylor series; the z**6 remainder is below 1e-18
    series = 1.0 - zs / 2 + zs ** 2 / 3 - zs ** 3 / 4 + zs ** 4 / 5 - zs ** 5 / 6
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.log1p(np.where(small, 0.0, z)) / np.where(small, 1.0, gap)
    return np.where(small, -w / d2 * series, direct)


def _diff_kernel_general(pair, t, y, w, wc):
    """``B`` from the eigenvalue form.

    ``[g(mu1) L1 - g(mu2) L2]/(mu1 - mu2)`` with ``g = a0 + a1/mu`` is split
    exactly into ``g(mu1) (L1 - L2)/(mu1 - mu2) - a1 L2/(mu1 mu2)``, which
    stays accurate as the eigenvalues coalesce.
    """
    tt = _broadcast_t(t, y)
    rho, phi = pair.slots(tt)
    a0, a1 = pair.alpha_hat(tt)
    mu = rho * np.exp(1j * phi)
    d = _one_minus(rho, phi, w, wc)
    log_d2 = np.log(d[..., 1])
    ww = np.broadcast_to(w, tt.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        g1 = a0 + a1 / mu[..., 0]
        out = (g1 * _log_ratio_over_gap(mu[..., 0], mu[..., 1], ww, d[..., 1])
               - a1 * log_d2 / (mu[..., 0] * mu[..., 1]))
    return np.real(out)


def _geo_kernel(pair, u, t, y, w, wc):
    tt = _broadcast_t(t, y)
    rho, phi = pair.slots(tt)
    d = _one_minus(rho, phi, w, wc)
    inv = 1.0 / d
    frac = np.sum(np.real(inv) - 1.0, axis=-1)          # sum Re lambda/(1 - lambda)
    mlog = -np.sum(np.log(np.abs(d)), axis=-1)           # sum -Re log(1 - lambda)
    k = 3.0 * u - 1.0
    li2 = _eig_sum_li(2, rho, phi, w)
    li3 = _eig_sum_li(3, rho, phi, w)
    t2 = tt * tt
    return y * (1.0 + t2) * (frac + k * li2) + t2 * (mlog + k * li3)


# ---------------------------------------------------------- frequency slices

def _slice(kernel, eta, rtol, weight):
    """Integrate ``weight(y) * kernel`` over y in [eta, inf) for each eta."""
    eta = np.atleast_1d(np.asarray(eta, dtype=float))[:, None]
    if np.any(eta < 0):
        raise ValueError("eta must be non-negative")
    shift = np.exp(-2.0 * eta)

    def func(yp, wp, wcp):
        y = eta + yp
        w = shift * wp
        wc = -np.expm1(-2.0 * y)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(y > 0, eta / y, 0.0)
        return weight(y) * kernel(t, y, w, wc)

    val, err = integrate_exp_decay(func, rtol=rtol, atol=1e-300)
    return val, err


def pfa_density(pair, eta, rtol=1e-12):
    """PFA free energy per imaginary frequency, in units of ``R_eff/L``.

    ``-(1/2) int_eta^inf dy sum_i Li_2(lambda_i)`` with ``lambda_i`` the
    eigenvalues of the planar round-trip matrix at ``kappa L = y``.

    Parameters
    ----------
    pair : float, PemcPair, tuple or MaterialPair
        A float is read as the PEMC angle difference ``delta``.
    eta : array_like
        Dimensionless frequencies ``xi L/c >= 0``.
    """
    model = MaterialPair.coerce(pair)
    val, _ = _slice(lambda t, y, w, wc: _pfa_kernel(model, t, y, w, wc), eta, rtol, lambda y: 1.0)
    return -0.5 * val if np.ndim(eta) else float(-0.5 * val[0])


def pfa_density_closed(delta, eta):
    """PEMC closed form ``-(1/2) Re Li_3(exp(-2 eta + 2 i delta))``."""
    eta = np.asarray(eta, dtype=float)
    out = -0.5 * polylog(3, np.exp(-2.0 * eta), 2.0 * delta)
    return out


def diff_density(pair, eta, rtol=1e-12):
    """PEMC diffractive density ``-(1/4) int_eta^inf dy/y sum_i log(1 - lambda_i)``."""
    model = MaterialPair.coerce(pair)
    if model.pemc_delta is None:
        raise ValueError("diff_density applies to PEMC pairs; use diff_density_general")
    if np.any(np.asarray(eta) <= 0):
        raise ValueError("the diffractive density is defined for eta > 0")
    val, _ = _slice(lambda t, y, w, wc: _diff_kernel_pemc(model, t, y, w, wc), eta, rtol,
                    lambda y: 1.0 / y)
    # kernel holds -(1/2) sum log; the density carries -(1/4)
    return 0.5 * val if np.ndim(eta) else float(0.5 * val[0])


def diff_density_general(pair, eta, rho1=0.5, rho2=0.5, rtol=1e-12):
    """Diffractive density from the eigenvalue form with general ``alpha0``, ``alpha1``.

    ``(1/(2 eta)) int_eta^inf dy B`` where ``B`` is the logarithmic
    eigenvalue combination, evaluated so that coalescing eigenvalues need
    no special case.
    """
    model = MaterialPair.coerce(pair, rho1, rho2)
    eta_arr = np.atleast_1d(np.asarray(eta, dtype=float))
    if np.any(eta_arr <= 0):
        raise ValueError("the diffractive density is defined for eta > 0")
    val, _ = _slice(lambda t, y, w, wc: _diff_kernel_general(model, t, y, w, wc), eta_arr, rtol,
                    lambda y: 1.0)
    out = val / (2.0 * eta_arr)
    return out if np.ndim(eta) else float(out[0])


def geo_density(pair, u, eta, rtol=1e-12):
    """Geometric correction density for PEMC surfaces (dimensionless)."""
    model = MaterialPair.coerce(pair)
    if not 0 <= u <= 0.25:
        raise ValueError("u must lie in [0, 1/4]")
    if np.any(np.asarray(eta) <= 0):
        raise ValueError("the geometric density is defined for eta > 0")
    val, _ = _slice(lambda t, y, w, wc: _geo_kernel(model, u, t, y, w, wc), eta, rtol,
                    lambda y: 1.0 / y)
    out = val / 12.0
    return out if np.ndim(eta) else float(out[0])


# ------------------------------------------------------ zero-temperature sums

def pfa_energy(pair, rtol=1e-10):
    """Zero-temperature PFA energy in units of ``hbar c R_eff/L**2``.

    Returns ``(value, error_estimate)``.
    """
    model = MaterialPair.coerce(pair)
    val, err = integrate_unit_decay(lambda t, y, w, wc: y * _pfa_kernel(model, t, y, w, wc), rtol=rtol,
                                    t_breaks=model.t_breaks())
    return float(-val / (4 * math.pi)), float(err / (4 * math.pi))


def diff_energy(pair, rtol=1e-10, general=False, rho1=0.5, rho2=0.5):
    """Zero-temperature diffractive energy in units of ``hbar c/L``.

    ``general=True`` integrates the eigenvalue form with ``alpha0``,
    ``alpha1`` from the reflection data instead of the PEMC reduction.
    """
    model = MaterialPair.coerce(pair, rho1, rho2)
    if general or model.pemc_delta is None:
        def f(t, y, w, wc):
            return _diff_kernel_general(model, t, y, w, wc) / t
    else:
        def f(t, y, w, wc):
            return _diff_kernel_pemc(model, t, y, w, wc)
    val, err = integrate_unit_decay(f, rtol=rtol, t_breaks=model.t_breaks())
    return float(val / (4 * math.pi)), float(err / (4 * math.pi))


def geo_energy(pair, u, rtol=1e-10):
    """Zero-temperature geometric correction in units of ``hbar c/L`` (PEMC)."""
    model = MaterialPair.coerce(pair)
    if model.pemc_delta is None:
        raise ValueError("the geometric correction is implemented for PEMC pairs")
    val, err = integrate_unit_decay(lambda t, y, w, wc: _geo_kernel(model, u, t, y, w, wc), rtol=rtol)
    return float(val / (24 * math.pi)), float(err / (24 * math.pi))


# ------------------------------------------------------------ public drivers

def matsubara_parameter(T, L):
    """``tau = 2 pi k_B T L/(hbar c)``, the Matsubara spacing in units of c/L."""
    return 2.0 * math.pi * K_B * T * L / (hbar * C_LIGHT)


def _matsubara_sum(density, tau, rtol=1e-12, chunk=4096, n_cap=10_000_000):
    total = 0.5 * float(density(np.array([0.0]))[0])
    n0 = 1
    while True:
        if n0 > n_cap:
            raise ConvergenceError("Matsubara sum did not converge")
        n = np.arange(n0, n0 + chunk)
        vals = density(n * tau)
        total += float(np.sum(vals))
        if abs(vals[-1]) < rtol * abs(total) or vals[-1] == 0:
            break
        n0 += chunk
    return tau / (2 * math.pi) * total


def casimir_energy_pfa(geom, pair, T=0.0, rtol=1e-10, method="auto"):
    """PFA (free) energy of two spheres.

    Parameters
    ----------
    geom : Geometry
    pair : float, PemcPair, tuple or MaterialPair
    T : float
        Temperature in kelvin. ``T = 0`` integrates over frequencies;
        ``T > 0`` sums Matsubara frequencies with the zero term at half weight.
    method : {"auto", "quadrature", "closed"}
        How each Matsubara slice is evaluated. ``auto`` uses the closed
        polylogarithm form for PEMC pairs and quadrature otherwise.

    Returns
    -------
    dict
        ``value`` in units of ``hbar c R_eff/L**2``, ``si`` in joule,
        ``error`` (quadrature estimate) and ``tau``.
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")
    model = MaterialPair.coerce(pair, *geom.rho)
    scale = hbar * C_LIGHT * geom.R_eff / geom.L ** 2
    if T == 0:
        val, err = pfa_energy(model, rtol=rtol)
        return {"value": val, "si": val * scale, "error": err, "tau": 0.0}
    tau = matsubara_parameter(T, geom.L)
    if method == "auto":
        method = "closed" if model.pemc_delta is not None else "quadrature"
    if method == "closed":
        if model.pemc_delta is None:
            raise ValueError("closed slices exist only for PEMC pairs")
        delta = model.pemc_delta

        def density(eta):
            return pfa_density_closed(delta, eta)
    elif method == "quadrature":
        def density(eta):
            return pfa_density(model, eta, rtol=1e-12)
    else:
        raise ValueError(f"unknown method {method!r}")
    val = _matsubara_sum(density, tau, chunk=4096 if method == "closed" else 256)
    return {"value": val, "si": val * scale, "error": 0.0, "tau": tau}


def casimir_energy_with_corrections(geom, pair, rtol=1e-10):
    """Zero-temperature PFA energy with diffractive and geometric corrections.

    Returns
    -------
    EnergyBreakdown
    """
    model = MaterialPair.coerce(pair, *geom.rho)
    if model.pemc_delta is None:
        raise ValueError("corrections are implemented for PEMC pairs")
    e_pfa, err_pfa = pfa_energy(model, rtol=rtol)
    e_diff, err_diff = diff_energy(model, rtol=rtol)
    e_geo, err_geo = geo_energy(model, geom.u, rtol=rtol)
    if abs(e_pfa) < 1e-12:
        b_diff = b_geo = b1 = math.nan
    else:
        b_diff, b_geo = e_diff / e_pfa, e_geo / e_pfa
        b1 = b_diff + b_geo
    return EnergyBreakdown(
        e_pfa=e_pfa, e_diff=e_diff, e_geo=e_geo,
        beta_diff=b_diff, beta_geo=b_geo, beta1=b1,
        e_pfa_si=e_pfa * hbar * C_LIGHT * geom.R_eff / geom.L ** 2,
        e1_si=(e_diff + e_geo) * hbar * C_LIGHT / geom.L,
        errors={"e_pfa": err_pfa, "e_diff": err_diff, "e_geo": err_geo},
    )
