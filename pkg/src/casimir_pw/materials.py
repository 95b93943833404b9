"""Plane reflection matrices and the planar round-trip matrix.

Polarization index 0 is TM and index 1 is TE throughout the package.
Saddle-point kinematics are parameterized by ``t = xi/(c kappa)`` in (0, 1],
so that the half-angle sine of the scattering angle is ``s = 1/t`` and the
half-angle cosine squared ``c2 = 1 - s**2`` is real and non-positive.
"""
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

__all__ = [
    "TM", "TE", "POLARIZATIONS",
    "SpectralPoint", "PemcPair", "RoundTripMatrix",
    "PEMC", "Dielectric", "PEC", "PMC",
    "plane_reflection_pemc", "plane_reflection_dielectric",
    "pemc_correction", "dielectric_correction",
    "roundtrip_matrix", "eigen_slots",
]

TM, TE = 0, 1
POLARIZATIONS = {"TM": TM, "TE": TE}


@dataclass(frozen=True)
class SpectralPoint:
    """Imaginary frequency ``xi`` (rad/s) and transverse wavenumber ``k`` (1/m)."""

    xi: float
    k: float

    def __post_init__(self):
        if self.xi < 0 or self.k < 0:
            raise ValueError("xi and k must be non-negative")

    @property
    def kappa(self):
        if self.xi == 0:
            return float(self.k)
        return float(np.hypot(self.xi / C_LIGHT, self.k))

    @property
    def t(self):
        """Ratio ``xi/(c kappa)`` in [0, 1]."""
        if self.xi == 0:
            return 0.0
        return self.xi / (C_LIGHT * self.kappa)

    @classmethod
    def from_t(cls, t, kappa):
        """Build the point with axial wavenumber ``kappa`` and ratio ``t``."""
        if not 0 <= t <= 1:
            raise ValueError("t must lie in [0, 1]")
        return cls(xi=C_LIGHT * kappa * t, k=kappa * np.sqrt(1.0 - t * t))


@dataclass(frozen=True)
class PemcPair:
    """Material angles of two PEMC surfaces, ordered so that theta2 >= theta1."""

    theta1: float
    theta2: float

    def __post_init__(self):
        for th in (self.theta1, self.theta2):
            if not 0.0 <= th <= 0.5 * np.pi:
                raise ValueError(f"PEMC angle {th!r} outside [0, pi/2]")
        if self.theta2 < self.theta1:
            raise ValueError("PEMC angles must satisfy theta2 >= theta1")

    @property
    def delta(self):
        return self.theta2 - self.theta1

    @classmethod
    def from_delta(cls, delta):
        return cls(0.0, float(delta))


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > 0.5 * np.pi)):
        raise ValueError("PEMC angle outside [0, pi/2]")
    return theta


def plane_reflection_pemc(theta):
    """Leading-order reflection matrix of a plane PEMC surface.

    Parameters
    ----------
    theta : float
        Material angle in [0, pi/2]; 0 is a perfect electric conductor and
        pi/2 a perfect magnetic conductor.

    Returns
    -------
    ndarray, shape (2, 2)
        Rows and columns ordered (TM, TE).
    """
    theta = float(_check_theta(theta))
    c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
    return np.array([[c2, -s2], [-s2, -c2]])


def _fresnel(n, t):
    t = np.asarray(t, dtype=float)
    n2 = n * n
    q = np.sqrt(1.0 + t * t * (n2 - 1.0))
    return (n2 - q) / (n2 + q), (1.0 - q) / (1.0 + q)


def plane_reflection_dielectric(n, sp):
    """Fresnel reflection matrix of a nonmagnetic dielectric at imaginary frequency.

    Parameters
    ----------
    n : float
        Refractive index, ``n > 1``; ``np.inf`` gives the PEC matrix.
    sp : SpectralPoint or float
        Spectral point, or directly the ratio ``t = xi/(c kappa)``.

    Returns
    -------
    ndarray, shape (2, 2)
        Diagonal matrix ``diag(r_TM, r_TE)``.
    """
    if not n > 1:
        raise ValueError("refractive index must exceed 1")
    t = sp.t if isinstance(sp, SpectralPoint) else float(sp)
    if np.isinf(n):
        return np.diag([1.0, -1.0])
    rtm, rte = _fresnel(n, t)
    return np.diag([float(rtm), float(rte)])


def pemc_correction(theta, t):
    """Coefficients of ``1/xi_tilde`` in the PEMC sphere reflection matrix.

    The sphere reflection is ``R + C/xi_tilde``; ``C`` is returned with the
    same (TM, TE) layout and a leading broadcast axis for array ``t``.
    """
    theta = float(_check_theta(theta))
    t = np.asarray(t, dtype=float)
    # 1/s = t, c2 = 1 - s^2; both coefficient families are odd powers of t
    a = 0.5 * t * (t * t - 2.0)          # (1 - 2 s^2)/(2 s^3)
    b = t * (t * t - 1.0)                # (1 - s^2)/s^3 = c2/s^3
    c2t, s2t = np.cos(2 * theta), np.sin(2 * theta)
    ctm = a * c2t - b * np.cos(theta) ** 2
    cte = -a * c2t - b * np.sin(theta) ** 2
    cx = 0.5 * s2t * t
    out = np.empty(t.shape + (2, 2))
    out[..., 0, 0] = ctm
    out[..., 1, 1] = cte
    out[..., 0, 1] = cx
    out[..., 1, 0] = cx
    return out


def dielectric_correction(n, t):
    """Relative diffractive corrections ``(s_TM, s_TE)`` of a dielectric sphere.

    Evaluated at ``s = 1/t``; for ``n = inf`` only the curvature terms remain.
    """
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = 1.0 / t
        c2 = 1.0 - s * s
        s3 = s ** 3
        ste = (1.0 - 2.0 * s * s) / (2.0 * s3)
        stm = -1.0 / (2.0 * s3)
        if np.isfinite(n):
            n2 = n * n
            root = np.sqrt(n2 - c2)
            ste = ste + 1.0 / (s * (c2 + s * root)) - (2 * n2 - c2) / (2 * root ** 3)
            d = n2 * s * s - c2
            stm = (stm + 1.0 / (s * (c2 - s * root))
                   - c2 / s3 * (2 * n2 * n2 * s * s - n2 * c2 * (1 + s * s - s ** 4) + c2 ** 3)
                   / ((n2 - c2) * d * d)
                   + n2 / (2 * root ** 3) * (2 * n2 * n2 - n2 * c2 * (1 + c2) - c2 * c2) / (d * d))
    zero = t == 0
    return np.where(zero, 0.0, stm), np.where(zero, 0.0, ste)


@dataclass(frozen=True)
class PEMC:
    """Perfect electromagnetic conductor with material angle ``theta``."""

    theta: float

    def __post_init__(self):
        _check_theta(self.theta)

    def reflection(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(plane_reflection_pemc(self.theta), t.shape + (2, 2)).copy()

    def correction(self, t):
        return pemc_correction(self.theta, t)


@dataclass(frozen=True)
class Dielectric:
    """Nonmagnetic dielectric with refractive index ``n > 1``."""

    n: float

    def __post_init__(self):
        if not self.n > 1:
            raise ValueError("refractive index must exceed 1")

    def reflection(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (2, 2))
        if np.isinf(self.n):
            out[..., 0, 0], out[..., 1, 1] = 1.0, -1.0
        else:
            out[..., 0, 0], out[..., 1, 1] = _fresnel(self.n, t)
        return out

    def correction(self, t):
        r = self.reflection(t)
        stm, ste = dielectric_correction(self.n, t)
        r[..., 0, 0] *= stm
        r[..., 1, 1] *= ste
        return r


PEC = PEMC(0.0)
PMC = PEMC(0.5 * np.pi)


def eigen_slots(m):
    """Eigenvalues of real 2x2 matrices as (modulus, phase) pairs.

    Parameters
    ----------
    m : array_like, shape (..., 2, 2)

    Returns
    -------
    rho, phi : ndarray, shape (..., 2)
        Moduli ``rho >= 0`` and phases in [0, pi] (negative real eigenvalues
        get phase pi). A complex-conjugate pair is returned as
        ``(rho, phi), (rho, -phi)``.
    """
    m = np.asarray(m, dtype=float)
    tr = m[..., 0, 0] + m[..., 1, 1]
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    disc = 0.25 * tr * tr - det
    real = disc >= 0
    sq = np.sqrt(np.where(real, disc, 0.0))
    # real branch, avoiding cancellation in the smaller root
    big = 0.5 * tr + np.copysign(sq, tr)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        small = np.where(big != 0, det / big, 0.5 * tr - np.copysign(sq, tr))
    mod_c = np.sqrt(np.where(real, 0.0, det))
    with np.errstate(divide="ignore", invalid="ignore"):
        cosphi = np.clip(np.where(real, 0.0, 0.5 * tr / np.where(real, 1.0, mod_c)), -1.0, 1.0)
    phi_c = np.arccos(cosphi)
    rho = np.stack([np.where(real, np.abs(big), mod_c), np.where(real, np.abs(small), mod_c)], axis=-1)
    phi = np.stack([np.where(real, np.where(big < 0, np.pi, 0.0), phi_c),
                    np.where(real, np.where(small < 0, np.pi, 0.0), -phi_c)], axis=-1)
    return rho, phi


@dataclass(frozen=True)
class RoundTripMatrix:
    """Planar round-trip matrix ``A0 = R1 R2 exp(-2 kappa L)``."""

    product: np.ndarray
    weight: float

    @property
    def matrix(self):
        return self.product * self.weight

    @property
    def trace(self):
        return float(np.trace(self.matrix))

    @property
    def det(self):
        return float(np.linalg.det(self.matrix))

    @property
    def polar(self):
        """Eigenvalues as ``(modulus, phase)`` arrays of length 2."""
        rho, phi = eigen_slots(self.product)
        return rho * self.weight, phi

    @property
    def eigenvalues(self):
        rho, phi = self.polar
        return rho * np.exp(1j * phi)


def roundtrip_matrix(R1m, R2m, kappaL):
    """Round-trip matrix between two planes at dimensionless distance ``kappaL``."""
    if not kappaL > 0:
        raise ValueError("kappaL must be positive")
    return RoundTripMatrix(np.asarray(R1m) @ np.asarray(R2m), float(np.exp(-2.0 * kappaL)))
