"""Polarization bookkeeping for round trips at the saddle point.

Matrices follow the (TM, TE) layout of :mod:`casimir_pw.materials` and may
carry leading batch axes. The sphere reflection matrices are written as
``R + C/xi_tilde_i`` with ``xi_tilde_i = xi R_i/c``; with
``rho_i = R_eff/R_i`` the single round trip becomes
``A = A0 + A1/xi_tilde_eff``.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from .materials import eigen_slots

__all__ = [
    "SingleRoundTrip", "AlphaCoefficients", "single_roundtrip", "alpha_coefficients",
    "p_function", "p_function_pemc", "diffractive_trace", "brute_force_roundtrips",
    "matrix_power_roundtrips", "h_coefficients", "generating_function_coefficients",
    "one_minus_eigen",
]


@dataclass(frozen=True)
class SingleRoundTrip:
    """Single round-trip matrices at one saddle point.

    Attributes
    ----------
    a : ndarray, shape (..., 2, 2)
        Leading matrix ``A0`` including the weight.
    a1 : ndarray, shape (..., 2, 2)
        Diffractive matrix ``A1`` including the weight (zero if no
        corrections were supplied).
    weight : ndarray
        ``exp(-2 kappa L)``.
    product : ndarray, shape (..., 2, 2)
        ``R1 R2`` without the weight; its eigenvalues have modulus <= 1.
    weight_c : ndarray, optional
        ``1 - weight`` computed without cancellation.
    r1, r2 : ndarray, optional
        The leading reflection matrices, kept for the path-enumeration oracle.
    """

    a: np.ndarray
    a1: np.ndarray
    weight: np.ndarray
    product: np.ndarray
    weight_c: np.ndarray = None
    r1: np.ndarray = None
    r2: np.ndarray = None


@dataclass(frozen=True)
class AlphaCoefficients:
    """Expansion coefficients of the diffractive trace."""

    alpha0: np.ndarray
    alpha1: np.ndarray
    weight: np.ndarray

    @property
    def alpha0_hat(self):
        """``alpha0`` with its single factor of the weight removed."""
        return self.alpha0 / self.weight

    @property
    def alpha1_hat(self):
        """``alpha1`` with its two factors of the weight removed."""
        return self.alpha1 / self.weight ** 2


def single_roundtrip(R1m, R2m, kappaL, C1=None, C2=None, rho1=0.5, rho2=0.5):
    """Assemble ``A0`` and ``A1`` for one saddle point.

    Parameters
    ----------
    R1m, R2m : array_like, shape (..., 2, 2)
        Leading reflection matrices of sphere 1 and 2.
    kappaL : array_like
        Dimensionless ``kappa L > 0``.
    C1, C2 : array_like, optional
        Coefficients of ``1/xi_tilde_i`` in the sphere reflection matrices.
    rho1, rho2 : float
        ``R_eff/R_1`` and ``R_eff/R_2``; they sum to one. A plane has
        ``rho = 0``.
    """
    kappaL = np.asarray(kappaL, dtype=float)
    if np.any(kappaL <= 0):
        raise ValueError("kappaL must be positive")
    w = np.exp(-2.0 * kappaL)
    R1m, R2m = np.asarray(R1m, dtype=float), np.asarray(R2m, dtype=float)
    prod = R1m @ R2m
    a = prod * w[..., None, None]
    a1 = np.zeros_like(a)
    if C1 is not None:
        a1 = a1 + rho1 * (np.asarray(C1) @ R2m) * w[..., None, None]
    if C2 is not None:
        a1 = a1 + rho2 * (R1m @ np.asarray(C2)) * w[..., None, None]
    return SingleRoundTrip(a=a, a1=a1, weight=w, product=prod, weight_c=-np.expm1(-2.0 * kappaL),
                           r1=R1m, r2=R2m)


def alpha_coefficients(srt):
    """``alpha0 = tr A1`` and ``alpha1 = tr(A0 A1) - tr A0 tr A1``."""
    a, a1 = srt.a, srt.a1
    alpha0 = a1[..., 0, 0] + a1[..., 1, 1]
    alpha1 = (-a[..., 0, 0] * a1[..., 1, 1] - a[..., 1, 1] * a1[..., 0, 0]
              + a[..., 0, 1] * a1[..., 1, 0] + a[..., 1, 0] * a1[..., 0, 1])
    return AlphaCoefficients(alpha0, alpha1, srt.weight)


def one_minus_eigen(rho, phi, w, wc):
    """``1 - lambda`` for ``lambda = rho w exp(i phi)`` without cancellation.

    ``wc`` must hold ``1 - w``; it is used where ``rho == 1``.
    """
    rw = rho * w
    one_minus_rw = np.where(rho == 1.0, wc, 1.0 - rw)
    re = one_minus_rw + 2.0 * rw * np.sin(0.5 * phi) ** 2
    return re - 1j * rw * np.sin(phi)


def _spectral_radius(srt):
    rho, _ = eigen_slots(srt.product)
    return np.max(rho, axis=-1) * srt.weight


def _det_one_minus(srt):
    # det(1 - w P) = wc**2 + wc w (d0 + d1) + w**2 (d0 d1 - p01 p10), d_i = 1 - p_ii,
    # so nothing cancels as w -> 1 or when P is close to the identity
    p, w = srt.product, srt.weight
    wc = srt.weight_c if srt.weight_c is not None else -np.expm1(np.log(w))
    d0, d1 = 1.0 - p[..., 0, 0], 1.0 - p[..., 1, 1]
    return wc * wc + wc * w * (d0 + d1) + w * w * (d0 * d1 - p[..., 0, 1] * p[..., 1, 0])


def p_function(srt, xi_tilde=None):
    """``P = -log det(1 - A0)``, optionally plus the diffractive trace over ``xi_tilde``."""
    if np.any(_spectral_radius(srt) >= 1):
        raise ValueError("spectral radius of the round-trip matrix must be below 1")
    out = -np.log(_det_one_minus(srt))
    if xi_tilde is not None:
        out = out + diffractive_trace(srt) / xi_tilde
    return out


def p_function_pemc(w, delta):
    """Closed form ``-log(1 - 2 w cos(2 delta) + w**2)``.

    Evaluated as ``-log[(1 - w)**2 + 4 w sin(delta)**2]``, which keeps full
    relative accuracy as ``w -> 1`` at small ``delta``.
    """
    w = np.asarray(w, dtype=float)
    wc = -np.expm1(np.log(w))
    return -np.log(wc * wc + 4.0 * w * np.sin(delta) ** 2)


def diffractive_trace(srt):
    """``tr[(1 - A0)^{-1} A1] = (alpha0 + alpha1)/[(1 - lambda1)(1 - lambda2)]``."""
    if np.any(_spectral_radius(srt) >= 1):
        raise ValueError("spectral radius of the round-trip matrix must be below 1")
    al = alpha_coefficients(srt)
    return (al.alpha0 + al.alpha1) / _det_one_minus(srt)


def _path_sum(r1, r2, r):
    total = 0.0
    for path in itertools.product((0, 1), repeat=2 * r):
        prod = 1.0
        for j in range(r):
            p_in = path[2 * j]
            q = path[2 * j + 1]
            p_out = path[(2 * j + 2) % (2 * r)]
            prod *= r1[p_out, q] * r2[q, p_in]
        total += prod
    return total


def brute_force_roundtrips(srt, r_max):
    """Sum over explicit polarization sequences, up to ``r_max`` round trips.

    Every closed sequence ``p_1 ... p_2r`` of reflections at the two
    surfaces is enumerated (4**r terms per round-trip count), so ``r_max``
    is limited to 8. Only the reflection matrices and the weight of ``srt``
    are used; ``srt`` must describe a single saddle point.
    """
    if not 1 <= r_max <= 8:
        raise ValueError("enumeration supports 1 <= r_max <= 8")
    if srt.r1 is None or srt.r2 is None:
        raise ValueError("the round trip does not carry its reflection matrices")
    r1, r2 = np.asarray(srt.r1, dtype=float), np.asarray(srt.r2, dtype=float)
    w = float(srt.weight)
    return sum(_path_sum(r1, r2, r) * w ** r / r for r in range(1, r_max + 1))


def matrix_power_roundtrips(a, r_max):
    """``sum_{r<=r_max} tr(A**r)/r`` by repeated multiplication (``r_max <= 30``)."""
    if not 1 <= r_max <= 30:
        raise ValueError("matrix-power oracle supports 1 <= r_max <= 30")
    a = np.asarray(a, dtype=float)
    power = np.eye(2)
    total = 0.0
    for r in range(1, r_max + 1):
        power = power @ a
        total += np.trace(power) / r
    return total


def h_coefficients(a, r_max):
    """Coefficients ``h_r`` from the single-round-trip recursion.

    Returns an array of shape ``(r_max, 2, 2)`` with ``h[r-1] = h_r``.
    """
    a = np.asarray(a, dtype=float)
    h = np.empty((r_max, 2, 2))
    h[0] = a
    for r in range(1, r_max):
        for po in range(2):
            for p in range(2):
                h[r, po, p] = a[po, 0] * h[r - 1, 0, p] + a[po, 1] * h[r - 1, 1, p]
    return h


def generating_function_coefficients(a, r_max):
    """Taylor coefficients of ``H(t)`` obtained from ``H = t A + t A H``.

    The fixed-point relation is iterated on truncated power series, so each
    pass fixes one more order; no recursion in ``r`` is used explicitly.
    """
    a = np.asarray(a, dtype=float)
    series = np.zeros((r_max + 1, 2, 2))
    for _ in range(r_max):
        shifted = np.zeros_like(series)
        # t * (A + A H): multiplication by t shifts orders by one
        shifted[1] = a
        shifted[2:] = np.einsum("ij,rjk->rik", a, series[1:-1])
        series = shifted
    return series[1:]
