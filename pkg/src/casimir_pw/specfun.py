r"""Special functions used throughout the package.

Polylogarithms are only ever needed at arguments :math:`w e^{i\phi}` with
:math:`0 \le w \le 1`, i.e. at the eigenvalues of a planar round-trip matrix.
The modified spherical Bessel functions and the Mie angular functions are
needed by the PEC Mie oracle, where magnitudes easily leave the double range,
so log-scaled variants are provided alongside the plain ones.
"""
import math

import numpy as np
from scipy.special import bernoulli, kv, zeta

__all__ = [
    "polylog",
    "polylog_complex",
    "bernoulli_poly",
    "bessel_k2",
    "bessel_half_integer",
    "log_bessel_i_half",
    "log_bessel_k_half",
    "angular_functions",
    "log_angular_functions",
]

# |w| below this is summed directly; 0.75**140 < 1e-17
_SERIES_RADIUS = 0.75
_SERIES_TERMS = 140
# terms of the expansion around w = 1; |mu| <= 3.16 < 2 pi
_LOG_TERMS = 90

_BERNOULLI = bernoulli(_LOG_TERMS + 10)


def bernoulli_poly(n, z):
    """Bernoulli polynomial B_n(z) for n = 1..4."""
    z = np.asarray(z, dtype=float)
    if n == 1:
        out = z - 0.5
    elif n == 2:
        out = z * z - z + 1.0 / 6.0
    elif n == 3:
        out = z * (z * (z - 1.5) + 0.5)
    elif n == 4:
        out = z * z * (z - 1.0) ** 2 - 1.0 / 30.0
    else:
        raise ValueError(f"Bernoulli polynomial of order {n} not supported (1..4)")
    return out[()] if out.ndim == 0 else out


def _zeta_int(s):
    # Riemann zeta at integer s != 1
    if s >= 2:
        return float(zeta(s))
    if s == 0:
        return -0.5
    m = -s
    return (-1) ** m * _BERNOULLI[m + 1] / (m + 1)


def _log_expansion_coeffs(n):
    coeffs = np.zeros(_LOG_TERMS)
    for k in range(_LOG_TERMS):
        if k == n - 1:
            continue
        coeffs[k] = _zeta_int(n - k) / math.factorial(k)
    return coeffs


_COEFF_CACHE = {}


def _li_near_one(n, mu):
    # Li_n(e^mu) = mu^(n-1)/(n-1)! [H_(n-1) - log(-mu)] + sum_{k != n-1} zeta(n-k) mu^k/k!
    coeffs = _COEFF_CACHE.get(n)
    if coeffs is None:
        coeffs = _COEFF_CACHE[n] = _log_expansion_coeffs(n)
    acc = np.zeros_like(mu)
    for c in coeffs[::-1]:
        acc = acc * mu + c
    harmonic = sum(1.0 / j for j in range(1, n))
    zero = mu == 0
    safe_mu = np.where(zero, 1.0, mu)
    sing = safe_mu ** (n - 1) / math.factorial(n - 1) * (harmonic - np.log(-safe_mu))
    return acc + np.where(zero, 0.0, sing)


def _li_series(n, w, phase):
    out = np.zeros(w.shape, dtype=complex)
    if w.size == 0:
        return out
    z = w * np.exp(1j * phase)
    power = np.ones_like(z)
    for m in range(1, _SERIES_TERMS + 1):
        power = power * z
        out += power / float(m) ** n
    return out


def polylog_complex(n, w, phase=0.0):
    r"""Complex polylogarithm :math:`\mathrm{Li}_n(w e^{i\phi})` for 0 <= w <= 1.

    Parameters
    ----------
    n : int
        Order, ``n >= 0``.
    w : float or ndarray
        Modulus of the argument. Negative values are mapped to ``|w|`` with the
        phase shifted by pi.
    phase : float or ndarray
        Argument phase in radians.

    Returns
    -------
    complex or ndarray of complex
    """
    if n < 0:
        raise ValueError("polylog order must be nonnegative")
    w, phase = np.broadcast_arrays(np.asarray(w, dtype=float), np.asarray(phase, dtype=float))
    neg = w < 0
    w = np.abs(w)
    phase = np.where(neg, phase + np.pi, phase)
    if np.any(w > 1.0):
        raise ValueError("polylog argument modulus must not exceed 1")
    # reduce phase to (-pi, pi]
    phase = np.pi - np.mod(np.pi - phase, 2.0 * np.pi)

    if n == 0:
        z = w * np.exp(1j * phase)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = z / (1.0 - z)
    elif n == 1:
        z = w * np.exp(1j * phase)
        with np.errstate(divide="ignore"):
            out = -np.log(1.0 - z)
    else:
        out = _li_reduced(n, w, phase)
    return out[()] if out.ndim == 0 else out


def _li_reduced(n, w, phase):
    # phase already in (-pi, pi]
    out = np.empty(w.shape, dtype=complex)
    small = w <= _SERIES_RADIUS
    out[small] = _li_series(n, w[small], phase[small])
    far = ~small & (np.abs(phase) > 2.0 * np.pi / 3.0)
    near = ~small & ~far
    if np.any(near):
        mu = np.log(w[near]) + 1j * phase[near]
        out[near] = _li_near_one(n, mu)
    if np.any(far):
        # duplication Li_n(z) = 2^(1-n) Li_n(z^2) - Li_n(-z) keeps |arg| <= 2 pi / 3
        wf, pf = w[far], phase[far]
        p2 = 2.0 * pf - np.copysign(2.0 * np.pi, pf)
        pm = pf - np.copysign(np.pi, pf)
        out[far] = 2.0 ** (1 - n) * _li_reduced(n, wf * wf, p2) - _li_reduced(n, wf, pm)
    return out


def polylog(n, w, phase=0.0):
    r"""Real part of :math:`\mathrm{Li}_n(w e^{i\phi})`.

    Equivalently :math:`\sum_{m\ge1} w^m \cos(m\phi)/m^n`, i.e. half the sum of the
    polylogarithms at a complex-conjugate pair of arguments. Exactly on the unit
    circle the even orders are taken from the Bernoulli closed form.

    Parameters
    ----------
    n : int
        Order. ``n >= 2`` is required at ``|w| = 1`` with zero phase.
    w : float or ndarray
        Modulus, ``|w| <= 1``.
    phase : float or ndarray
        Phase in radians.

    Returns
    -------
    float or ndarray

    Raises
    ------
    ValueError
        If ``|w| > 1``.
    """
    w_arr, ph_arr = np.broadcast_arrays(np.asarray(w, dtype=float), np.asarray(phase, dtype=float))
    if np.any(np.abs(w_arr) > 1.0):
        raise ValueError("polylog argument modulus must not exceed 1")
    out = np.real(np.asarray(polylog_complex(n, w_arr, ph_arr)))
    if n in (2, 4):
        unit = np.abs(w_arr) == 1.0
        if np.any(unit):
            ph = np.where(w_arr < 0, ph_arr + np.pi, ph_arr)
            z = np.mod(ph / (2.0 * np.pi), 1.0)
            # Re Li_n(e^{2 pi i z}) = -(2 pi i)^n B_n(z) / (2 n!)
            sign = -1.0 if n % 4 == 0 else 1.0
            closed = sign * (2.0 * np.pi) ** n * bernoulli_poly(n, z) / (2.0 * math.factorial(n))
            out = np.where(unit, closed, out)
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out


def bessel_k2(z):
    """Modified Bessel function of the second kind of order 2."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ValueError("bessel_k2 requires a positive argument")
    out = kv(2, z)
    return out[()] if out.ndim == 0 else out


def log_bessel_k_half(lmax, x):
    r"""Logarithms of :math:`k_\ell(x)`, ell = 0..lmax, with :math:`k_0 = \pi e^{-x}/2x`.

    Returns ``(log_k, q)`` where ``q[l] = k_{l+1}(x)/k_l(x)`` for l = 0..lmax-1.
    Upward recurrence on the ratio is stable for the dominant solution.
    """
    if x <= 0:
        raise ValueError("argument must be positive")
    q = np.empty(max(lmax, 0))
    log_k = np.empty(lmax + 1)
    log_k[0] = math.log(math.pi / 2.0) - x - math.log(x)
    if lmax == 0:
        return log_k, q
    ratio = 1.0 + 1.0 / x
    for l in range(lmax):
        if l > 0:
            ratio = 1.0 / ratio + (2 * l + 1) / x
        q[l] = ratio
        log_k[l + 1] = log_k[l] + math.log(ratio)
    return log_k, q


def log_bessel_i_half(lmax, x):
    r"""Logarithms of :math:`i_\ell(x)`, ell = 0..lmax, with :math:`i_0 = \sinh(x)/x`.

    Returns ``(log_i, rho)`` where ``rho[l] = i_l(x)/i_{l-1}(x)`` for l = 1..lmax
    (``rho[0]`` is unused). The ratios come from a downward (Miller-type)
    recurrence seeded well above ``max(lmax, x)``.
    """
    if x <= 0:
        raise ValueError("argument must be positive")
    top = max(lmax, int(x)) + 60 + int(math.sqrt(x))
    nu = top + 0.5
    ratio = x / (nu + math.sqrt(nu * nu + x * x))
    rho = np.empty(lmax + 1)
    rho[0] = np.nan
    for l in range(top, 0, -1):
        ratio = 1.0 / ((2 * l + 1) / x + ratio)
        if l <= lmax:
            rho[l] = ratio
    log_i = np.empty(lmax + 1)
    if x < 0.5:
        log_i[0] = math.log(math.sinh(x) / x)
    else:
        log_i[0] = x - math.log(2.0 * x) + math.log1p(-math.exp(-2.0 * x))
    if lmax > 0:
        log_i[1:] = log_i[0] + np.cumsum(np.log(rho[1:]))
    return log_i, rho


def bessel_half_integer(kind, l, x):
    r"""Modified spherical Bessel function :math:`i_\ell(x)` or :math:`k_\ell(x)`.

    ``kind`` is ``"first"`` (i) or ``"second"`` (k). Raises ``OverflowError``
    when the value is not representable; use :func:`log_bessel_i_half` or
    :func:`log_bessel_k_half` in that case.
    """
    if l < 0:
        raise ValueError("order must be nonnegative")
    if kind == "first":
        log_val = log_bessel_i_half(l, x)[0][l]
    elif kind == "second":
        log_val = log_bessel_k_half(l, x)[0][l]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if log_val > 709.0:
        raise OverflowError(f"{kind}-kind spherical Bessel value exceeds double range")
    return math.exp(log_val)


def angular_functions(lmax, mu):
    r"""Mie angular functions :math:`\pi_\ell(\mu)` and :math:`\tau_\ell(\mu)`.

    Parameters
    ----------
    lmax : int
        Largest order, ``lmax >= 1``.
    mu : float
        :math:`\cos\Theta`; at imaginary frequencies ``mu <= -1``.

    Returns
    -------
    pi, tau : ndarray
        Arrays of length ``lmax + 1``; index 0 holds zeros.
    """
    if lmax < 1:
        raise ValueError("lmax must be at least 1")
    pi = np.zeros(lmax + 1)
    tau = np.zeros(lmax + 1)
    pi[1] = 1.0
    for l in range(2, lmax + 1):
        pi[l] = ((2 * l - 1) * mu * pi[l - 1] - l * pi[l - 2]) / (l - 1)
    l = np.arange(1, lmax + 1)
    tau[1:] = l * mu * pi[1:] - (l + 1) * pi[:-1]
    return pi, tau


def log_angular_functions(lmax, mu):
    """Log-scaled angular functions.

    Returns ``(log_abs_pi, sign_pi, log_abs_tau, sign_tau)``, each of length
    ``lmax + 1`` (index 0 unused). The upward recurrence is renormalized
    whenever the magnitude grows past 1e150.
    """
    if lmax < 1:
        raise ValueError("lmax must be at least 1")
    log_pi = np.full(lmax + 1, -np.inf)
    sgn_pi = np.zeros(lmax + 1)
    log_tau = np.full(lmax + 1, -np.inf)
    sgn_tau = np.zeros(lmax + 1)

    scale = 0.0  # log of the common factor removed from prev/cur
    prev, cur = 0.0, 1.0
    log_pi[1], sgn_pi[1] = 0.0, 1.0
    tau1 = mu
    log_tau[1] = math.log(abs(tau1)) if tau1 != 0 else -np.inf
    sgn_tau[1] = math.copysign(1.0, tau1) if tau1 != 0 else 0.0
    for l in range(2, lmax + 1):
        nxt = ((2 * l - 1) * mu * cur - l * prev) / (l - 1)
        prev, cur = cur, nxt
        t = l * mu * cur - (l + 1) * prev
        if cur != 0:
            log_pi[l] = scale + math.log(abs(cur))
            sgn_pi[l] = math.copysign(1.0, cur)
        if t != 0:
            log_tau[l] = scale + math.log(abs(t))
            sgn_tau[l] = math.copysign(1.0, t)
        big = abs(cur)
        if big > 1e150:
            prev /= big
            cur /= big
            scale += math.log(big)
    return log_pi, sgn_pi, log_tau, sgn_tau
