"""Fixed-node quadrature rules shared by the spectral integrators.

All rules are deterministic: a given level always yields the same nodes, and
reductions are plain ``numpy`` sums in node order.
"""
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "ConvergenceError", "gauss_legendre", "tanh_sinh_unit", "integrate_exp_decay",
    "integrate_unit_decay",
]


class ConvergenceError(RuntimeError):
    """A quadrature or series failed to reach its tolerance."""


def gauss_legendre(n, a=0.0, b=1.0):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def tanh_sinh_unit(level, tmax=3.5):
    """Tanh-sinh nodes on (0, 1) with step 2**-level.

    Returns ``(x, one_minus_x, weights)``; the complement is returned
    separately so that integrands singular at 1 keep full precision.
    """
    h = 2.0 ** -level
    k = np.arange(-int(math.ceil(tmax / h)), int(math.ceil(tmax / h)) + 1)
    tau = k * h
    u = 0.5 * np.pi * np.sinh(tau)
    x = 0.5 * (1.0 + np.tanh(u))
    # 1 - x = 1/(1 + e^{2u}); evaluated without cancellation
    xc = np.exp(-np.logaddexp(0.0, 2.0 * u))
    x = np.exp(-np.logaddexp(0.0, -2.0 * u))
    w = h * 0.5 * np.pi * np.cosh(tau) * x * xc * 2.0
    keep = (x > 0.0) & (xc > 0.0) & (w > 0.0)
    return x[keep], xc[keep], w[keep]


def integrate_exp_decay(func, rtol=1e-12, atol=0.0, min_level=3, max_level=9):
    r"""Integrate ``func(y, w, wc)`` over y in [0, inf), ``w = exp(-2y)``, ``wc = 1 - w``.

    The substitution ``w = exp(-2y)`` maps the half line onto (0, 1), where a
    tanh-sinh rule absorbs the logarithmic endpoint singularities typical of
    polylogarithmic integrands at ``y -> 0``. ``func`` must accept arrays and
    may return extra leading axes (one integral per leading index).

    Returns
    -------
    value, error_estimate
    """
    prev = None
    for level in range(min_level, max_level + 1):
        w, wc, weight = tanh_sinh_unit(level)
        # y from whichever of w, 1 - w is represented more accurately
        small = w < 0.5
        y = np.empty_like(w)
        y[small] = -0.5 * np.log(w[small])
        y[~small] = -0.5 * np.log1p(-wc[~small])
        vals = func(y, w, wc)
        est = np.sum(vals * (weight / (2.0 * w)), axis=-1)
        if prev is not None:
            err = np.max(np.abs(est - prev))
            scale = np.max(np.abs(est))
            if err <= max(rtol * scale, atol):
                return est, err
        prev = est
    raise ConvergenceError(f"tanh-sinh did not converge by level {max_level} (last change {err:.3e})")


def _panel_rule(n, breaks):
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        x, wt = gauss_legendre(n, a, b)
        nodes.append(x)
        weights.append(wt)
    return np.concatenate(nodes), np.concatenate(weights)


def integrate_unit_decay(func, rtol=1e-10, atol=1e-16, nt_start=8, nt_max=256, t_breaks=None, **kwargs):
    """Integrate ``func(t, y, w, wc)`` over t in [0, 1] and y in [0, inf).

    ``t`` arrives with shape ``(nt, 1)`` and the y-node arrays with shape
    ``(ny,)``. Gauss-Legendre in t is nested inside the tanh-sinh rule in y;
    the t order is doubled until two successive results agree to ``rtol``.
    ``t_breaks`` (increasing, from 0 to 1) splits the t range into panels
    that each get the full Gauss-Legendre order.

    Returns
    -------
    value, error_estimate
    """
    prev = None
    nt = nt_start
    while nt <= nt_max:
        tn, tw = _panel_rule(nt, (0.0, 1.0) if t_breaks is None else t_breaks)

        def inner(y, w, wc, tn=tn, tw=tw):
            vals = func(tn[:, None], y, w, wc)
            return np.einsum("...ty,t->...y", vals, tw)

        est, err_y = integrate_exp_decay(inner, rtol=0.1 * rtol, atol=0.1 * atol, **kwargs)
        if prev is not None:
            err = np.max(np.abs(est - prev))
            if err <= max(rtol * np.max(np.abs(est)), atol):
                return est, err + err_y
        prev = est
        nt *= 2
    raise ConvergenceError(f"Gauss-Legendre in t did not converge with {nt_max} nodes")
