"""Real-valued special functions used by the channel statistics and error analysis.

All kernels operate in double precision and accept scalars or numpy arrays.
They are thin, domain-checked wrappers around scipy's cephes/AMOS routines,
which comfortably meet the accuracy targets (J0 abs err <= 1e-12 on |x| <= 100,
K0 and E1 rel err <= 1e-10 on their working ranges, Q abs err <= 1e-12).
"""

import numpy as np
from scipy import special as _sp

__all__ = [
    "bessel_j0",
    "bessel_k0",
    "exp_integral_e1",
    "gaussian_q",
    "exp_e1_scaled",
]

_SQRT2 = np.sqrt(2.0)


def _check_finite(x, name):
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name}: input must be finite")


def bessel_j0(x):
    """Bessel function of the first kind, order zero."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_j0")
    return _sp.j0(x)[()]


def bessel_k0(x):
    """Modified Bessel function of the second kind, order zero. Requires x > 0."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_k0")
    if np.any(x <= 0.0):
        raise ValueError("bessel_k0: x must be > 0 (K0 diverges at 0)")
    return _sp.k0(x)[()]


def exp_integral_e1(x):
    """Exponential integral E1(x) = int_x^inf exp(-t)/t dt. Requires x > 0."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "exp_integral_e1")
    if np.any(x <= 0.0):
        raise ValueError("exp_integral_e1: x must be > 0")
    return _sp.exp1(x)[()]


def gaussian_q(x):
    """Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2))."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "gaussian_q")
    return (0.5 * _sp.erfc(x / _SQRT2))[()]


def _exp_e1_cf(x, max_iter=200, tol=1e-15):
    """exp(x)*E1(x) by the modified Lentz continued fraction; stable for large x."""
    # e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- 9/(...))))
    tiny = 1e-300
    b = x + 1.0
    c = np.full_like(b, 1e300)
    d = 1.0 / b
    f = d.copy()
    for k in range(1, max_iter):
        a = -k * k
        b = b + 2.0
        d = 1.0 / np.maximum(np.abs(b + a * d), tiny) * np.sign(b + a * d)
        c = b + a / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        delta = c * d
        f = f * delta
        if np.all(np.abs(delta - 1.0) < tol):
            break
    return f


def exp_e1_scaled(x):
    """Fused exp(x)*E1(x), safe against overflow of exp(x) for large x."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "exp_e1_scaled")
    if np.any(x <= 0.0):
        raise ValueError("exp_e1_scaled: x must be > 0")
    shape = x.shape
    flat = np.atleast_1d(x).ravel()
    out = np.empty_like(flat)
    small = flat <= 50.0
    if np.any(small):
        out[small] = np.exp(flat[small]) * _sp.exp1(flat[small])
    if np.any(~small):
        out[~small] = _exp_e1_cf(flat[~small])
    return out.reshape(shape)[()]
