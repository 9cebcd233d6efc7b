"""Log-gamma and the gamma ratios used throughout the package.

Everything that is a ratio of gamma functions is evaluated as an
exponentiated difference of logs; raw gamma overflows near 171.
Ratios with an integer shift go through a finite product instead, which
keeps full relative accuracy even when both arguments are ~1e6.
"""

import math

import numpy as np

from ._kernels import lgamma_array

LOG_PI = math.log(math.pi)
LOG_2 = math.log(2.0)


def lgamma(x):
    """Natural log of Gamma(x) for x > 0 (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValueError("lgamma is defined here for finite x > 0 only")
    out = lgamma_array(np.atleast_1d(arr).ravel()).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def log_poch(x, n):
    """log of the Pochhammer symbol (x)_n = Gamma(x+n)/Gamma(x), integer n >= 0."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if x <= 0:
        raise ValueError("x must be positive")
    return math.fsum(math.log(x + j) for j in range(n))


def log_poch_scaled(x, n):
    """log((x)_n / x**n) = sum_j log1p(j/x); accurate for large x."""
    n = int(n)
    if x <= 0:
        raise ValueError("x must be positive")
    return math.fsum(math.log1p(j / x) for j in range(n))


def log_gamma_ratio(a, b):
    """log(Gamma(a)/Gamma(b)).  Uses a product when a - b is an integer."""
    d = a - b
    if d == int(d) and abs(d) <= 4096:
        d = int(d)
        if d >= 0:
            return log_poch(b, d)
        return -log_poch(a, -d)
    return lgamma(a) - lgamma(b)


def log_factorial(n):
    return lgamma(n + 1.0)


def log_binom(n, k):
    """log C(n, k) for real n > k - 1 > -1 and integer k >= 0."""
    return log_gamma_ratio(n + 1.0, n - k + 1.0) - log_factorial(k)
