"""Inner loops: recurrences, Christoffel sums, bilinear forms, log-gamma.

Every kernel exists as an ``@njit`` loop (``_name_jit``) and a numpy
version (``_name_np``); the public name dispatches through
:func:`gtransfer._accel.dispatch`.  Both versions must agree to rounding;
``tests/test_kernels.py`` checks that.
"""

import math

import numpy as np

from ._accel import dispatch, njit

# Lanczos-type coefficients (g = 607/128, 14 terms); ~1e-15 relative for x > 0.
_LANCZOS_G = 5.24218750000000000
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS = np.array([
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
])
_SQRT_2PI = 2.5066282746310005

# Rescale threshold for the scaled recurrences; keeps squares finite.
_BIG = 1e100
_LOG_BIG = math.log(_BIG)


# ---------------------------------------------------------------------------
# three-term recurrence table
# ---------------------------------------------------------------------------

@njit
def _recurrence_table_jit(x, a, b, c, nmax):
    npts = x.shape[0]
    out = np.empty((npts, nmax + 1))
    for i in range(npts):
        xi = x[i]
        prev = 0.0
        cur = 1.0
        out[i, 0] = 1.0
        for n in range(nmax):
            nxt = (a[n] * xi + b[n]) * cur - c[n] * prev
            prev = cur
            cur = nxt
            out[i, n + 1] = cur
    return out


def _recurrence_table_np(x, a, b, c, nmax):
    """Values of phi_0..phi_nmax at ``x`` for
    ``phi_{n+1} = (a_n x + b_n) phi_n - c_n phi_{n-1}``, ``phi_0 = 1``."""
    out = np.empty((x.shape[0], nmax + 1))
    out[:, 0] = 1.0
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for n in range(nmax):
        prev, cur = cur, (a[n] * x + b[n]) * cur - c[n] * prev
        out[:, n + 1] = cur
    return out


recurrence_table = dispatch(_recurrence_table_jit, _recurrence_table_np)


# ---------------------------------------------------------------------------
# orthonormal recurrence with rescaling: Christoffel sums and Newton steps
# ---------------------------------------------------------------------------

@njit
def _christoffel_jit(x, alpha, sqrt_beta, m):
    npts = x.shape[0]
    log_sum = np.empty(npts)
    step = np.empty(npts)
    for i in range(npts):
        xi = x[i]
        p_prev = 0.0
        p_cur = 1.0
        d_prev = 0.0
        d_cur = 0.0
        s = 0.0
        log_scale = 0.0
        for k in range(m):
            s += p_cur * p_cur
            p_next = ((xi - alpha[k]) * p_cur - sqrt_beta[k] * p_prev) / sqrt_beta[k + 1]
            d_next = (p_cur + (xi - alpha[k]) * d_cur - sqrt_beta[k] * d_prev) / sqrt_beta[k + 1]
            p_prev = p_cur
            p_cur = p_next
            d_prev = d_cur
            d_cur = d_next
            mag = max(abs(p_cur), abs(d_cur))
            if mag > _BIG:
                p_prev /= _BIG
                p_cur /= _BIG
                d_prev /= _BIG
                d_cur /= _BIG
                s /= _BIG * _BIG
                log_scale += _LOG_BIG
        log_sum[i] = math.log(s) + 2.0 * log_scale
        step[i] = p_cur / d_cur
    return log_sum, step


def _christoffel_np(x, alpha, sqrt_beta, m):
    """For the orthonormal family with monic coefficients ``alpha``, ``beta``
    return ``log(sum_{k<m} p_k(x)^2)`` and the Newton step ``p_m/p_m'``."""
    p_prev = np.zeros_like(x)
    p_cur = np.ones_like(x)
    d_prev = np.zeros_like(x)
    d_cur = np.zeros_like(x)
    s = np.zeros_like(x)
    log_scale = np.zeros_like(x)
    for k in range(m):
        s += p_cur * p_cur
        t = x - alpha[k]
        p_next = (t * p_cur - sqrt_beta[k] * p_prev) / sqrt_beta[k + 1]
        d_next = (p_cur + t * d_cur - sqrt_beta[k] * d_prev) / sqrt_beta[k + 1]
        p_prev, p_cur, d_prev, d_cur = p_cur, p_next, d_cur, d_next
        big = np.maximum(np.abs(p_cur), np.abs(d_cur)) > _BIG
        if big.any():
            p_prev = np.where(big, p_prev / _BIG, p_prev)
            p_cur = np.where(big, p_cur / _BIG, p_cur)
            d_prev = np.where(big, d_prev / _BIG, d_prev)
            d_cur = np.where(big, d_cur / _BIG, d_cur)
            s = np.where(big, s / (_BIG * _BIG), s)
            log_scale = log_scale + np.where(big, _LOG_BIG, 0.0)
    return np.log(s) + 2.0 * log_scale, p_cur / d_cur


christoffel = dispatch(_christoffel_jit, _christoffel_np)


# ---------------------------------------------------------------------------
# row-wise bilinear form  sum_{n,m} A[p,n] A[p,m] W[n,m]
# ---------------------------------------------------------------------------

@njit
def _bilinear_rows_jit(A, W):
    # the product goes through BLAS; the row contraction is fused
    AW = np.dot(A, W)
    npts, ncols = A.shape
    out = np.empty(npts)
    for p in range(npts):
        acc = 0.0
        for n in range(ncols):
            acc += AW[p, n] * A[p, n]
        out[p] = acc
    return out


def _bilinear_rows_np(A, W):
    """``out[p] = A[p] @ W @ A[p]`` for symmetric ``W``."""
    return np.einsum("pn,pn->p", A @ W, A)


bilinear_rows = dispatch(_bilinear_rows_jit, _bilinear_rows_np)


# ---------------------------------------------------------------------------
# log-gamma
# ---------------------------------------------------------------------------

@njit
def _lgamma_jit(x):
    out = np.empty(x.shape[0])
    for i in range(x.shape[0]):
        xi = x[i]
        tmp = xi + _LANCZOS_G
        tmp = (xi + 0.5) * math.log(tmp) - tmp
        ser = _LANCZOS_C0
        y = xi
        for j in range(_LANCZOS.shape[0]):
            y += 1.0
            ser += _LANCZOS[j] / y
        out[i] = tmp + math.log(_SQRT_2PI * ser / xi)
    return out


def _lgamma_np(x):
    """Lanczos log-gamma for positive arguments."""
    tmp = x + _LANCZOS_G
    tmp = (x + 0.5) * np.log(tmp) - tmp
    ser = np.full_like(x, _LANCZOS_C0)
    for j, cj in enumerate(_LANCZOS):
        ser += cj / (x + (j + 1.0))
    return tmp + np.log(_SQRT_2PI * ser / x)


lgamma_array = dispatch(_lgamma_jit, _lgamma_np)
