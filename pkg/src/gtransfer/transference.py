"""Transference from the Jacobi setting to the Gaussian and Laguerre settings.

Two scaling maps carry functions on the limit spaces to [-1, 1]:

* Gaussian: ``f_lam(x) = f(sqrt(lam) x)`` against ``mu_{lam-1/2, lam-1/2}``,
* Laguerre: ``f_beta(x) = f(beta (1 - x)/2)`` against ``mu_{alpha, beta}``.

The experiments here sweep lam (or beta) and compare Jacobi-side norms,
inner products, polynomial values and g-norms with their limits.  The
windowed objects F, f, Omega and the truncated double series of the
g-function are also built here.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._accel import max_workers
from .gfunction import ClosedFormWeight, closed_form_weights, g_l2_norm, g_parts
from .loggamma import LOG_2, LOG_PI, lgamma, log_factorial, log_poch
from .measure import MeasureSpec, default_order, gauss_rule, integrate, measure_for
from .orthopoly import (
    FamilySpec,
    eval_poly,
    log_gegenbauer_conversion_factor,
    log_squared_norm,
    orthonormal_table,
    value_at_one,
)
from .spectral import expand

GAUSSIAN = "gaussian"
LAGUERRE = "laguerre"
DEFAULT_SWEEP = (1e2, 1e3, 1e4, 1e5)
ROUNDING_FLOOR = 1e-12


class WindowError(ValueError):
    """The window radius K is not inside the admissible range."""


class ResolutionError(RuntimeError):
    """The internal series cap is too small to resolve a tail."""


# ---------------------------------------------------------------------------
# scaling maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingMap:
    """``f -> f_lam`` (Gaussian) or ``f -> f_beta`` (Laguerre), supported on [-1, 1]."""

    direction: str
    param: float
    alpha: float = 0.0

    def __post_init__(self):
        if self.direction not in (GAUSSIAN, LAGUERRE):
            raise ValueError(f"unknown direction {self.direction!r}")
        if not self.param > 0:
            raise ValueError("scaling parameter must be positive")

    @classmethod
    def to_gaussian(cls, lam):
        return cls(GAUSSIAN, float(lam))

    @classmethod
    def to_laguerre(cls, alpha, beta):
        return cls(LAGUERRE, float(beta), float(alpha))

    def jacobi_family(self):
        if self.direction == GAUSSIAN:
            return FamilySpec.jacobi(self.param - 0.5, self.param - 0.5)
        return FamilySpec.jacobi(self.alpha, self.param)

    def limit_family(self):
        if self.direction == GAUSSIAN:
            return FamilySpec.hermite()
        return FamilySpec.laguerre(self.alpha)

    def to_limit(self, x):
        """Jacobi-side x to limit-side variable."""
        x = np.asarray(x, dtype=float)
        if self.direction == GAUSSIAN:
            return math.sqrt(self.param) * x
        return 0.5 * self.param * (1.0 - x)

    def from_limit(self, y):
        y = np.asarray(y, dtype=float)
        if self.direction == GAUSSIAN:
            return y / math.sqrt(self.param)
        return 1.0 - 2.0 * y / self.param


def scale_function(f, scaling):
    """The windowed composite ``x -> f(map(x)) chi_[-1,1](x)``."""

    def scaled(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) <= 1.0
        out = np.zeros(x.shape)
        vals = np.broadcast_to(np.asarray(f(scaling.to_limit(x[inside])), dtype=float),
                               x[inside].shape)
        out[inside] = vals
        return float(out) if out.ndim == 0 else out

    return scaled


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    name: str
    parameter: str
    values: tuple
    targets: tuple
    limits: tuple
    errors: tuple
    exponent: float = math.nan
    residual: float = math.nan
    meta: dict = field(default_factory=dict)

    def rows(self):
        return list(zip(self.values, self.targets, self.limits, self.errors))

    def strictly_decreasing(self):
        e = self.errors
        return all(b < a for a, b in zip(e, e[1:]))


def fit_decay(params, errors):
    """Least-squares slope and RMS residual of log(error) vs log(param).

    Zero errors (exact agreement) carry no rate information and are skipped;
    fewer than two usable points give NaN.
    """
    p = np.asarray(params, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = e > 0
    if keep.sum() < 2:
        return math.nan, math.nan
    lx, ly = np.log(p[keep]), np.log(e[keep])
    slope, icept = np.polyfit(lx, ly, 1)
    resid = math.sqrt(float(np.mean((ly - (slope * lx + icept)) ** 2)))
    return float(slope), resid


def sweep_map(fn, values, workers=None):
    """Evaluate ``fn`` over ``values`` in a thread pool; results keep input order."""
    values = list(values)
    if not values:
        return []
    workers = min(workers or max_workers(), len(values))
    if workers <= 1:
        return [fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, values))


def _report(name, parameter, values, pairs, **meta):
    targets = tuple(float(t) for t, _ in pairs)
    limits = tuple(float(l) for _, l in pairs)
    errors = tuple(abs(t - l) for t, l in zip(targets, limits))
    slope, resid = fit_decay(values, errors)
    return ConvergenceReport(name, parameter, tuple(float(v) for v in values), targets, limits,
                             errors, slope, resid, dict(meta))


def _scaling(direction, param, alpha):
    if direction == GAUSSIAN:
        return ScalingMap.to_gaussian(param)
    if direction == LAGUERRE:
        return ScalingMap.to_laguerre(alpha, param)
    raise ValueError(f"unknown direction {direction!r}")


def _param_name(direction):
    return "lambda" if direction == GAUSSIAN else "beta"


# ---------------------------------------------------------------------------
# norm and inner-product limits
# ---------------------------------------------------------------------------

def scaled_norm_squared(f, scaling, order=64):
    """||f_scaled||_2^2 under the Jacobi measure of ``scaling``."""
    rule = gauss_rule(measure_for(scaling.jacobi_family()), order)
    fs = scale_function(f, scaling)
    return integrate(lambda x: fs(x) ** 2, rule)


def limit_norm_squared(f, scaling, order=64):
    rule = gauss_rule(measure_for(scaling.limit_family()), order)
    return integrate(lambda y: np.asarray(f(y), dtype=float) ** 2, rule)


def norm_limit_experiment(f, direction=GAUSSIAN, sweep=DEFAULT_SWEEP, alpha=0.0, order=64,
                          squared=False):
    """Sweep ``||f_lam||_{2,lam}`` (or the beta analogue) against the limit norm.

    With ``squared=True`` the squared norms are reported instead.
    """
    power = 1.0 if squared else 0.5
    limit = limit_norm_squared(f, _scaling(direction, sweep[0] if sweep else 1.0, alpha), order)

    def point(v):
        target = scaled_norm_squared(f, _scaling(direction, v, alpha), order)
        return target ** power, limit ** power

    return _report("norm", _param_name(direction), sweep, sweep_map(point, sweep),
                   direction=direction, alpha=alpha, squared=squared)


def scaled_basis_values(scaling, k, x):
    """Jacobi-side comparison polynomial at x.

    Gaussian: ``lam^{-k/2} C_k^lam(x)``; Laguerre: ``P_k^{(alpha, beta)}(x)``.
    Both are built as orthonormal value times norm, in logs.
    """
    fam = scaling.jacobi_family()
    phihat = orthonormal_table(fam, k, x)[..., k]
    if scaling.direction == GAUSSIAN:
        lam = scaling.param
        log_scale = (0.5 * log_squared_norm(fam, k) - log_gegenbauer_conversion_factor(lam, k)
                     - 0.5 * k * math.log(lam))
    else:
        log_scale = 0.5 * log_squared_norm(fam, k)
    return phihat * math.exp(log_scale)


def limit_basis_values(scaling, k, y):
    """``H_k(y)/k!`` or ``L_k^alpha(y)``."""
    fam = scaling.limit_family()
    vals = eval_poly(fam, k, y)
    if scaling.direction == GAUSSIAN:
        vals = vals / math.exp(log_factorial(k))
    return vals


def inner_product_limit_experiment(f, k, direction=GAUSSIAN, sweep=DEFAULT_SWEEP, alpha=0.0,
                                   order=64):
    """Sweep ``<f_lam, lam^{-k/2} C_k^lam>`` (or ``<f_beta, P_k^{(a,b)}>``) against its limit."""
    lim_scaling = _scaling(direction, 1.0, alpha)
    lim_rule = gauss_rule(measure_for(lim_scaling.limit_family()), order)
    limit = integrate(lambda y: np.asarray(f(y), dtype=float)
                      * limit_basis_values(lim_scaling, k, y), lim_rule)

    def point(v):
        scaling = _scaling(direction, v, alpha)
        rule = gauss_rule(measure_for(scaling.jacobi_family()), order)
        fs = scale_function(f, scaling)
        target = integrate(lambda x: fs(x) * scaled_basis_values(scaling, k, x), rule)
        return target, limit

    return _report(f"inner_product_k{k}", _param_name(direction), sweep, sweep_map(point, sweep),
                   direction=direction, alpha=alpha, k=k)


# ---------------------------------------------------------------------------
# polynomial limits
# ---------------------------------------------------------------------------

def gegenbauer_scaled(n, x, lam):
    """``lam^{-n/2} C_n^lam(x/sqrt(lam))`` via the log-domain conversion factor."""
    fam = FamilySpec.jacobi(lam - 0.5, lam - 0.5)
    y = np.asarray(x, dtype=float) / math.sqrt(lam)
    p = eval_poly(fam, n, y)
    return p * math.exp(-log_gegenbauer_conversion_factor(lam, n) - 0.5 * n * math.log(lam))


def asymptotic_check_hermite(n, x, lam):
    """|lam^{-n/2} C_n^lam(x/sqrt(lam)) - H_n(x)/n!|."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    ref = eval_poly(FamilySpec.hermite(), n, x) / math.exp(log_factorial(n))
    return np.abs(gegenbauer_scaled(n, x, lam) - ref)


def asymptotic_check_laguerre(n, alpha, y, beta):
    """|P_n^{(alpha, beta)}(1 - 2y/beta) - L_n^alpha(y)|."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    y = np.asarray(y, dtype=float)
    jac = eval_poly(FamilySpec.jacobi(alpha, beta), n, 1.0 - 2.0 * y / beta)
    return np.abs(jac - eval_poly(FamilySpec.laguerre(alpha), n, y))


def polynomial_limit_experiment(n, points, direction=GAUSSIAN, sweep=(1e2, 1e3, 1e4), alpha=0.0):
    """Max over ``points`` of the polynomial-limit error, swept over lam or beta."""
    points = np.asarray(points, dtype=float)
    if direction == GAUSSIAN:
        ref = eval_poly(FamilySpec.hermite(), n, points) / math.exp(log_factorial(n))
    else:
        ref = eval_poly(FamilySpec.laguerre(alpha), n, points)
    # differences at this level are rounding, not approximation error
    floor = ROUNDING_FLOOR * max(1.0, float(np.max(np.abs(ref))))

    def point(v):
        if direction == GAUSSIAN:
            err = asymptotic_check_hermite(n, points, v)
        else:
            err = asymptotic_check_laguerre(n, alpha, points, v)
        err = float(np.max(err))
        return (err if err > floor else 0.0), 0.0

    return _report(f"polynomial_limit_n{n}", _param_name(direction), sweep,
                   sweep_map(point, sweep), direction=direction, alpha=alpha, n=n)


# ---------------------------------------------------------------------------
# g-norm transfer
# ---------------------------------------------------------------------------

def g_norm_squared_scaled(f, scaling, N=64, order=None):
    """``||g f_scaled||^2`` on the Jacobi side (closed form on the expansion)."""
    fam = scaling.jacobi_family()
    rule = gauss_rule(measure_for(fam), order or default_order(N))
    c = expand(scale_function(f, scaling), fam, N, rule)
    return g_l2_norm(c) ** 2


def g_norm_squared_limit(f, scaling, N=64, order=None):
    fam = scaling.limit_family()
    rule = gauss_rule(measure_for(fam), order or default_order(N))
    c = expand(f, fam, N, rule)
    return g_l2_norm(c) ** 2


def g_norm_transfer_experiment(f, direction=GAUSSIAN, sweep=DEFAULT_SWEEP, alpha=0.0, N=64,
                               order=None):
    """Sweep ``||g^{(lam-1/2,lam-1/2)} f_lam||^2`` (or the beta analogue) against ``||g f||^2``."""
    limit = g_norm_squared_limit(f, _scaling(direction, 1.0, alpha), N, order)

    def point(v):
        return g_norm_squared_scaled(f, _scaling(direction, v, alpha), N, order), limit

    return _report("g_norm_squared", _param_name(direction), sweep, sweep_map(point, sweep),
                   direction=direction, alpha=alpha, N=N)


# ---------------------------------------------------------------------------
# windowed objects
# ---------------------------------------------------------------------------

def log_Z(lam):
    """log Z(lam) = log[lam^{1/2} Gamma(lam)^2 2^{2 lam} / (2 pi Gamma(2 lam))]."""
    return (0.5 * math.log(lam) + 2.0 * lgamma(lam) + 2.0 * lam * LOG_2
            - math.log(2.0 * math.pi) - lgamma(2.0 * lam))


def log_Z_laguerre(alpha, beta):
    """log Z_{alpha,beta} = log[Gamma(a+b+2) / (Gamma(a+1) beta^{a+2} Gamma(beta))]."""
    return (lgamma(alpha + beta + 2) - lgamma(alpha + 1) - (alpha + 2) * math.log(beta)
            - lgamma(beta))


def log_omega(y, p, scaling):
    """log Omega(y); see :func:`windowed_objects`."""
    y = np.asarray(y, dtype=float)
    c = 0.5 - 1.0 / p
    if scaling.direction == GAUSSIAN:
        lam = scaling.param
        return c * (y * y + (lam - 0.5) * np.log1p(-y * y / lam))
    beta = scaling.param
    return c * (y + beta * np.log1p(-y / beta))


def omega_log_sup(p, scaling, K):
    """Exact sup of log Omega over the window.

    Gaussian side: ``log Omega = (1/2 - 1/p) B(y)`` with ``B`` increasing on
    [0, 1/sqrt 2] and decreasing after, so the sup sits at 0, min(K, 1/sqrt 2)
    or K.  Laguerre side: the bracket is decreasing and <= 0, so the sup is at
    0 or K.
    """
    _check_window(scaling, K)
    if scaling.direction == GAUSSIAN:
        cands = np.array([0.0, min(K, math.sqrt(0.5)), float(K)])
    else:
        cands = np.array([0.0, float(K)])
    return float(np.max(log_omega(cands, p, scaling)))


def _check_window(scaling, K):
    if K <= 0:
        raise WindowError("K must be positive")
    if scaling.direction == GAUSSIAN and not math.sqrt(scaling.param) > K:
        raise WindowError(f"need sqrt(lam) > K, got lam={scaling.param}, K={K}")
    if scaling.direction == LAGUERRE and not scaling.param > K:
        raise WindowError(f"need beta > K, got beta={scaling.param}, K={K}")


@dataclass(frozen=True)
class WindowedGObjects:
    scaling: ScalingMap
    K: float
    p: float
    log_Z: float
    y: np.ndarray
    g: np.ndarray
    F: np.ndarray
    f: np.ndarray
    omega: np.ndarray

    def factorization_error(self):
        """max |F - f Omega| / max(1, |F|)."""
        return float(np.max(np.abs(self.F - self.f * self.omega) / np.maximum(1.0, np.abs(self.F))))


def window_grid(scaling, K, n_grid):
    """Uniform grid on [-K, K] (Gaussian) or cell midpoints of (0, K) (Laguerre)."""
    if scaling.direction == GAUSSIAN:
        return np.linspace(-K, K, n_grid)
    return K * (np.arange(n_grid) + 0.5) / n_grid


def _log_weights(y, p, scaling):
    """log of the F and f reweighting factors."""
    if scaling.direction == GAUSSIAN:
        lam = scaling.param
        l1 = np.log1p(-y * y / lam)
        return (lam / 2 - 0.25) * l1 + y * y / 2, (lam / p - 0.5 / p) * l1 + y * y / p
    beta = scaling.param
    l1 = np.log1p(-y / beta)
    return (beta / 2) * l1 + y / 2, (beta / p) * l1 + y / p


def windowed_objects(phi, scaling, K, p, N=64, n_grid=201, order=None):
    """F_{lam,K}, f_{lam,K}, Omega and Z on a grid of the window.

    Parameters
    ----------
    phi : callable
        Function on the limit space.
    scaling : ScalingMap
    K : float
        Window radius; needs sqrt(lam) > K (Gaussian) or beta > K (Laguerre).
    p : float
        Exponent entering f and Omega.
    N : int
        Truncation of the expansion of phi_scaled.
    """
    _check_window(scaling, K)
    fam = scaling.jacobi_family()
    rule = gauss_rule(measure_for(fam), order or default_order(N))
    c = expand(scale_function(phi, scaling), fam, N, rule)
    y = window_grid(scaling, K, n_grid)
    g = g_parts(c, scaling.from_limit(y)).g
    logF, logf = _log_weights(y, p, scaling)
    F = g * np.exp(logF)
    f = g * np.exp(logf)
    omega = np.exp(log_omega(y, p, scaling))
    if scaling.direction == GAUSSIAN:
        lz = log_Z(scaling.param)
    else:
        lz = log_Z_laguerre(scaling.alpha, scaling.param)
    return WindowedGObjects(scaling, float(K), float(p), lz, y, g, F, f, omega)


# ---------------------------------------------------------------------------
# truncated double series and its remainders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedSplit:
    N: int
    M: int
    y: np.ndarray
    FN: np.ndarray
    tail_time: float
    tail_space: float
    scheme: str


def _tail_norms(c, scaling, N, K, y_rule, scheme):
    y, wy = y_rule
    x = scaling.from_limit(y)
    if scaling.direction == GAUSSIAN:
        lam = scaling.param
        log_w = (lam - 0.5) * np.log1p(-y * y / lam) + y * y
        log_mu = -y * y - 0.5 * LOG_PI
    else:
        beta, a = scaling.param, scaling.alpha
        log_w = beta * np.log1p(-y / beta) + y
        log_mu = a * np.log(y) - y - lgamma(a + 1)
    W = np.exp(log_w)
    full = g_parts(c, x)
    weights = closed_form_weights(c.family, c.N)
    if scheme == "antidiagonal":
        keep = np.add.outer(np.arange(c.N + 1), np.arange(c.N + 1)) <= N
    else:
        keep = np.maximum.outer(np.arange(c.N + 1), np.arange(c.N + 1)) <= N
    trunc = g_parts(c, x, weights=ClosedFormWeight(np.ascontiguousarray(weights.w * keep),
                                                   np.ascontiguousarray(weights.u * keep)))
    H1 = (full.time_part - trunc.time_part) * W
    H2 = (full.space_part - trunc.space_part) * W
    dens = wy * np.exp(log_mu)
    t1 = math.sqrt(math.fsum(dens * H1 * H1))
    t2 = math.sqrt(math.fsum(dens * H2 * H2))
    FN = (trunc.time_part + trunc.space_part) * W
    return FN, t1, t2


def truncated_g_split(phi, scaling, K, N, M=None, n_y=128, scheme="antidiagonal",
                      check_resolution=True, resolution_rtol=1e-2):
    """Truncated squared windowed g-series and the L^2 norms of its two remainders.

    ``F^N`` keeps the terms of the Cauchy-product double series with
    ``n + m <= N`` (``scheme="antidiagonal"``) or ``max(n, m) <= N``
    (``scheme="box"``).  The remainders are the time and space blocks of
    ``(F_{lam,K})^2 - F^N`` with the series itself summed to degree ``M``
    (default 4N).  Norms are taken against gamma (Gaussian side) or
    mu_alpha (Laguerre side) restricted to the window.

    Returns
    -------
    TruncatedSplit
    """
    if scheme not in ("antidiagonal", "box"):
        raise ValueError(f"unknown truncation scheme {scheme!r}")
    _check_window(scaling, K)
    N = int(N)
    M = int(M) if M is not None else 4 * N
    if M < N:
        raise ValueError("M must be >= N")
    fam = scaling.jacobi_family()
    rule = gauss_rule(measure_for(fam), default_order(M))
    leg = gauss_rule(MeasureSpec.jacobi_beta(0.0, 0.0), n_y)
    if scaling.direction == GAUSSIAN:
        y_rule = (K * leg.nodes, 2.0 * K * leg.weights)
    else:
        y_rule = (0.5 * K * (leg.nodes + 1.0), K * leg.weights)
    c = expand(scale_function(phi, scaling), fam, M, rule)
    FN, t1, t2 = _tail_norms(c, scaling, N, K, y_rule, scheme)
    if check_resolution and M >= 2 * N and M // 2 > N:
        half = c.with_coeffs(c.coeffs[: M // 2 + 1])
        _, h1, h2 = _tail_norms(half, scaling, N, K, y_rule, scheme)
        # absolute floor: tails at rounding level relative to the series itself
        atol = 1e-12 * max(1.0, float(np.max(np.abs(FN))))
        for full_t, half_t in ((t1, h1), (t2, h2)):
            if abs(full_t - half_t) > resolution_rtol * full_t + atol:
                raise ResolutionError(
                    f"tail not converged in the series cap: M={M} gives {full_t:.3e}, "
                    f"M/2 gives {half_t:.3e}")
    y = y_rule[0]
    return TruncatedSplit(N, M, y, FN, t1, t2, scheme)


# ---------------------------------------------------------------------------
# linearization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearizationRow:
    alpha: float
    beta: float
    m: int
    n: int
    i: np.ndarray
    nu: np.ndarray

    def as_dict(self):
        return {int(i): float(v) for i, v in zip(self.i, self.nu)}


def linearization_coeffs(alpha, beta, m, n, order=None, sum_tol=1e-10):
    """nu(i, m, n) with ``p_m p_n = sum_i nu(i, m, n) p_i``, ``p_j = P_j/P_j(1)``.

    Computed from the triple-product integral of orthonormal polynomials on
    a Gauss rule that is exact for degree 2(m + n).
    """
    m, n = int(m), int(n)
    if m < 0 or n < 0:
        raise ValueError("degrees must be nonnegative")
    fam = FamilySpec.jacobi(alpha, beta)
    need = m + n + 1
    order = need + 8 if order is None else int(order)
    if order < need:
        raise ValueError(f"quadrature order {order} < {need} needed for exactness")
    rule = gauss_rule(measure_for(fam), order)
    top = m + n
    table = orthonormal_table(fam, top, rule.nodes)
    i_vals = np.arange(abs(m - n), top + 1)
    prod = rule.weights * table[:, m] * table[:, n]
    triple = prod @ table[:, i_vals]

    def log_norm_over_one(j):
        return 0.5 * log_squared_norm(fam, j) - math.log(value_at_one(fam, j))

    scale = np.array([log_norm_over_one(m) + log_norm_over_one(n) - log_norm_over_one(i)
                      for i in i_vals])
    nu = triple * np.exp(scale)
    total = math.fsum(nu)
    if abs(total - 1.0) > sum_tol:
        raise ArithmeticError(f"linearization sum {total!r} differs from 1 beyond {sum_tol}")
    return LinearizationRow(float(alpha), float(beta), m, n, i_vals, nu)


# ---------------------------------------------------------------------------
# Stirling ratio
# ---------------------------------------------------------------------------

def _log_gamma_shift(x, j):
    """log Gamma(x + j) / Gamma(x) for integer j (either sign)."""
    if j >= 0:
        return log_poch(x, j)
    return -log_poch(x + j, -j)


def stirling_ratio_check(lam, n, k):
    """Relative deviation of the exact gamma ratio from ``2^{2k-3n} lam^{n-1}(n+lam)/n!``.

    The exact side is
    ``Gamma(k-n+2l)^2 Gamma(n+l+1/2)^2 (n+l) / (Gamma(2l) Gamma(k-n+l+1/2)^2 n! l Gamma(n+2l))``.
    """
    if not 1 <= n <= k:
        raise ValueError("need 1 <= n <= k")
    log_exact = (_log_gamma_shift(2 * lam, k - n) + _log_gamma_shift(n + 2 * lam, k - 2 * n)
                 + 2.0 * _log_gamma_shift(k - n + lam + 0.5, 2 * n - k)
                 + math.log(n + lam) - log_factorial(n) - math.log(lam))
    log_asym = ((2 * k - 3 * n) * LOG_2 + (n - 1) * math.log(lam) + math.log(n + lam)
                - log_factorial(n))
    return abs(math.expm1(log_exact - log_asym))
