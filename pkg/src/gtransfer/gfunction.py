"""Littlewood-Paley g-functions of the Poisson semigroups.

With ``f = sum c_k phihat_k`` and ``r_k = sqrt(lam_k)`` the t-integral in

    g f(x)^2 = int_0^inf t |(d/dt P_t f, delta P_t f)(x)|^2 dt

is done in closed form term by term (``int t e^{-ta} dt = 1/a^2``), giving

    g1(x) = sum_{n,m>=1} c_n c_m w(n,m) phihat_n(x) phihat_m(x),
    g2(x) = sum_{n,m>=1} c_n c_m u(n,m) delta phihat_n(x) delta phihat_m(x),

with ``w = r_n r_m/(r_n + r_m)^2`` and ``u = 1/(r_n + r_m)^2``.  ``g`` is the
square root of ``g1 + g2``.  Each part has L^2 energy ``(1/4) sum_{k>=1} c_k^2``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate

from ._kernels import bilinear_rows
from .measure import gauss_rule, lp_norm, measure_for
from .orthopoly import (
    eigenvalues,
    natural_derivative_weight,
    orthonormal_shift_factors,
    orthonormal_table,
    shifted_family,
)
from .spectral import expand, poisson_space_derivative, poisson_time_derivative, reconstruct

NEG_RADICAND_TOL = 1e-12
CHOP_RTOL = 1e-13


class NegativeRadicandError(ArithmeticError):
    """g1 + g2 came out clearly negative: a series or normalization bug."""


@dataclass(frozen=True)
class ClosedFormWeight:
    """The time-part (w) and space-part (u) kernel weights for n, m = 0..N."""

    w: np.ndarray
    u: np.ndarray


@dataclass(frozen=True)
class GFunctionDecomposition:
    """g1 and g2 at x; ``scale`` bounds the size of the summed terms."""

    x: np.ndarray
    time_part: np.ndarray
    space_part: np.ndarray
    scale: np.ndarray = None

    @property
    def g(self):
        return _safe_sqrt(self.time_part + self.space_part, self.scale)


@dataclass(frozen=True)
class GFunctionResult:
    nodes: np.ndarray
    values: np.ndarray
    l2_norm: float
    lp_norms: dict


def closed_form_weights(family, N, antidiagonal=None):
    """w(n,m), u(n,m) on 0..N; row/column 0 are zero (the constant mode).

    ``antidiagonal`` keeps only entries with ``n + m <= antidiagonal``
    (the Cauchy-product truncation).
    """
    r = np.sqrt(eigenvalues(family, N))
    s = r[:, None] + r[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(s > 0, 1.0 / (s * s), 0.0)
    w = r[:, None] * r[None, :] * u
    u[0, :] = 0.0
    u[:, 0] = 0.0
    if antidiagonal is not None:
        n = np.arange(N + 1)
        keep = (n[:, None] + n[None, :]) <= antidiagonal
        w = np.where(keep, w, 0.0)
        u = np.where(keep, u, 0.0)
    return ClosedFormWeight(np.ascontiguousarray(w), np.ascontiguousarray(u))


def _safe_sqrt(radicand, scale=None):
    """sqrt of g1 + g2, clamping negatives down to -1e-12 (relative to ``scale`` if larger)."""
    radicand = np.asarray(radicand, dtype=float)
    tol = NEG_RADICAND_TOL
    if scale is not None:
        tol = NEG_RADICAND_TOL * np.maximum(1.0, scale)
    if np.any(radicand < -tol):
        raise NegativeRadicandError(f"g radicand reached {radicand.min():.3e}")
    return np.sqrt(np.maximum(radicand, 0.0))


def g_parts(c, x, antidiagonal=None, weights=None):
    """Time and space parts g1(x), g2(x) of the squared g-function.

    Parameters
    ----------
    c : SpectralCoefficients
    x : array_like
        Points interior to the family's domain.
    antidiagonal : int, optional
        Keep only terms with n + m <= antidiagonal.
    weights : ClosedFormWeight, optional
        Precomputed weights (must match ``c.N`` and ``antidiagonal``).
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    fam = c.family
    if weights is None:
        weights = closed_form_weights(fam, c.N, antidiagonal)
    basis = orthonormal_table(fam, c.N, flat)
    A = np.ascontiguousarray(basis * c.coeffs)
    g1 = bilinear_rows(A, weights.w)
    if c.N >= 1:
        kappa = orthonormal_shift_factors(fam, c.N)
        shifted = orthonormal_table(shifted_family(fam), c.N - 1, flat)
        B = np.zeros_like(A)
        B[:, 1:] = shifted * (kappa * c.coeffs)[1:]
        s = natural_derivative_weight(fam, flat)
        g2 = s * s * bilinear_rows(np.ascontiguousarray(B), weights.u)
        scale = (np.max(weights.w) * np.sum(np.abs(A), axis=1) ** 2
                 + s * s * np.max(weights.u) * np.sum(np.abs(B), axis=1) ** 2)
    else:
        g2 = np.zeros_like(g1)
        scale = np.zeros_like(g1)
    return GFunctionDecomposition(x, g1.reshape(x.shape), g2.reshape(x.shape),
                                  scale.reshape(x.shape))


def g_pointwise(c, x, antidiagonal=None):
    """g f(x) = sqrt(g1(x) + g2(x))."""
    out = g_parts(c, x, antidiagonal).g
    return float(out) if out.ndim == 0 else out


def g_l2_parts(c):
    """Closed-form L^2 energies of the time and space parts (equal)."""
    quarter = 0.25 * math.fsum(c.coeffs[1:] ** 2)
    return quarter, quarter


def g_l2_norm(c):
    """||g f||_2 = sqrt((1/2) sum_{k>=1} c_k^2)."""
    return math.sqrt(sum(g_l2_parts(c)))


def g_lp_norm(c, p, rule):
    """Quadrature L^p norm of g f over ``rule`` (p > 1)."""
    if p <= 1:
        raise ValueError("p must exceed 1")
    return lp_norm(lambda x: g_pointwise(c, x), p, rule)


def g_result(c, rule, p_grid=(2.0,)):
    values = g_pointwise(c, rule.nodes)
    norms = {float(p): math.fsum(rule.weights * values ** p) ** (1.0 / p) for p in p_grid}
    return GFunctionResult(rule.nodes, values, g_l2_norm(c), norms)


def g_squared_by_time_quadrature(c, x, epsabs=1e-13, epsrel=1e-12):
    """int_0^inf t |grad P_t f(x)|^2 dt by adaptive quadrature in t.

    Independent of the closed-form weights; used to validate them.
    """
    fam = c.family
    s = float(natural_derivative_weight(fam, x))

    def integrand(t):
        dt = reconstruct(poisson_time_derivative(c, t), x)
        dx = s * reconstruct(poisson_space_derivative(c, t), x)
        return t * (dt * dt + dx * dx)

    val, _ = sp_integrate.quad(integrand, 0.0, np.inf, epsabs=epsabs, epsrel=epsrel, limit=400)
    return val


def chop(c, rtol=CHOP_RTOL):
    """Zero coefficients below ``rtol * max|c_k|`` (quadrature rounding noise)."""
    coeffs = np.array(c.coeffs)
    top = float(np.max(np.abs(coeffs)))
    coeffs[np.abs(coeffs) <= rtol * top] = 0.0
    return c.with_coeffs(coeffs)


def g_ratio_report(corpus, family, p_grid, N=64, order=None, chop_rtol=CHOP_RTOL):
    """Empirical ratios ||g f||_p / ||f||_p over a corpus.

    Parameters
    ----------
    corpus : dict
        Name -> vectorised function.
    family : FamilySpec
    p_grid : sequence of float
    N : int
        Truncation degree of the expansions.
    order : int, optional
        Quadrature order, default ``max(64, N + 16)``.
    chop_rtol : float
        Coefficients below ``chop_rtol * max|c_k|`` are zeroed before g is
        evaluated.  Far Gauss nodes amplify rounding noise in high modes
        (by ~e^{y/2} for Laguerre), which p > 2 does not damp.

    Returns
    -------
    dict with ``rows`` (name, p, g_norm, f_norm, ratio) and ``max_ratio`` per p.
    """
    if not corpus:
        raise ValueError("corpus must be nonempty")
    if order is None:
        order = max(64, N + 16)
    rule = gauss_rule(measure_for(family), order)
    rows = []
    max_ratio = {float(p): 0.0 for p in p_grid}
    for name, f in corpus.items():
        c = expand(f, family, N, rule)
        if chop_rtol:
            c = chop(c, chop_rtol)
        gvals = g_pointwise(c, rule.nodes)
        fvals = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
        for p in p_grid:
            gn = math.fsum(rule.weights * gvals ** p) ** (1.0 / p)
            fn = math.fsum(rule.weights * np.abs(fvals) ** p) ** (1.0 / p)
            ratio = gn / fn if fn > 0 else 0.0
            rows.append((name, float(p), gn, fn, ratio))
            max_ratio[float(p)] = max(max_ratio[float(p)], ratio)
    return {"rows": rows, "max_ratio": max_ratio, "N": N, "order": order}
