"""Normalized probability measures and Gauss rules against them.

Rules come from the symmetric tridiagonal (Jacobi) matrix of the measure's
monic recurrence.  Eigenvalues give the nodes; a Newton step on the
orthonormal recurrence then polishes them, and the weights are the
Christoffel numbers ``1 / sum_{k<m} phihat_k(x_i)^2``.  The Christoffel
sums are carried as logs, so weights that underflow (Hermite at high
order, Jacobi with parameters ~1e6) still have exact log values.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from ._kernels import christoffel
from .loggamma import LOG_2, LOG_PI, lgamma
from .orthopoly import FamilySpec, monic_recurrence

MAX_ORDER = 512

JACOBI_BETA = "jacobi_beta"
GAUSSIAN = "gaussian"
GAMMA = "gamma"


class QuadratureError(RuntimeError):
    """Rule construction failed (diagnostics in the message)."""


@dataclass(frozen=True)
class MeasureSpec:
    """One of the three probability measures.

    ``jacobi_beta(a, b)`` has density ``eta (1-x)^a (1+x)^b`` on (-1, 1),
    ``gaussian()`` has density ``exp(-x^2)/sqrt(pi)``, and ``gamma(a)`` has
    density ``x^a exp(-x)/Gamma(a+1)`` on (0, inf).
    """

    kind: str
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.kind not in (JACOBI_BETA, GAUSSIAN, GAMMA):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        # validation is shared with the polynomial family
        self.family()

    @classmethod
    def jacobi_beta(cls, alpha, beta):
        return cls(JACOBI_BETA, alpha, beta)

    @classmethod
    def gaussian(cls):
        return cls(GAUSSIAN)

    @classmethod
    def gamma(cls, alpha):
        return cls(GAMMA, alpha)

    def family(self):
        """Orthogonal family (Szegő normalization) of this measure."""
        if self.kind == JACOBI_BETA:
            return FamilySpec.jacobi(self.alpha, self.beta)
        if self.kind == GAUSSIAN:
            return FamilySpec.hermite()
        return FamilySpec.laguerre(self.alpha)

    @property
    def domain(self):
        return self.family().domain

    @property
    def log_normalization(self):
        """log of the constant making the weight a probability density."""
        if self.kind == JACOBI_BETA:
            a, b = self.alpha, self.beta
            return lgamma(a + b + 2) - lgamma(a + 1) - lgamma(b + 1) - (a + b + 1) * LOG_2
        if self.kind == GAUSSIAN:
            return -0.5 * LOG_PI
        return -lgamma(self.alpha + 1)

    def log_density(self, x):
        """log of the probability density; ``-inf`` outside the support."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, -np.inf)
        if self.kind == GAUSSIAN:
            return -x * x + self.log_normalization
        if self.kind == JACOBI_BETA:
            inside = np.abs(x) < 1
            xi = x[inside]
            out[inside] = (self.alpha * np.log1p(-xi) + self.beta * np.log1p(xi)
                           + self.log_normalization)
            return out
        inside = x > 0
        xi = x[inside]
        out[inside] = self.alpha * np.log(xi) - xi + self.log_normalization
        return out


def measure_for(family):
    """Measure a family is orthogonal against (Gegenbauer maps to its Jacobi measure)."""
    if family.kind in ("jacobi", "gegenbauer"):
        return MeasureSpec.jacobi_beta(*family.jacobi_params)
    if family.kind == "hermite":
        return MeasureSpec.gaussian()
    return MeasureSpec.gamma(family.alpha)


@dataclass(frozen=True)
class QuadratureRule:
    measure: MeasureSpec
    nodes: np.ndarray
    weights: np.ndarray
    log_weights: np.ndarray

    def __post_init__(self):
        for name in ("nodes", "weights", "log_weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def order(self):
        return self.nodes.shape[0]


def default_order(degree):
    """Rule order for objects of spectral degree <= ``degree``."""
    return max(64, int(degree) + 16)


def gauss_rule(measure, order, polish=3):
    """Gauss rule with ``order`` nodes for a probability measure.

    Parameters
    ----------
    measure : MeasureSpec
    order : int
        Number of nodes, 1 <= order <= 512.
    polish : int
        Maximum Newton refinement sweeps applied to the eigenvalue nodes.

    Returns
    -------
    QuadratureRule
    """
    order = int(order)
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must lie in [1, {MAX_ORDER}], got {order}")
    alpha, beta = monic_recurrence(measure.family(), order)
    sqrt_beta = np.sqrt(beta)
    if order == 1:
        nodes = alpha[:1].copy()
    else:
        try:
            nodes = eigh_tridiagonal(alpha, sqrt_beta[1:order], eigvals_only=True)
        except np.linalg.LinAlgError as exc:
            raise QuadratureError(f"tridiagonal eigensolver failed for {measure}, order {order}") from exc
    if not np.all(np.isfinite(nodes)):
        raise QuadratureError(f"non-finite nodes for {measure}, order {order}")

    # the recurrence wants sqrt_beta[0] as the coefficient of p_{-1} = 0; any value works
    sb = sqrt_beta.copy()
    sb[0] = 1.0
    for _ in range(polish):
        _, step = christoffel(nodes, alpha, sb, order)
        if not np.all(np.isfinite(step)):
            break
        nodes = nodes - step
        if np.max(np.abs(step) / np.maximum(np.abs(nodes), 1e-300)) < 1e-15:
            break
    nodes = np.sort(nodes)
    lo, hi = measure.domain
    if np.any(nodes <= lo) or np.any(nodes >= hi) or np.any(np.diff(nodes) <= 0):
        raise QuadratureError(f"nodes left the open domain or coalesced for {measure}, order {order}")

    log_sum, _ = christoffel(nodes, alpha, sb, order)
    log_w = -log_sum
    weights = np.exp(log_w)
    return QuadratureRule(measure, nodes, weights, log_w)


def integrate(f, rule):
    """Sum of ``w_i f(x_i)``; ``f`` is called once on the node array."""
    values = np.asarray(f(rule.nodes), dtype=float)
    if values.shape != rule.nodes.shape:
        values = np.broadcast_to(values, rule.nodes.shape)
    if not np.all(np.isfinite(values)):
        bad = rule.nodes[~np.isfinite(values)]
        raise ValueError(f"integrand is not finite at node(s) {bad[:5]}")
    return math.fsum(rule.weights * values)


def lp_norm(f, p, rule):
    """(integral of |f|^p)^(1/p) by quadrature, p >= 1."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return integrate(lambda x: np.abs(np.asarray(f(x), dtype=float)) ** p, rule) ** (1.0 / p)
