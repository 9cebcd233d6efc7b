"""Orthonormal expansions, heat and Poisson multipliers, the Jacobi heat kernel
and a numerical check of Bochner subordination.

Coefficients are always orthonormal: ``c_k = <f, phi_k> / ||phi_k||`` so that
``f = sum_k c_k phihat_k`` and ``||f||^2 = sum_k c_k^2``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .measure import MeasureSpec, gauss_rule, measure_for
from .orthopoly import (
    DEFAULT_DEGREE_CAP,
    FamilySpec,
    eigenvalues,
    log_squared_norm,
    orthonormal_shift_factors,
    orthonormal_table,
    shifted_family,
    value_at_one,
)

EXPAND_MARGIN = 16
KERNEL_TAIL_RTOL = 1e-14


class SemigroupKind(enum.Enum):
    HEAT = "heat"
    POISSON = "poisson"


class TruncationError(ValueError):
    """Truncation degree too small for the requested accuracy."""


@dataclass(frozen=True)
class SpectralCoefficients:
    family: FamilySpec
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coeffs must be a nonempty 1-d sequence")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def N(self):
        return self.coeffs.shape[0] - 1

    def with_coeffs(self, coeffs):
        return SpectralCoefficients(self.family, coeffs)

    def l2_norm(self):
        return math.sqrt(math.fsum(self.coeffs ** 2))

    def szego_coeffs(self):
        """Coefficients against the Szegő-normalized polynomials, ``<f, phi_k>/||phi_k||^2``."""
        log_h = np.array([log_squared_norm(self.family, k) for k in range(self.N + 1)])
        return self.coeffs * np.exp(-0.5 * log_h)


def from_szego_coeffs(family, a):
    """Inverse of :meth:`SpectralCoefficients.szego_coeffs`."""
    a = np.asarray(a, dtype=float)
    log_h = np.array([log_squared_norm(family, k) for k in range(a.shape[0])])
    return SpectralCoefficients(family, a * np.exp(0.5 * log_h))


def expand(f, family, N, rule, degree_cap=DEFAULT_DEGREE_CAP):
    """Orthonormal coefficients c_0..c_N of ``f`` by Gauss quadrature.

    Parameters
    ----------
    f : callable
        Vectorised function of the node array.
    family : FamilySpec
    N : int
        Truncation degree.
    rule : QuadratureRule
        Must be a rule for ``family``'s measure with order >= N + 16.
    """
    N = int(N)
    if N < 0:
        raise ValueError("N must be nonnegative")
    if rule.measure != measure_for(family):
        raise ValueError(f"rule measure {rule.measure} does not match {family.label()}")
    if rule.order < N + EXPAND_MARGIN:
        raise ValueError(f"rule order {rule.order} < N + {EXPAND_MARGIN} = {N + EXPAND_MARGIN}")
    values = np.broadcast_to(np.asarray(f(rule.nodes), dtype=float), rule.nodes.shape)
    if not np.all(np.isfinite(values)):
        raise ValueError("f is not finite at every quadrature node")
    basis = orthonormal_table(family, N, rule.nodes, degree_cap)
    return SpectralCoefficients(family, (rule.weights * values) @ basis)


def reconstruct(c, x, degree_cap=DEFAULT_DEGREE_CAP):
    """sum_k c_k phihat_k(x)."""
    x = np.asarray(x, dtype=float)
    out = orthonormal_table(c.family, c.N, x, degree_cap) @ c.coeffs
    return float(out) if out.ndim == 0 else out


def multipliers(family, N, kind, t):
    if t < 0:
        raise ValueError("t must be nonnegative")
    lam = eigenvalues(family, N)
    if SemigroupKind(kind) is SemigroupKind.HEAT:
        return np.exp(-t * lam)
    return np.exp(-t * np.sqrt(lam))


def semigroup_apply(c, kind, t):
    """Heat (e^{-t lam_k}) or Poisson (e^{-t sqrt(lam_k)}) multiplier."""
    return c.with_coeffs(c.coeffs * multipliers(c.family, c.N, kind, t))


def poisson_time_derivative(c, t):
    """Coefficients of d/dt P_t f: ``-sqrt(lam_k) e^{-t sqrt(lam_k)} c_k``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    root = np.sqrt(eigenvalues(c.family, c.N))
    return c.with_coeffs(-root * np.exp(-t * root) * c.coeffs)


def poisson_space_derivative(c, t):
    """Coefficients of d/dx P_t f in the derivative-shifted orthonormal family.

    The result has degree N-1 (a single zero for N = 0).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    target = shifted_family(c.family)
    if c.N == 0:
        return SpectralCoefficients(target, [0.0])
    decay = multipliers(c.family, c.N, SemigroupKind.POISSON, t)
    kappa = orthonormal_shift_factors(c.family, c.N)
    return SpectralCoefficients(target, (kappa * decay * c.coeffs)[1:])


# ---------------------------------------------------------------------------
# heat kernel
# ---------------------------------------------------------------------------

def _sup_orthonormal(family, n):
    """sup over [-1,1] of |phihat_n| for a Jacobi family with max(a, b) >= -1/2."""
    a, b = family.jacobi_params
    log_h = log_squared_norm(family, n)
    at_one = math.log(value_at_one(FamilySpec.jacobi(a, b), n))
    at_minus = math.log(value_at_one(FamilySpec.jacobi(b, a), n))
    return math.exp(max(at_one, at_minus) - 0.5 * log_h)


def kernel_truncation(family, t, rtol=KERNEL_TAIL_RTOL, degree_cap=DEFAULT_DEGREE_CAP):
    """Smallest N whose last-term bound falls below ``rtol`` (the k = 0 term is 1)."""
    if t <= 0:
        raise ValueError("t must be positive")
    for n in range(1, degree_cap + 1):
        lam = n * (n + sum(family.jacobi_params) + 1)
        if -t * lam + 2 * math.log(_sup_orthonormal(family, n)) < math.log(rtol) - 1.0:
            return n
    raise TruncationError(f"no N <= {degree_cap} meets the kernel tail budget at t={t}")


def kernel(family, t, x, y, N=None):
    """Truncated Jacobi heat kernel ``sum_{k<=N} e^{-lam_k t} phihat_k(x) phihat_k(y)``.

    The k = N term is bounded by ``e^{-lam_N t} sup|phihat_N|^2``; that bound
    must be below 1e-14 of the running sum or :class:`TruncationError` is raised.
    With ``N=None`` the smallest N meeting the budget at every (x, y) is used.
    """
    if family.kind not in ("jacobi", "gegenbauer"):
        raise ValueError("kernel is implemented for the Jacobi family")
    if t <= 0:
        raise ValueError("t must be positive")
    if N is None:
        n = kernel_truncation(family, t)
        while True:
            try:
                return kernel(family, t, x, y, n)
            except TruncationError:
                n += 1
                if n > DEFAULT_DEGREE_CAP:
                    raise
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    decay = np.exp(-t * eigenvalues(family, N))
    px = orthonormal_table(family, N, x)
    py = orthonormal_table(family, N, y)
    total = np.einsum("...k,...k,k->...", px, py, decay)
    bound = decay[N] * _sup_orthonormal(family, N) ** 2
    if np.any(bound >= KERNEL_TAIL_RTOL * np.abs(total)):
        raise TruncationError(f"kernel truncation N={N} leaves a last term ~{bound:.3e}")
    return float(total) if total.ndim == 0 else total


# ---------------------------------------------------------------------------
# Bochner subordination
# ---------------------------------------------------------------------------

def subordination_integral(lam, t, order=128):
    """(1/sqrt(pi)) int_0^inf u^{-1/2} e^{-u} e^{-lam t^2/(4u)} du by quadrature.

    The integrand has a square-root singularity at 0 and, for large
    ``lam t^2``, an essential zero there too.  The half-line is split at
    ``a = max(sqrt(c), 1)`` with ``c = lam t^2/4``: on [0, a] the substitution
    ``u = a s^2`` removes the singularity and leaves a smooth integrand for
    Gauss-Legendre; on [a, inf) a Gauss-Laguerre rule in ``u - a`` is used.
    """
    if lam <= 0 or t < 0:
        raise ValueError("need lam > 0 and t >= 0")
    c = lam * t * t / 4.0
    a = max(math.sqrt(c), 1.0)

    leg = gauss_rule(MeasureSpec.jacobi_beta(0.0, 0.0), order)
    s = 0.5 * (leg.nodes + 1.0)
    u = a * s * s
    head = 2.0 * math.sqrt(a) * np.exp(-u - c / u)
    head_sum = math.fsum(leg.weights * head)

    lag = gauss_rule(MeasureSpec.gamma(0.0), order)
    v = a + lag.nodes
    tail = np.exp(-a - c / v) / np.sqrt(v)
    tail_sum = math.fsum(lag.weights * tail)
    return (head_sum + tail_sum) / math.sqrt(math.pi)


def bochner_check(lam, t, order=128):
    """|subordination integral - e^{-sqrt(lam) t}|."""
    return abs(subordination_integral(lam, t, order) - math.exp(-math.sqrt(lam) * t))
