"""Jacobi, Gegenbauer, Hermite and Laguerre polynomials in Szegő's normalization.

The measures are the probability measures

* Jacobi(a, b): ``eta (1-x)^a (1+x)^b dx`` on (-1, 1),
* Gegenbauer(lam): the Jacobi measure with ``a = b = lam - 1/2``,
* Hermite: ``exp(-x^2)/sqrt(pi) dx`` on R,
* Laguerre(a): ``x^a exp(-x)/Gamma(a+1) dx`` on (0, inf),

so every squared norm below is taken against a measure of total mass one.

Two evaluation routes exist.  :func:`eval_poly` / :func:`eval_table` run
the classical recurrence in Szegő normalization; :func:`orthonormal_table`
runs the recurrence of the orthonormal polynomials built from the monic
recurrence coefficients of the measure, which never overflows and is what
the quadrature, spectral and g-function code use.  The two are tested
against each other.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._kernels import recurrence_table
from .loggamma import log_factorial, log_poch

DEFAULT_DEGREE_CAP = 256

JACOBI = "jacobi"
GEGENBAUER = "gegenbauer"
HERMITE = "hermite"
LAGUERRE = "laguerre"
KINDS = (JACOBI, GEGENBAUER, HERMITE, LAGUERRE)


class DomainWarning(UserWarning):
    """Evaluation point outside the family's natural domain."""


class DegreeCapError(ValueError):
    """Requested degree exceeds the configured cap."""


class NormOverflowError(OverflowError):
    """A quantity overflows in linear scale; ``log_value`` is still valid."""

    def __init__(self, what, log_value):
        super().__init__(f"{what} overflows double precision (log value {log_value!r})")
        self.log_value = log_value


@dataclass(frozen=True)
class FamilySpec:
    """One orthogonal polynomial system and its parameters.

    Use the constructors :meth:`jacobi`, :meth:`gegenbauer`, :meth:`hermite`
    and :meth:`laguerre` rather than the raw fields.
    """

    kind: str
    alpha: float = 0.0
    beta: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        for name in ("alpha", "beta", "lam"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, float(value))
        if self.kind == JACOBI and (self.alpha <= -1 or self.beta <= -1):
            raise ValueError(f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta})")
        if self.kind == GEGENBAUER and self.lam <= 0:
            raise ValueError(f"Gegenbauer parameter must be positive, got {self.lam}")
        if self.kind == LAGUERRE and self.alpha <= -1:
            raise ValueError(f"Laguerre parameter must exceed -1, got {self.alpha}")

    @classmethod
    def jacobi(cls, alpha, beta):
        return cls(JACOBI, alpha=alpha, beta=beta)

    @classmethod
    def gegenbauer(cls, lam):
        return cls(GEGENBAUER, lam=lam)

    @classmethod
    def hermite(cls):
        return cls(HERMITE)

    @classmethod
    def laguerre(cls, alpha):
        return cls(LAGUERRE, alpha=alpha)

    @property
    def jacobi_params(self):
        """(a, b) of the underlying Jacobi measure (Jacobi/Gegenbauer only)."""
        if self.kind == JACOBI:
            return self.alpha, self.beta
        if self.kind == GEGENBAUER:
            return self.lam - 0.5, self.lam - 0.5
        raise ValueError(f"{self.kind} family has no Jacobi parameters")

    @property
    def domain(self):
        if self.kind in (JACOBI, GEGENBAUER):
            return (-1.0, 1.0)
        if self.kind == HERMITE:
            return (-math.inf, math.inf)
        return (0.0, math.inf)

    def label(self):
        if self.kind == JACOBI:
            return f"Jacobi({self.alpha:g},{self.beta:g})"
        if self.kind == GEGENBAUER:
            return f"Gegenbauer({self.lam:g})"
        if self.kind == HERMITE:
            return "Hermite"
        return f"Laguerre({self.alpha:g})"


@dataclass(frozen=True)
class NormTable:
    family: FamilySpec
    squared_norms: np.ndarray

    def __post_init__(self):
        arr = np.array(self.squared_norms, dtype=float)
        if not (np.all(np.isfinite(arr)) and np.all(arr > 0)):
            raise ValueError("squared norms must be positive and finite")
        arr.setflags(write=False)
        object.__setattr__(self, "squared_norms", arr)

    def __getitem__(self, n):
        return self.squared_norms[n]

    def __len__(self):
        return self.squared_norms.shape[0]


@dataclass(frozen=True)
class DerivativeShift:
    """``d/dx phi_n = factor * psi_{degree}`` with ``psi`` in ``family``."""

    factor: float
    family: FamilySpec
    degree: int


def _check_degree(n, cap):
    n = int(n)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n > cap:
        raise DegreeCapError(f"degree {n} exceeds cap {cap}")
    return n


def _check_domain(family, x):
    lo, hi = family.domain
    arr = np.asarray(x)
    if np.any(arr < lo) or np.any(arr > hi):
        warnings.warn(f"evaluating {family.label()} outside {family.domain}", DomainWarning,
                      stacklevel=3)


# ---------------------------------------------------------------------------
# recurrence coefficients
# ---------------------------------------------------------------------------

def szego_recurrence(family, nmax):
    """Arrays (a, b, c) with ``phi_{n+1} = (a_n x + b_n) phi_n - c_n phi_{n-1}``."""
    n = np.arange(nmax, dtype=float)
    if family.kind == HERMITE:
        return np.full(nmax, 2.0), np.zeros(nmax), 2.0 * n
    if family.kind == LAGUERRE:
        al = family.alpha
        return -1.0 / (n + 1), (2 * n + al + 1) / (n + 1), (n + al) / (n + 1)
    if family.kind == GEGENBAUER:
        lam = family.lam
        return 2 * (n + lam) / (n + 1), np.zeros(nmax), (n + 2 * lam - 1) / (n + 1)
    a, b = family.alpha, family.beta
    s = 2 * n + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        d = 2 * (n + 1) * (n + a + b + 1) * s
        A = (s + 1) * (s + 2) * s / d
        B = (s + 1) * (a * a - b * b) / d
        C = 2 * (n + a) * (n + b) * (s + 2) / d
    if nmax:
        A[0] = (a + b + 2) / 2
        B[0] = (a - b) / 2
        C[0] = 0.0
    return A, B, C


def monic_recurrence(family, m):
    """Monic recurrence coefficients of the family's probability measure.

    Returns ``alpha[0..m-1]`` and ``beta[0..m]`` with ``beta[0] = 1`` so
    that ``p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}`` for the monic
    orthogonal polynomials.
    """
    k = np.arange(m, dtype=float)
    kb = np.arange(m + 1, dtype=float)
    if family.kind == HERMITE:
        beta = kb / 2
        beta[0] = 1.0
        return np.zeros(m), beta
    if family.kind == LAGUERRE:
        al = family.alpha
        beta = kb * (kb + al)
        beta[0] = 1.0
        return 2 * k + al + 1, beta
    a, b = family.jacobi_params
    s = 2 * k + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = (b * b - a * a) / (s * (s + 2))
        sb = 2 * kb + a + b
        beta = 4 * kb * (kb + a) * (kb + b) * (kb + a + b) / (sb * sb * (sb + 1) * (sb - 1))
    if m:
        alpha[0] = (b - a) / (a + b + 2)
    beta[0] = 1.0
    if m >= 1:
        beta[1] = 4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
    if a == b:
        alpha[:] = 0.0
    return alpha, beta


# ---------------------------------------------------------------------------
# norms and special values
# ---------------------------------------------------------------------------

def log_squared_norm(family, n):
    """log of ``||phi_n||^2`` under the family's probability measure."""
    n = int(n)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if family.kind == HERMITE:
        return n * math.log(2.0) + log_factorial(n)
    if family.kind == LAGUERRE:
        return log_poch(family.alpha + 1, n) - log_factorial(n)
    a, b = family.jacobi_params
    if n == 0:
        log_h = 0.0
    else:
        log_h = (log_poch(a + 1, n) + log_poch(b + 1, n) - log_factorial(n)
                 - log_poch(a + b + 2, n - 1) - math.log(2 * n + a + b + 1))
    if family.kind == GEGENBAUER:
        log_h -= 2.0 * log_gegenbauer_conversion_factor(family.lam, n)
    return log_h


def squared_norm(family, n):
    """``||phi_n||^2`` under the normalized measure (raises on overflow)."""
    log_h = log_squared_norm(family, n)
    if log_h > 709.0:
        raise NormOverflowError(f"||phi_{n}||^2 for {family.label()}", log_h)
    return math.exp(log_h)


def norm_table(family, nmax):
    return NormTable(family, [squared_norm(family, n) for n in range(nmax + 1)])


def value_at_one(family, n):
    """P_n(1) for Jacobi (C_n(1) for Gegenbauer); always positive."""
    n = int(n)
    if family.kind == JACOBI:
        return math.exp(log_poch(family.alpha + 1, n) - log_factorial(n))
    if family.kind == GEGENBAUER:
        return math.exp(log_poch(2 * family.lam, n) - log_factorial(n))
    raise ValueError("value_at_one is defined for Jacobi/Gegenbauer families")


def log_gegenbauer_conversion_factor(lam, n):
    """log of Gamma(2l)Gamma(n+l+1/2) / (Gamma(l+1/2)Gamma(n+2l))."""
    if lam <= 0:
        raise ValueError("Gegenbauer parameter must be positive")
    return log_poch(lam + 0.5, n) - log_poch(2 * lam, n)


def gegenbauer_conversion_factor(lam, n):
    """Factor c with ``C_n^lam = P_n^{(lam-1/2, lam-1/2)} / c``."""
    log_c = log_gegenbauer_conversion_factor(lam, n)
    if abs(log_c) > 709.0:
        raise NormOverflowError(f"Gegenbauer conversion factor (lam={lam}, n={n})", log_c)
    return math.exp(log_c)


def eigenvalue(family, k):
    k = int(k)
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if family.kind in (HERMITE, LAGUERRE):
        return float(k)
    if family.kind == GEGENBAUER:
        return k * (k + 2 * family.lam)
    return k * (k + family.alpha + family.beta + 1)


def eigenvalues(family, nmax):
    return np.array([eigenvalue(family, k) for k in range(nmax + 1)])


def derivative_shift(family, n):
    n = int(n)
    if n < 0:
        raise ValueError("degree must be nonnegative")
    target = shifted_family(family)
    if n == 0:
        return DerivativeShift(0.0, target, 0)
    if family.kind == HERMITE:
        factor = 2.0 * n
    elif family.kind == LAGUERRE:
        factor = -1.0
    elif family.kind == GEGENBAUER:
        factor = 2.0 * family.lam
    else:
        factor = (n + family.alpha + family.beta + 1) / 2
    return DerivativeShift(factor, target, n - 1)


def shifted_family(family):
    """Family that the derivative of ``family`` lands in."""
    if family.kind == HERMITE:
        return family
    if family.kind == LAGUERRE:
        return FamilySpec.laguerre(family.alpha + 1)
    if family.kind == GEGENBAUER:
        return FamilySpec.gegenbauer(family.lam + 1)
    return FamilySpec.jacobi(family.alpha + 1, family.beta + 1)


def orthonormal_shift_factors(family, nmax):
    """kappa_n with ``d/dx phihat_n = kappa_n psihat_{n-1}`` (orthonormal bases).

    ``phihat_n = phi_n/||phi_n||`` keeps Szegő's sign, so kappa is negative
    for Laguerre.  kappa_0 = 0.
    """
    n = np.arange(nmax + 1, dtype=float)
    if family.kind == HERMITE:
        return np.sqrt(2 * n)
    if family.kind == LAGUERRE:
        return -np.sqrt(n / (family.alpha + 1))
    a, b = family.jacobi_params
    return np.sqrt(n * (n + a + b + 1) * (a + b + 2) * (a + b + 3) / (4 * (a + 1) * (b + 1)))


def natural_derivative_weight(family, x):
    """s(x) in the natural derivative ``delta = s(x) d/dx``."""
    x = np.asarray(x, dtype=float)
    if family.kind == HERMITE:
        return np.full_like(x, 1.0 / math.sqrt(2.0))
    if family.kind == LAGUERRE:
        return np.sqrt(np.maximum(x, 0.0))
    return np.sqrt(np.maximum(1.0 - x * x, 0.0))


def mean_square_derivative_weight(family):
    """E[s(x)^2] under the family's measure."""
    if family.kind == HERMITE:
        return 0.5
    if family.kind == LAGUERRE:
        return family.alpha + 1
    a, b = family.jacobi_params
    return 4 * (a + 1) * (b + 1) / ((a + b + 2) * (a + b + 3))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_table(family, nmax, x, degree_cap=DEFAULT_DEGREE_CAP):
    """Szegő-normalized values phi_0..phi_nmax at x; shape ``x.shape + (nmax+1,)``."""
    nmax = _check_degree(nmax, degree_cap)
    x = np.asarray(x, dtype=float)
    _check_domain(family, x)
    a, b, c = szego_recurrence(family, nmax)
    table = recurrence_table(np.ascontiguousarray(x.ravel()), a, b, c, nmax)
    return table.reshape(x.shape + (nmax + 1,))


def eval_poly(family, n, x, degree_cap=DEFAULT_DEGREE_CAP):
    """phi_n(x) in Szegő normalization (scalar in, scalar out)."""
    n = _check_degree(n, degree_cap)
    values = eval_table(family, n, x, degree_cap)[..., n]
    return float(values) if np.ndim(values) == 0 else values


def orthonormal_table(family, nmax, x, degree_cap=DEFAULT_DEGREE_CAP):
    """phihat_0..phihat_nmax at x, ``phihat_n = phi_n/||phi_n||``.

    Built from the orthonormal recurrence so it is overflow-free for large
    parameters; Laguerre columns carry Szegő's (-1)^n sign.
    """
    nmax = _check_degree(nmax, degree_cap)
    x = np.asarray(x, dtype=float)
    _check_domain(family, x)
    alpha, beta = monic_recurrence(family, nmax + 1)
    sb = np.sqrt(beta)
    a = 1.0 / sb[1:nmax + 1]
    b = -alpha[:nmax] * a
    c = sb[:nmax] * a
    if nmax:
        c[0] = 0.0
    table = recurrence_table(np.ascontiguousarray(x.ravel()), a, b, c, nmax)
    if family.kind == LAGUERRE:
        table[:, 1::2] *= -1.0
    return table.reshape(x.shape + (nmax + 1,))


def apply_operator(family, n, x, degree_cap=DEFAULT_DEGREE_CAP):
    """(L phi_n)(x) for the family's second-order operator, via derivative shifts.

    Jacobi:  -(1-x^2) y'' - (b - a - (a+b+2) x) y'
    Hermite: -y''/2 + x y'
    Laguerre: -x y'' - (a + 1 - x) y'
    """
    n = _check_degree(n, degree_cap)
    x = np.asarray(x, dtype=float)
    lo, hi = family.domain
    if family.kind != HERMITE and np.any((x == lo) | (x == hi)):
        raise ValueError(f"{family.label()} operator degenerates at the domain endpoints")
    _check_domain(family, x)
    first = derivative_shift(family, n)
    d1 = first.factor * eval_poly(first.family, first.degree, x, degree_cap) if n >= 1 else 0.0 * x
    if n >= 2:
        second = derivative_shift(first.family, first.degree)
        d2 = first.factor * second.factor * eval_poly(second.family, second.degree, x, degree_cap)
    else:
        d2 = 0.0 * x
    if family.kind == HERMITE:
        out = -0.5 * d2 + x * d1
    elif family.kind == LAGUERRE:
        out = -x * d2 - (family.alpha + 1 - x) * d1
    else:
        a, b = family.jacobi_params
        out = -(1 - x * x) * d2 - (b - a - (a + b + 2) * x) * d1
    return float(out) if np.ndim(out) == 0 else out
