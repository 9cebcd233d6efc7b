"""Classical orthogonal polynomials, their Poisson semigroups and g-functions,
and numerical transference from the Jacobi setting to the Gaussian and
Laguerre settings."""

from .orthopoly import (
    DegreeCapError,
    DerivativeShift,
    DomainWarning,
    FamilySpec,
    NormOverflowError,
    NormTable,
    apply_operator,
    derivative_shift,
    eigenvalue,
    eval_poly,
    gegenbauer_conversion_factor,
    squared_norm,
    value_at_one,
)

__version__ = "0.1.0"

__all__ = [
    "DegreeCapError",
    "DerivativeShift",
    "DomainWarning",
    "FamilySpec",
    "NormOverflowError",
    "NormTable",
    "apply_operator",
    "derivative_shift",
    "eigenvalue",
    "eval_poly",
    "gegenbauer_conversion_factor",
    "squared_norm",
    "value_at_one",
]
