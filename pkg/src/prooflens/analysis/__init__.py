"""Exact real analysis on [0,1]: polynomials, function expressions, moduli,
certified norms and interpolation."""

from __future__ import annotations

from .funexpr import (
    PL,
    TENT,
    Abs,
    DomainError,
    FunExpr,
    FunSpecError,
    NotPiecewiseExact,
    PiecewisePoly,
    PLFunction,
    Poly,
    Scale,
    Sum,
    as_polynomial,
    const,
    derived_modulus,
    funexpr_from_json,
    funexpr_to_json,
    pl,
    poly,
    to_piecewise,
)
from .lagrange import lagrange, lagrange_sup_bound
from .modulus import (
    TRIVIAL,
    Linear,
    MinOf,
    Modulus,
    ModulusSpecError,
    Precomposed,
    modulus_abs,
    modulus_scale,
    modulus_sum,
    modulus_sum3,
    parse_modulus,
    poly_modulus,
)
from .norms import (
    MarkovCertificate,
    UnsupportedShape,
    abs_integral_poly,
    integral,
    l1_norm,
    l1_norm_quadrature,
    markov_derivative_check,
    markov_l1_check,
    sgn_integral,
    sign_partition,
    sup_abs_poly,
    sup_norm,
    sup_norm_grid,
)
from .polynomial import Polynomial, RootBracket, isolate_roots

__all__ = [name for name in dir() if not name.startswith("_")]
