"""Exact-arithmetic quantization of finite-dimensional Lie bialgebras mod h^3."""

from .bialg import (
    BialgebraHom,
    LieBialgebra,
    catalog,
    check_lie_bialgebra,
    coboundary_from_r,
    dualize,
    make_bialgebra,
)
from .kernel import HSeries, Q, SparseTensor, permute, rat, series_inverse, series_mul
from .manin import DoubleAlgebra, build_double, canonical_r, check_cybe, cybe_residual
from .pbw import EnvAlgebra, EnvElement, EnvTensor, antipode0, counit0, delta0, multiply, normal_order
from .quantize import Quantization, QuantizedDouble, h2_product_formula, polarize_R
from .verma import PairedVector, VermaVector, act, dual_act, i_minus, i_plus_star, psi_on, solve_psi
from .ybq import AssocAlgebra, check_assoc_cybe, matrix_algebra, quantize_quasitriangular, quantize_r, rs_construct, tau_check

__all__ = [
    "AssocAlgebra", "BialgebraHom", "DoubleAlgebra", "EnvAlgebra", "EnvElement",
    "EnvTensor", "HSeries", "LieBialgebra", "PairedVector", "Q", "Quantization",
    "QuantizedDouble", "SparseTensor", "VermaVector", "act", "antipode0",
    "build_double", "canonical_r", "catalog", "check_assoc_cybe", "check_cybe",
    "check_lie_bialgebra", "coboundary_from_r", "counit0", "cybe_residual",
    "delta0", "dual_act", "dualize", "h2_product_formula", "i_minus",
    "i_plus_star", "make_bialgebra", "matrix_algebra", "multiply",
    "normal_order", "permute", "polarize_R", "psi_on", "quantize_quasitriangular",
    "quantize_r", "rat", "rs_construct", "series_inverse", "series_mul",
    "solve_psi", "tau_check",
]
