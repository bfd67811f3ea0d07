"""Field language and multilocal OPE engine."""

from .expr import (Deriv, Gen, Ident, Linear, NormalProd, OpeCoeff, canonicalize, expr_parity,
                   format_field, format_ope, normal_prod, to_expr)
from .field import Field
from .parser import ParseError, parse_expr, parse_field
from .system import ContractionError, Generator, GeneratorSystem
from .wick import (OpeResult, atom_contraction, locality_profile, normal_product, ope, ope_coefficient,
                   singular_part, taylor_recenter, wick_groups)

__all__ = [
    "ContractionError", "Deriv", "Field", "Gen", "Generator", "GeneratorSystem", "Ident", "Linear",
    "NormalProd", "OpeCoeff", "OpeResult", "ParseError", "atom_contraction", "canonicalize",
    "expr_parity", "format_field", "format_ope", "locality_profile", "normal_prod", "normal_product",
    "ope", "ope_coefficient", "parse_expr", "parse_field", "singular_part", "taylor_recenter",
    "to_expr", "wick_groups",
]
