"""Truncated arithmetic in the Iwasawa algebra of Z_p semidirect Z_p, coinvariant sizes of
finitely presented modules, and exact determinants of orbit matrices."""

from ._kernels import BACKEND
from .coinvariants import (
    ElementarySpec,
    GrowthReport,
    GrowthSpec,
    ModulePresentation,
    bounds_report,
    e_exponent,
    elementary_e,
    finite_part_growth,
    level_relation_matrix,
    smith_exponents,
)
from .orbit import (
    OrbitMatrixParams,
    build_matrix,
    closed_form,
    det_blocks,
    det_exact,
    orbit_partition,
    verify,
)
from .padic import ModularInt, padic_binomial, valuation
from .skew import SkewElement, TruncationBox, mul, omega, reduce_mod_omega_S

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ElementarySpec",
    "GrowthReport",
    "GrowthSpec",
    "ModularInt",
    "ModulePresentation",
    "OrbitMatrixParams",
    "SkewElement",
    "TruncationBox",
    "bounds_report",
    "build_matrix",
    "closed_form",
    "det_blocks",
    "det_exact",
    "e_exponent",
    "elementary_e",
    "finite_part_growth",
    "level_relation_matrix",
    "mul",
    "omega",
    "orbit_partition",
    "padic_binomial",
    "reduce_mod_omega_S",
    "smith_exponents",
    "valuation",
    "verify",
]
