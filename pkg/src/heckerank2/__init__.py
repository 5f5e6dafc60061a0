"""Exact computations in generic Hecke algebras of the rank 2 exceptional
complex reflection groups G4-G8, G13 and of cyclic groups."""

from .engine import (
    BasisSpec, FreeElement, InconsistentTable, MulTable, ReducedElement, ReductionIncomplete, TableMismatch,
    build_mul_table, cyclic_basis, element_inverse, multiply, normalize_word, op_twist, reduce, reference_basis,
)
from .presentations import (
    HeckeRelation, Presentation, hecke_coefficients, make_theta, registry_get, registry_names,
    validate_presentation,
)
from .rings import (
    QQ, ZZ, CoeffRing, Cyclotomic, LaurentPoly, PrimeField, SpecializationMap, cyc_normalize, lp_arith,
    lp_is_unit, lp_specialize, parse_poly,
)
from .words import Word, parse_word

__version__ = "0.1.0"
