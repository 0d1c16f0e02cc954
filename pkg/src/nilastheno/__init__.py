"""
Exact invariant complex geometry on nilmanifolds
Structure equations, special Hermitian metrics, Bott-Chern cohomology and first-order deformation obstructions
"""

from .algebra import ComplexNilAlgebra, classify, ddbar, del_, delbar, exterior_derivative, validate_algebra
from .cohomology import bc_class_vanishes, bc_space, bc_table, is_bc_harmonic, solve_ddbar
from .contraction import VectorForm01, contract, contract_bar, extension_map, simultaneous_contract
from .deformation import DeformationCurve, del_t, delbar_t, integrability_residual, pullback_structure
from .errors import (
    DimensionMismatch,
    InvalidStructure,
    MathDomainError,
    MissingParameter,
    NilAsthenoError,
    NotIntegrableAt,
    ParseError,
    SingularOperator,
    SymbolicRankRefused,
)
from .exterior import InvariantForm, Monomial, parse_form, wedge
from .metrics import HermitianMetric, check_special_metric, fundamental_power, hodge_star
from .obstruction import corollary_check, obstruct, obstruction_form, taylor_consistency_check, theorem_check
from .scalars import ScalarDomain, gaussian

__version__ = "0.1.0"
__all__ = [
    "ComplexNilAlgebra",
    "DeformationCurve",
    "HermitianMetric",
    "InvariantForm",
    "Monomial",
    "ScalarDomain",
    "VectorForm01",
    "bc_class_vanishes",
    "bc_space",
    "bc_table",
    "check_special_metric",
    "classify",
    "contract",
    "contract_bar",
    "corollary_check",
    "ddbar",
    "del_",
    "del_t",
    "delbar",
    "delbar_t",
    "exterior_derivative",
    "extension_map",
    "fundamental_power",
    "gaussian",
    "hodge_star",
    "integrability_residual",
    "is_bc_harmonic",
    "obstruct",
    "obstruction_form",
    "parse_form",
    "pullback_structure",
    "simultaneous_contract",
    "solve_ddbar",
    "taylor_consistency_check",
    "theorem_check",
    "validate_algebra",
    "wedge",
    "NilAsthenoError",
    "ParseError",
    "MissingParameter",
    "InvalidStructure",
    "MathDomainError",
    "DimensionMismatch",
    "SingularOperator",
    "NotIntegrableAt",
    "SymbolicRankRefused",
]
