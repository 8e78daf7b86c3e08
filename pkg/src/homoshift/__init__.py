"""Smooth shifts along orbits of Hamiltonian flows of homogeneous planar polynomials."""
from .expr import ParseError, SmoothFn, parse_fn, parse_poly
from .field import PlaneField, flow, hamiltonian, orbit_trace, with_multiplier
from .jets import JetReport, cr_norm, flatness_report
from .polar import (
    HalfPlaneField,
    HalfPlanePoint,
    descend_map,
    extract_gammas,
    f1_formula,
    lift_field,
    lift_map,
    p_inverse,
    p_map,
    pullback,
    pushforward,
)
from .poly import HomoPoly, UniPoly, to_string
from .shift import (
    AnnulusGrid,
    ShiftSample,
    flat_divide,
    flow_time,
    hadamard_quotient,
    make_shift_map,
    recover_shift,
    regular_point_shift,
    sector_time,
    separatrix_time,
)
from .star import FactorDecomp, StarReport, a_exponent, factor_decomposition, is_star

__version__ = "0.1.0"

__all__ = [
    "AnnulusGrid", "FactorDecomp", "HalfPlaneField", "HalfPlanePoint", "HomoPoly", "JetReport",
    "ParseError", "PlaneField", "ShiftSample", "SmoothFn", "StarReport", "UniPoly",
    "a_exponent", "cr_norm", "descend_map", "extract_gammas", "f1_formula", "factor_decomposition",
    "flat_divide", "flatness_report", "flow", "flow_time", "hadamard_quotient", "hamiltonian",
    "is_star", "lift_field", "lift_map", "make_shift_map", "orbit_trace", "p_inverse", "p_map",
    "parse_fn", "parse_poly", "pullback", "pushforward", "recover_shift", "regular_point_shift",
    "sector_time", "separatrix_time", "to_string", "with_multiplier",
]
