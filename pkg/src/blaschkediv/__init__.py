"""Divisor calculus of finite Blaschke products.

The library represents a degree-d product fixing 0 and 1 by its zero
divisor, maps zeros to critical points and back, extends the map to
divisors with circle atoms, classifies boundary divisors by their
dynamical behavior, builds exact lamination angle tables, and ships a
deterministic experiment harness plus a command-line front end.
"""

from __future__ import annotations

from .blaschke import (BlaschkeProduct, RamificationResult, boundary_orbit,
                       critical_divisor, from_zero_divisor,
                       multiplier_at_zero, phi_1m_closed_form, walsh_check,
                       zeros_from_critical)
from .boundary import (BoundaryDivisor, ClassificationReport, DynrelResult,
                       OrbitMembership, boundary_from_json, boundary_to_json,
                       build_degenerate_sequence, classify, extend_phi,
                       has_dynamical_relation, in_E_zeta, is_regular,
                       zeta_limit)
from .divisor import (Divisor, add, degree, divisor_from_json,
                      divisor_to_json, is_simple, matching_distance,
                      sequence_limit, split_boundary)
from .errors import (AmbiguousModulusError, CalculusError, ContinuationError,
                     NumericalError, PreconditionError, SchemaError)
from .experiments import (SolveCertificate, SweepConfig,
                          multiplier_limit_check, prescribe_distance,
                          sample_neighborhood, verify_cont_orbit,
                          verify_extension_convergence)
from .hypgeo import HypDisk, hull_contains, hyp_circle, hyp_dist, klein_embed
from .lamination import (AngleEntry, LaminationTable, lamination_table,
                         preimages_of, ray_pairs)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousModulusError",
    "AngleEntry",
    "BlaschkeProduct",
    "BoundaryDivisor",
    "CalculusError",
    "ClassificationReport",
    "ContinuationError",
    "Divisor",
    "DynrelResult",
    "HypDisk",
    "LaminationTable",
    "NumericalError",
    "OrbitMembership",
    "PreconditionError",
    "RamificationResult",
    "SchemaError",
    "SolveCertificate",
    "SweepConfig",
    "add",
    "boundary_from_json",
    "boundary_orbit",
    "boundary_to_json",
    "build_degenerate_sequence",
    "classify",
    "critical_divisor",
    "degree",
    "divisor_from_json",
    "divisor_to_json",
    "extend_phi",
    "from_zero_divisor",
    "has_dynamical_relation",
    "hull_contains",
    "hyp_circle",
    "hyp_dist",
    "in_E_zeta",
    "is_regular",
    "is_simple",
    "klein_embed",
    "lamination_table",
    "matching_distance",
    "multiplier_at_zero",
    "multiplier_limit_check",
    "phi_1m_closed_form",
    "preimages_of",
    "prescribe_distance",
    "ray_pairs",
    "sample_neighborhood",
    "sequence_limit",
    "split_boundary",
    "verify_cont_orbit",
    "verify_extension_convergence",
    "walsh_check",
    "zeros_from_critical",
    "zeta_limit",
]
