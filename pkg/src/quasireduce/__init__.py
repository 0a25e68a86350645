"""Reduction of first-order nonlinear PDE systems to autonomous, homogeneous,
quasilinear form through a solvable algebra of Lie point symmetries."""

from .canonical import CanonicalCheck, PointTransformation, canonical_for_translation_scaling, derive_inverse, verify_canonical
from .errors import QuasiReduceError
from .expr import Dependent, Independent, Jet, Opaque, Parameter, Signature, as_rf, normalize
from .liegeom import (
    AlgebraReport,
    SymmetryCertificate,
    VectorField,
    check_symmetry,
    check_theorem1_structure,
    distribution_rank,
    lie_bracket,
    prolong1,
)
from .pdesystem import PDESystem
from .transform import ClassificationReport, ReductionResult, classify, jet_exchange, push_forward, reduce, same_system

__version__ = "0.1.0"

__all__ = [
    "AlgebraReport", "CanonicalCheck", "ClassificationReport", "Dependent", "Independent", "Jet",
    "Opaque", "PDESystem", "Parameter", "PointTransformation", "QuasiReduceError", "ReductionResult",
    "Signature", "SymmetryCertificate", "VectorField", "as_rf", "canonical_for_translation_scaling",
    "check_symmetry", "check_theorem1_structure", "classify", "derive_inverse", "distribution_rank",
    "jet_exchange", "lie_bracket", "normalize", "prolong1", "push_forward", "reduce", "same_system",
    "verify_canonical",
]
