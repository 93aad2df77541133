"""Quasi-Trefftz bases of generalized plane waves for variable-coefficient wave operators."""

from .basis import (
    CertificateError,
    GpwFunction,
    build_family,
    build_gpw,
    directions,
    plane_wave,
    plane_wave_family,
    unit_circle_directions,
    unit_sphere_directions,
)
from .frame import (
    FreeParameters,
    OperatorSplit,
    SplitContractError,
    SplitReport,
    preimage,
    right_inverse,
    verify_split,
)
from .layers import PrincipalPart2, kernel_dimension, solve_layer, split_layer
from .operators import (
    CoefficientJet,
    helmholtz_image,
    make_convected_split,
    make_helmholtz_split,
    omode_kappa_sq,
    principal_sqrt,
)
from .polycore import GradedPoly, HomogeneousPoly, MultiIndex
from .approx import (
    DecayReport,
    FitResult,
    ManufacturedProblem,
    RankReport,
    convergence_study,
    family_fit_error,
    manufactured_helmholtz,
    rank_comparison,
    residual_order_study,
    taylor_matrix,
    taylor_rank,
    taylor_truncation,
)

__all__ = [
    "CertificateError",
    "CoefficientJet",
    "DecayReport",
    "FitResult",
    "FreeParameters",
    "GpwFunction",
    "GradedPoly",
    "HomogeneousPoly",
    "ManufacturedProblem",
    "MultiIndex",
    "OperatorSplit",
    "PrincipalPart2",
    "RankReport",
    "SplitContractError",
    "SplitReport",
    "build_family",
    "build_gpw",
    "convergence_study",
    "directions",
    "family_fit_error",
    "helmholtz_image",
    "kernel_dimension",
    "make_convected_split",
    "make_helmholtz_split",
    "manufactured_helmholtz",
    "omode_kappa_sq",
    "plane_wave",
    "plane_wave_family",
    "preimage",
    "principal_sqrt",
    "rank_comparison",
    "residual_order_study",
    "right_inverse",
    "solve_layer",
    "split_layer",
    "taylor_matrix",
    "taylor_rank",
    "taylor_truncation",
    "unit_circle_directions",
    "unit_sphere_directions",
    "verify_split",
]

__version__ = "0.1.0"
