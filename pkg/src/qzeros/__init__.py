"""Zeros of Askey-Wilson and q-Racah polynomials and their spectral matrices.

The package computes the N zeros of either family, builds the N x N
matrices whose spectra are known in closed form (depending only on the
parameter products abcd resp. alpha*beta, on q, and on N), and verifies
the zero identities, trace/determinant formulas, Diophantine rationality,
isospectrality, and the flow/Jacobian linkage at desk scale.
"""

from .errors import (
    BranchDegenerate,
    DegenerateConfiguration,
    DegenerateDenominator,
    LengthMismatch,
    NoConvergence,
    QZerosError,
    SingularConfiguration,
    SingularTrajectory,
    ZeroArgument,
)
from .numlin import (
    SpectralMatrix,
    SpectrumMatch,
    ZeroSet,
    compute_zero_set,
    determinant,
    eigenvalues,
    find_polynomial_zeros,
    match_spectra,
)
from .polyform import (
    AWParams,
    MonomialPoly,
    RacahParams,
    aw_eval,
    aw_rational_eval,
    monomial_coefficients,
    racah_eval,
    x_to_z,
    z_to_x,
)
from .qkernel import (
    ComplexScalar,
    modified_qpochhammer,
    modified_qpochhammer_derivative,
    phi43_terminating,
    qpochhammer,
)
from .report import PACKAGE_VERSION as __version__
from .report import DEFAULT_TOLERANCES, VerificationReport, emit_report, resolve_tolerances
from .zeroflow import (
    FlowState,
    PerturbationState,
    aw_velocity,
    fd_jacobian,
    integrate_flow,
    linearization_check,
    racah_velocity,
    velocity_for,
)

__all__ = [
    "AWParams",
    "BranchDegenerate",
    "ComplexScalar",
    "DEFAULT_TOLERANCES",
    "DegenerateConfiguration",
    "DegenerateDenominator",
    "FlowState",
    "LengthMismatch",
    "MonomialPoly",
    "NoConvergence",
    "PerturbationState",
    "QZerosError",
    "RacahParams",
    "SingularConfiguration",
    "SingularTrajectory",
    "SpectralMatrix",
    "SpectrumMatch",
    "VerificationReport",
    "ZeroArgument",
    "ZeroSet",
    "__version__",
    "aw_eval",
    "aw_rational_eval",
    "aw_velocity",
    "compute_zero_set",
    "determinant",
    "eigenvalues",
    "emit_report",
    "fd_jacobian",
    "find_polynomial_zeros",
    "integrate_flow",
    "linearization_check",
    "match_spectra",
    "modified_qpochhammer",
    "modified_qpochhammer_derivative",
    "monomial_coefficients",
    "phi43_terminating",
    "qpochhammer",
    "racah_eval",
    "racah_velocity",
    "resolve_tolerances",
    "velocity_for",
    "x_to_z",
    "z_to_x",
]
