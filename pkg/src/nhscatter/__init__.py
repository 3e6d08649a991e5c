"""Scattering through non-Hermitian tight-binding centers.

Compute scattering matrices of small complex centers coupled to uniform
leads, verify the conservation law linking a center to its Hermitian
conjugate, search for pseudo-Hermiticity metrics that protect energy or
energy-difference conservation, and run wave-packet experiments on finite
embedding chains.
"""

__version__ = "0.1.0"

from .conservation import (
    ConservationReport,
    FluxClass,
    classify_flux,
    flux_deviations,
    verify_conservation_law,
)
from .cmt import CmtCoupling, CmtResiduals, cmt_smatrix, two_port_coupling, verify_cmt_relations
from .dynamics import (
    ChainGeometry,
    WaveTrajectory,
    biorthogonal_overlap_series,
    block_intensities,
    build_chain,
    gaussian_packet,
    measure_rt,
    packet_experiment,
    propagate_expm,
    propagate_rk4,
    rt_series,
)
from .errors import (
    BandEdgeError,
    BoundaryContaminationError,
    ConfigError,
    ConventionMismatchError,
    DimensionTooLargeError,
    GeometryTooSmallError,
    KMismatchError,
    NotTwoPortError,
    PacketOutOfBoundsError,
    PortConditionError,
    PremiseViolatedError,
    ScatterError,
    ScatteringSingularityError,
    SingularMatrixError,
)
from .model import (
    DAMPED,
    UNDAMPED,
    ModeParameters,
    Port,
    ScatteringSystem,
    dagger,
    make_prototype,
    mode_params,
    prototype_system,
)
from .numerics import (
    as_complex_matrix,
    determinant,
    eig2,
    expm,
    invert,
    matrix_from_json,
    matrix_to_json,
    solve_linear,
)
from .smatrix import (
    Convention,
    ScatteringMatrix,
    closed_form_damped,
    closed_form_undamped,
    port_indicator,
    scattering_matrix,
    self_energy,
)
from .symmetry import (
    MetricOperator,
    PhaseClass,
    is_anti_pt,
    metric_space,
    phase_of,
    port_signature,
    predict_conjugate_smatrix,
)

__all__ = [
    "BandEdgeError",
    "BoundaryContaminationError",
    "ChainGeometry",
    "CmtCoupling",
    "CmtResiduals",
    "ConfigError",
    "ConservationReport",
    "Convention",
    "ConventionMismatchError",
    "DAMPED",
    "DimensionTooLargeError",
    "FluxClass",
    "GeometryTooSmallError",
    "KMismatchError",
    "MetricOperator",
    "ModeParameters",
    "NotTwoPortError",
    "PacketOutOfBoundsError",
    "PhaseClass",
    "Port",
    "PortConditionError",
    "PremiseViolatedError",
    "ScatterError",
    "ScatteringMatrix",
    "ScatteringSingularityError",
    "ScatteringSystem",
    "SingularMatrixError",
    "UNDAMPED",
    "WaveTrajectory",
    "as_complex_matrix",
    "biorthogonal_overlap_series",
    "block_intensities",
    "build_chain",
    "classify_flux",
    "closed_form_damped",
    "closed_form_undamped",
    "cmt_smatrix",
    "dagger",
    "determinant",
    "eig2",
    "expm",
    "flux_deviations",
    "gaussian_packet",
    "invert",
    "is_anti_pt",
    "make_prototype",
    "matrix_from_json",
    "matrix_to_json",
    "measure_rt",
    "metric_space",
    "mode_params",
    "packet_experiment",
    "phase_of",
    "port_indicator",
    "port_signature",
    "predict_conjugate_smatrix",
    "propagate_expm",
    "propagate_rk4",
    "prototype_system",
    "rt_series",
    "scattering_matrix",
    "self_energy",
    "solve_linear",
    "two_port_coupling",
    "verify_cmt_relations",
    "verify_conservation_law",
]
