"""Workbench for unital qubit channels: classification, phase-damping
decompositions, capacity measures, and numerical verification of
product-channel multiplicativity and additivity at desk scale."""

__version__ = "0.1.0"

from .capacity import (
    Ensemble,
    HolevoResult,
    MeasureResult,
    OptimizerSettings,
    holevo_ensemble_opt,
    holevo_unital_qubit,
    m_p,
    min_entropy_closed_form,
    nu_p_closed_form,
    nu_p_numeric,
    opwsw_divergence_radius,
    s_min,
)
from .channels import (
    KrausChannel,
    UnitalQubitChannel,
    apply,
    apply_half_noisy,
    channel_from_json,
    channel_to_json,
    compose,
    conjugation_channel,
    corner_map,
    depolarizing,
    identity,
    is_completely_positive,
    kraus_from_transfer,
    phase_damping,
    random_kraus_channel,
    random_unital_qubit_channel,
    tensor,
    two_pauli,
)
from .decomposition import (
    CrossSectionDecomposition,
    PhaseDampingDecomposition,
    StandardForm,
    cross_section_decompose,
    decomposition_from_json,
    decomposition_to_json,
    phase_damping_decompose,
    standard_form,
    su2_from_so3,
    verify_decomposition,
)
from .linalg import (
    PauliBlocks,
    binary_entropy,
    bloch_vector,
    hermitian_eigensystem,
    partial_trace,
    pauli_block_decompose,
    random_density_matrix,
    random_pure_state,
    random_unitary,
    relative_entropy,
    schatten_p_norm,
    state_from_bloch,
    tensor_product,
    von_neumann_entropy,
)
from .verification import (
    CheckReport,
    check_block_factorization,
    check_decomposition_bound,
    check_entropy_derivative,
    check_holevo_additivity,
    check_min_entropy_additivity,
    check_norm_multiplicativity,
    check_phase_damping_bound,
    check_trace_power_concavity,
)
