"""Deterministic workbench for collision-model dephasing experiments:
circuit construction, routing, simulation, tomography and the
information-theoretic analysis suite.
"""

__version__ = "0.1.0"

from .circuit import (
    Circuit,
    Gate,
    GateKind,
    Role,
    RoleKind,
    build_condensed_circuit,
    build_full_circuit,
    circuit_from_text,
    circuit_to_text,
    unitary_of,
)
from .darwinism import (
    BasisGrid,
    MiCurve,
    PartitionScheme,
    SchemeMode,
    averaged_qmi,
    blp_witness,
    cmi_grid,
    cmi_joint,
    cmi_joint_sampled,
    holevo_bound,
    partition_scheme,
    pauli_cmi_scan,
    qmi,
    system_coherence,
)
from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .qstate import (
    DensityMatrix,
    KrausChannel,
    PureState,
    amplitude_damping_channel,
    apply_channel,
    concurrence,
    depolarizing_channel,
    fidelity,
    partial_trace,
    trace_distance,
    von_neumann_entropy,
)
from .routing import (
    CouplingMap,
    RoutedCircuit,
    builtin_coupling_map,
    circuit_cnot_count,
    coupling_map_from_file,
    coupling_map_from_text,
    coupling_map_to_text,
    peephole_zero_swap,
    permutation_unitary,
    replay_permutation,
    route,
    routed_statevector_equivalent,
    routed_unitary_equivalent,
)
from .scm import (
    CanonicalTimes,
    Scenario,
    ScmParams,
    TimeGrid,
    canonical_times,
    coherence_finite,
    coherence_markovian,
    collision_channel,
    collision_probability,
    ideal_global_state,
    prep_angle,
)
from .simulator import (
    MeasRecord,
    MeasSetting,
    NoiseModel,
    basis_rotation,
    born_distribution,
    run_density,
    run_statevector,
    sample,
)
from .tomography import (
    MleResult,
    TomographyJob,
    coherence_from_tomo,
    load_state_text,
    load_tomography_job,
    mle_reconstruct,
    mle_reconstruct_from_frequencies,
    pauli_settings,
    qubit_tomography,
    qubit_tomography_from_means,
    save_state_text,
    save_tomography_job,
)

__all__ = [
    "__version__",
    "KERNEL_IMPLEMENTATION",
    # qstate
    "PureState",
    "DensityMatrix",
    "KrausChannel",
    "depolarizing_channel",
    "amplitude_damping_channel",
    "apply_channel",
    "partial_trace",
    "von_neumann_entropy",
    "trace_distance",
    "fidelity",
    "concurrence",
    # scm
    "Scenario",
    "ScmParams",
    "TimeGrid",
    "CanonicalTimes",
    "canonical_times",
    "collision_probability",
    "prep_angle",
    "coherence_markovian",
    "coherence_finite",
    "collision_channel",
    "ideal_global_state",
    # circuit
    "GateKind",
    "Gate",
    "Role",
    "RoleKind",
    "Circuit",
    "build_full_circuit",
    "build_condensed_circuit",
    "unitary_of",
    "circuit_to_text",
    "circuit_from_text",
    # routing
    "CouplingMap",
    "RoutedCircuit",
    "builtin_coupling_map",
    "circuit_cnot_count",
    "coupling_map_from_text",
    "coupling_map_to_text",
    "coupling_map_from_file",
    "route",
    "peephole_zero_swap",
    "permutation_unitary",
    "replay_permutation",
    "routed_statevector_equivalent",
    "routed_unitary_equivalent",
    # simulator
    "MeasSetting",
    "MeasRecord",
    "NoiseModel",
    "basis_rotation",
    "run_statevector",
    "run_density",
    "born_distribution",
    "sample",
    # tomography
    "TomographyJob",
    "MleResult",
    "pauli_settings",
    "mle_reconstruct",
    "mle_reconstruct_from_frequencies",
    "qubit_tomography",
    "qubit_tomography_from_means",
    "coherence_from_tomo",
    "save_tomography_job",
    "load_tomography_job",
    "save_state_text",
    "load_state_text",
    # darwinism
    "SchemeMode",
    "PartitionScheme",
    "partition_scheme",
    "MiCurve",
    "BasisGrid",
    "system_coherence",
    "qmi",
    "averaged_qmi",
    "cmi_joint",
    "cmi_joint_sampled",
    "cmi_grid",
    "holevo_bound",
    "pauli_cmi_scan",
    "blp_witness",
]
