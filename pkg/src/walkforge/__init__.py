"""Continuous-time quantum walks: exact evolution, circuit compilation and graph extraction."""

__version__ = "0.1.0"

from .circuit import (
    Circuit,
    Gate,
    NoiseSpec,
    circuit_unitary,
    cx,
    emit_circuit,
    gate_matrix,
    parse_circuit,
    postselect_onehot,
    run_noisy,
    sample_counts,
    simulate_statevector,
    u1,
    u2,
    u3,
)
from .compilers import (
    TrotterPlan,
    compile_hypercube_separable,
    compile_onehot_line,
    load_table_s1,
    table_s1_report,
    xxyy_block,
)
from .estimators import ContinuousQuantumWalk, GraphExtractor
from .extract import (
    CouplingMap,
    ExtractionParams,
    SamplerConfig,
    graph_from_unitary,
    is_chiral,
    sample_perfect_transfer,
    transport_report,
)
from .graphs import Graph, HammingProfile, complete_allones, hamming_profile, hypercube, pst_line
from .numlin import eig_hermitian, expm_i_hermitian, logm_unitary_principal
from .walk import (
    StateVector,
    WalkDistribution,
    WalkParams,
    distribution,
    evolve_exact,
    evolve_hypercube_product,
    line_distribution,
    perfect_transfer_fidelity,
    total_variation,
)
