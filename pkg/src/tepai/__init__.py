"""Randomized-circuit time evolution on matrix product states.

Simulates Hamiltonian dynamics two ways: a deterministic first-order product
formula, and an ensemble of shallow random circuit variants whose average
reproduces the product formula exactly.  Includes an exact dense oracle for
verification, ensemble statistics with variance decomposition, bond-dimension
truncation studies, hybrid deterministic-to-randomized schedules, and a
parallel runner with explicit cost accounting.
"""

from .pauli import (
    Hamiltonian,
    HamTerm,
    PauliString,
    build_spin_ring,
    coeff_l1_norm,
    commutator_error_norm,
    trotter_gate_count_bound,
)
from .sampling import (
    GateVariant,
    PaiConfig,
    SampledCircuit,
    VariantKind,
    expected_gate_count_inf,
    gamma_coeffs,
    overhead_norm_inf,
    sample_circuit,
    sample_count_bound,
    variant_probabilities,
)
from .trotter import BaselinePolicy, TrotterCircuit, baseline_steps, build_trotter_circuit, single_step_error
from .mps import (
    CostLedger,
    MPSState,
    TruncationPolicy,
    apply_pauli_rotation,
    discarded_weight,
    expectation,
    init_product_state,
    max_bond,
    run_circuit,
)
from .dense import (
    apply_circuit_dense,
    exact_evolve,
    expectation_dense,
    pai_enumeration,
    product_state_dense,
)

__version__ = "0.1.0"
