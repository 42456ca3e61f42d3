"""First-order product-formula circuits and the fixed-accuracy baseline step policy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import Hamiltonian, PauliString, commutator_error_norm


@dataclass(frozen=True)
class TrotterCircuit:
    """N repetitions of the per-term rotation block, in canonical term order."""

    hamiltonian: Hamiltonian
    n_steps: int
    total_time: float
    gates: tuple[tuple[PauliString, float], ...]

    @property
    def n(self) -> int:
        return self.hamiltonian.n

    @property
    def nu(self) -> int:
        return len(self.gates)

    def operations(self):
        return iter(self.gates)


@dataclass(frozen=True)
class BaselinePolicy:
    """Quadratic step extrapolation anchored at a short reference time."""

    delta_t: float = 0.1
    n_ref: int = 20

    def __post_init__(self):
        if self.delta_t <= 0:
            raise ValueError(f"reference time must be positive, got {self.delta_t}")
        if self.n_ref < 1:
            raise ValueError(f"reference steps must be >= 1, got {self.n_ref}")


def build_trotter_circuit(ham: Hamiltonian, total_time: float, n_steps: int) -> TrotterCircuit:
    """Gate list of the first-order formula: angles theta_k = 2 c_k T / N."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if total_time < 0:
        raise ValueError(f"negative total_time {total_time}")
    block = tuple(
        (t.pauli, 2.0 * t.coeff * total_time / n_steps) for t in ham.terms
    )
    return TrotterCircuit(ham, n_steps, total_time, block * n_steps)


def baseline_steps(policy: BaselinePolicy, total_time: float) -> int:
    """Steps for time T under the constant-accuracy quadratic scaling, rounded up."""
    if total_time <= 0:
        raise ValueError(f"baseline policy needs T > 0, got {total_time}")
    return math.ceil(policy.n_ref * (total_time / policy.delta_t) ** 2)


def single_step_error(ham: Hamiltonian, total_time: float, n_steps: int) -> float:
    """Spectral-norm distance of one product-formula block from exp(-i H T/N).

    Dense diagnostic; the result is bounded by (T^2 / 2N^2) * the squared
    commutator norm of the term list.
    """
    from .dense import dense_hamiltonian_matrix, DENSE_QUBIT_LIMIT

    if ham.n > DENSE_QUBIT_LIMIT:
        raise ValueError(f"dense evaluation limited to n <= {DENSE_QUBIT_LIMIT}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    tau = total_time / n_steps
    h = dense_hamiltonian_matrix(ham)
    w, v = np.linalg.eigh(h)
    exact = (v * np.exp(-1j * w * tau)) @ v.conj().T
    dim = 2**ham.n
    block = np.eye(dim, dtype=complex)
    # gates act in list order: the block operator is the reversed matrix product
    for term in ham.terms:
        p = term.pauli.matrix()
        angle = term.coeff * tau
        block = (math.cos(angle) * np.eye(dim) - 1j * math.sin(angle) * p) @ block
    return float(np.linalg.norm(block - exact, 2))


def single_step_error_bound(ham: Hamiltonian, total_time: float, n_steps: int) -> float:
    return total_time**2 / (2.0 * n_steps**2) * commutator_error_norm(ham)


def trotter_circuit_to_text(circ: TrotterCircuit) -> str:
    """Same record shape as sampled circuits, with continuous angles."""
    term_pos = {t.pauli: k for k, t in enumerate(circ.hamiltonian.terms)}
    lines = [f"0 1 1.0 {circ.nu}"]
    for i, (pauli, angle) in enumerate(circ.gates):
        k = term_pos[pauli]
        j = i // circ.hamiltonian.num_terms
        lines.append(f"{k} {j} {angle!r}")
    return "\n".join(lines) + "\n"
