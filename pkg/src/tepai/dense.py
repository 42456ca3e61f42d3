"""Exact dense statevector reference for small systems.

Ground truth for unbiasedness, product-formula error, and truncation studies.
Basis convention: site 0 occupies the most significant bit of the amplitude
index, matching the left-to-right contraction order of the tensor-network
state.  Everything here is guarded to small qubit counts.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .pauli import Hamiltonian, PauliString
from .sampling import gamma_coeffs

DENSE_QUBIT_LIMIT = 12

_SITE_VECTORS = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
}


def _guard(n: int) -> None:
    if n > DENSE_QUBIT_LIMIT:
        raise ValueError(f"dense oracle limited to n <= {DENSE_QUBIT_LIMIT}, got {n}")


def product_state_dense(labels: Sequence[str]) -> np.ndarray:
    """Amplitude vector of a product state over {0, 1, +, -} site labels."""
    if len(labels) == 0:
        raise ValueError("empty state specification")
    _guard(len(labels))
    state = np.ones(1, dtype=complex)
    for lab in labels:
        if lab not in _SITE_VECTORS:
            raise ValueError(f"unknown site label {lab!r}")
        state = np.kron(state, _SITE_VECTORS[lab])
    return state


def _pauli_masks(pauli: PauliString) -> tuple[int, int, int]:
    """(flip mask, phase mask, Y count) for the permutation-phase action."""
    flip = 0
    phase = 0
    y_count = 0
    n = pauli.n
    for site, sym in pauli.ops:
        bit = 1 << (n - 1 - site)
        if sym in ("X", "Y"):
            flip |= bit
        if sym in ("Z", "Y"):
            phase |= bit
        if sym == "Y":
            y_count += 1
    return flip, phase, y_count


def apply_pauli_dense(state: np.ndarray, pauli: PauliString) -> np.ndarray:
    """P |psi>, vectorized over a trailing batch axis if present."""
    dim = 2**pauli.n
    if state.shape[0] != dim:
        raise ValueError(f"state dimension {state.shape[0]} != 2^{pauli.n}")
    flip, phase_mask, y_count = _pauli_masks(pauli)
    idx = np.arange(dim)
    parity = np.zeros(dim, dtype=np.int64)
    m = phase_mask
    while m:
        low = m & -m
        parity ^= (idx >> (low.bit_length() - 1)) & 1
        m ^= low
    factor = (1j**y_count) * np.where(parity, -1.0, 1.0)
    if state.ndim > 1:
        factor = factor[:, None]
    out = np.empty_like(state)
    out[idx ^ flip] = factor * state
    return out


def apply_rotation_dense(state: np.ndarray, pauli: PauliString, angle: float) -> np.ndarray:
    """exp(-i P angle / 2) |psi>."""
    if pauli.weight == 0:
        return np.exp(-0.5j * angle) * state
    return math.cos(0.5 * angle) * state - 1j * math.sin(0.5 * angle) * apply_pauli_dense(state, pauli)


def apply_circuit_dense(circuit, state: np.ndarray) -> np.ndarray:
    """Apply a gate sequence (TrotterCircuit or SampledCircuit) exactly."""
    _guard(circuit.n)
    out = state
    for pauli, angle in circuit.operations():
        out = apply_rotation_dense(out, pauli, angle)
    return out


def expectation_dense(state: np.ndarray, pauli: PauliString) -> float:
    return float(np.real(np.vdot(state, apply_pauli_dense(state, pauli))))


def dense_hamiltonian_matrix(ham: Hamiltonian) -> np.ndarray:
    _guard(ham.n)
    dim = 2**ham.n
    h = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for term in ham.terms:
        h += term.coeff * apply_pauli_dense(eye, term.pauli)
    return h


def hamiltonian_eigensystem(ham: Hamiltonian) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of the dense Hamiltonian, reusable across times."""
    w, v = np.linalg.eigh(dense_hamiltonian_matrix(ham))
    return w, v


def exact_evolve(
    ham: Hamiltonian,
    total_time: float,
    state: np.ndarray,
    eigensystem: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    """exp(-i H T) |psi> via spectral decomposition."""
    _guard(ham.n)
    if state.shape[0] != 2**ham.n:
        raise ValueError("state dimension does not match the Hamiltonian")
    w, v = eigensystem if eigensystem is not None else hamiltonian_eigensystem(ham)
    return v @ (np.exp(-1j * w * total_time) * (v.conj().T @ state))


# --- brute-force decomposition checks -----------------------------------------

ENUMERATION_GUARD = 8


def pai_configuration_table(
    gates: Sequence[tuple[PauliString, float]],
    delta: float,
    state: np.ndarray,
    observable: PauliString,
) -> tuple[np.ndarray, np.ndarray]:
    """Exhaustive table over all 3^nu gate-variant configurations.

    Returns (weights, values): the signed quasiprobability weight g_l of each
    configuration and the exact expectation value of the observable after the
    configured circuit.  The weighted sum reproduces the continuous-angle
    circuit; sampling configurations with probability |g_l| / sum|g_l| and
    averaging sign * value * sum|g_l| is the ensemble estimator.
    """
    nu = len(gates)
    if nu > ENUMERATION_GUARD:
        raise ValueError(f"enumeration limited to {ENUMERATION_GUARD} gates, got {nu}")
    per_gate = []
    for pauli, theta in gates:
        g1, g2, g3 = gamma_coeffs(theta, delta)
        sign = 1.0 if theta >= 0 else -1.0
        variants = (
            (g1, None, 0.0),
            (g2, pauli, sign * delta),
            (g3, pauli, math.pi),
        )
        per_gate.append(variants)
    weights = np.empty(3**nu)
    values = np.empty(3**nu)
    for idx, choice in enumerate(itertools.product(*per_gate)):
        w = 1.0
        psi = state
        for g, pauli, angle in choice:
            w *= g
            if pauli is not None:
                psi = apply_rotation_dense(psi, pauli, angle)
        weights[idx] = w
        values[idx] = expectation_dense(psi, observable)
    return weights, values


def pai_enumeration(
    gates: Sequence[tuple[PauliString, float]],
    delta: float,
    state: np.ndarray,
    observable: PauliString,
) -> float:
    """Weighted enumeration estimate: exactly the continuous-angle expectation."""
    weights, values = pai_configuration_table(gates, delta, state, observable)
    return float(np.dot(weights, values))
