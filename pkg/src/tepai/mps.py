"""Matrix-product-state engine: gate application with SVD truncation, expectation
values, and cost telemetry.

The state is kept in mixed-canonical form about a tracked center site.  Site
tensors have index order (left bond, physical, right bond); boundary bonds
are one-dimensional.  After every two-site update the retained singular
values are renormalized, so the state stays unit-norm whether or not weight
was discarded.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernel
from .pauli import PauliString

_SITE_VECTORS = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
}

_PAULI_MATS = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_SYM_CODE = {"X": 1, "Y": 2, "Z": 3}


@dataclass(frozen=True)
class TruncationPolicy:
    """Bond cap plus relative singular-value floor.  ``chi_cut=None`` keeps
    every singular value above the floor (exact up to the floor)."""

    chi_cut: int | None = 16
    svalue_floor: float = 1e-12

    def __post_init__(self):
        if self.chi_cut is not None and self.chi_cut < 1:
            raise ValueError(f"chi_cut must be >= 1, got {self.chi_cut}")
        if not 0.0 <= self.svalue_floor < 1.0:
            raise ValueError(f"svalue_floor must lie in [0, 1), got {self.svalue_floor}")


EXACT = TruncationPolicy(chi_cut=None, svalue_floor=1e-14)


@dataclass
class CostLedger:
    """Monotone counters filled while a circuit runs.

    ``gate_count`` counts every unitary actually applied to the state,
    including the swap gates that route non-adjacent supports; two-site
    updates add the cube of the kept bond dimension to ``sum_chi_cubed``,
    so ``sum_chi_cubed <= gate_count * chi_max**3`` holds exactly.
    """

    gate_count: int = 0
    sum_chi_cubed: float = 0.0
    chi_max: int = 1
    wall_seconds: float = 0.0

    def absorb(self, counters: np.ndarray) -> None:
        self.gate_count += int(counters[_kernel.C_GATES])
        self.sum_chi_cubed += float(counters[_kernel.C_CHI3])
        self.chi_max = max(self.chi_max, int(counters[_kernel.C_CHIMAX]))


class MPSState:
    """Mutable MPS confined to one thread at a time."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("empty state specification")
        self.n = n
        self.cap = 1
        self.buf = np.zeros((n, 1, 2, 1), dtype=np.complex128)
        self.dims = np.ones(n + 1, dtype=np.int64)
        self.center = 0
        self.discarded_weight = 0.0

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_product(cls, labels: Sequence[str]) -> "MPSState":
        state = cls(len(labels))
        for s, lab in enumerate(labels):
            if lab not in _SITE_VECTORS:
                raise ValueError(f"unknown site label {lab!r}")
            state.buf[s, 0, :, 0] = _SITE_VECTORS[lab]
        return state

    def copy(self) -> "MPSState":
        out = MPSState.__new__(MPSState)
        out.n = self.n
        out.cap = self.cap
        out.buf = self.buf.copy()
        out.dims = self.dims.copy()
        out.center = self.center
        out.discarded_weight = self.discarded_weight
        return out

    def ensure_capacity(self, cap: int) -> None:
        if cap <= self.cap:
            return
        buf = np.zeros((self.n, cap, 2, cap), dtype=np.complex128)
        for s in range(self.n):
            cl, cr = self.dims[s], self.dims[s + 1]
            buf[s, :cl, :, :cr] = self.buf[s, :cl, :, :cr]
        self.buf = buf
        self.cap = cap

    # -- telemetry ------------------------------------------------------------

    def site_tensor(self, s: int) -> np.ndarray:
        return self.buf[s, : self.dims[s], :, : self.dims[s + 1]].copy()

    @property
    def tensors(self) -> list[np.ndarray]:
        return [self.site_tensor(s) for s in range(self.n)]

    @property
    def bond_dims(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.dims)

    def max_bond(self) -> int:
        return int(self.dims.max())

    def norm_sq(self) -> float:
        env = np.ones((1, 1), dtype=complex)
        for s in range(self.n):
            t = self.buf[s, : self.dims[s], :, : self.dims[s + 1]]
            tmp = np.tensordot(env, t, axes=(1, 0))
            env = np.tensordot(t.conj(), tmp, axes=([0, 1], [0, 1]))
        return float(np.real(env[0, 0]))

    def to_statevector(self) -> np.ndarray:
        if self.n > 16:
            raise ValueError("statevector conversion limited to n <= 16")
        vec = np.ones((1, 1), dtype=complex)
        for s in range(self.n):
            t = self.buf[s, : self.dims[s], :, : self.dims[s + 1]]
            vec = np.tensordot(vec, t, axes=(-1, 0)).reshape(-1, self.dims[s + 1])
        return vec[:, 0]


def init_product_state(labels: Sequence[str]) -> MPSState:
    """Product state over per-site labels from {0, 1, +, -}; all bonds are 1."""
    return MPSState.from_product(labels)


def max_bond(state: MPSState) -> int:
    return state.max_bond()


def discarded_weight(state: MPSState) -> float:
    """Cumulative squared Schmidt weight removed by truncation so far."""
    return state.discarded_weight


def expectation(state: MPSState, pauli: PauliString) -> float:
    """<psi| P |psi> by transfer contraction, exact for the stored state."""
    if pauli.n != state.n:
        raise ValueError(f"observable on {pauli.n} qubits, state has {state.n}")
    env = np.ones((1, 1), dtype=complex)
    for s in range(state.n):
        t = state.buf[s, : state.dims[s], :, : state.dims[s + 1]]
        tmp = np.tensordot(env, t, axes=(1, 0))
        sym = pauli.symbol_at(s)
        if sym != "I":
            tmp = np.tensordot(_PAULI_MATS[sym], tmp, axes=(1, 1)).transpose(1, 0, 2)
        env = np.tensordot(t.conj(), tmp, axes=([0, 1], [0, 1]))
    return float(np.real(env[0, 0]))


# -- gate streams ---------------------------------------------------------------

def _policy_cap(state: MPSState, policy: TruncationPolicy) -> tuple[int, int]:
    """(buffer capacity, effective chi_cut) for this state under the policy."""
    hard = 2 ** (state.n // 2)
    cut = hard if policy.chi_cut is None else min(policy.chi_cut, hard)
    return cut, cut


def _lower_operations(ops, n: int):
    ga, gb, pa, pb, ang = [], [], [], [], []
    for pauli, angle in ops:
        if pauli.n != n:
            raise ValueError("gate qubit count differs from state")
        if angle == 0.0 or pauli.weight == 0:
            continue
        if pauli.weight == 1:
            (site, sym), = pauli.ops
            ga.append(site)
            gb.append(-1)
            pa.append(_SYM_CODE[sym])
            pb.append(0)
        elif pauli.weight == 2:
            (a, sa), (b, sb) = pauli.ops
            ga.append(a)
            gb.append(b)
            pa.append(_SYM_CODE[sa])
            pb.append(_SYM_CODE[sb])
        else:
            raise ValueError(f"gate weight {pauli.weight} > 2 is not supported")
        ang.append(float(angle))
    m = len(ga)
    ga_a = np.array(ga, dtype=np.int64)
    gb_a = np.array(gb, dtype=np.int64)
    # bond each gate touches first: its own left site, or the first swap bond;
    # each two-site gate then looks ahead to the next such anchor to pick the
    # cheaper split direction
    anchors = np.where(gb_a > ga_a + 1, gb_a - 1, ga_a)
    nxt = anchors.copy()
    follow = -1
    for i in range(m - 1, -1, -1):
        if gb_a[i] >= 0:
            nxt[i] = follow if follow >= 0 else anchors[i]
            follow = anchors[i]
    return (
        ga_a,
        gb_a,
        np.array(pa, dtype=np.int64),
        np.array(pb, dtype=np.int64),
        np.array(ang, dtype=np.float64),
        nxt.astype(np.int64),
    )


def _run_lowered(state, stream, policy, ledger, engine):
    cap, cut = _policy_cap(state, policy)
    state.ensure_capacity(cap)
    counters = np.zeros(4, dtype=np.float64)
    counters[_kernel.C_CHIMAX] = state.max_bond()
    runner = _kernel.run_stream if engine != "reference" else _kernel.run_stream.py_func
    state.center = int(
        runner(
            state.buf,
            state.dims,
            state.center,
            *stream,
            cut,
            policy.svalue_floor,
            counters,
        )
    )
    state.discarded_weight += float(counters[_kernel.C_DISCARDED])
    if ledger is not None:
        ledger.absorb(counters)


def apply_pauli_rotation(
    state: MPSState,
    pauli: PauliString,
    angle: float,
    policy: TruncationPolicy,
    ledger: CostLedger | None = None,
    engine: str = "auto",
) -> MPSState:
    """Apply exp(-i P angle / 2) in place.  Weight-2 supports may be
    non-adjacent; routing swaps are applied, charged, and undone."""
    stream = _lower_operations([(pauli, angle)], state.n)
    _run_lowered(state, stream, policy, ledger, engine)
    return state


def run_circuit(
    state: MPSState,
    circuit,
    policy: TruncationPolicy,
    ledger: CostLedger | None = None,
    engine: str = "auto",
) -> MPSState:
    """Apply a TrotterCircuit or SampledCircuit in order; fills the ledger."""
    if circuit.n != state.n:
        raise ValueError(f"circuit on {circuit.n} qubits, state has {state.n}")
    stream = _lower_operations(circuit.operations(), state.n)
    _run_lowered(state, stream, policy, ledger, engine)
    return state


# -- snapshots ------------------------------------------------------------------

_SNAP_MAGIC = "MPS1"


def snapshot_to_bytes(state: MPSState) -> bytes:
    """Dimension header plus raw little-endian complex128 site tensors."""
    head = io.StringIO()
    head.write(f"{_SNAP_MAGIC} {state.n} {state.center} {state.discarded_weight!r}\n")
    for s in range(state.n):
        head.write(f"{state.dims[s]} {state.dims[s + 1]}\n")
    blob = b"".join(
        np.ascontiguousarray(state.site_tensor(s), dtype="<c16").tobytes() for s in range(state.n)
    )
    return head.getvalue().encode("ascii") + blob


def snapshot_from_bytes(data: bytes) -> MPSState:
    newline = data.index(b"\n")
    head = data[:newline].decode("ascii").split()
    if len(head) != 4 or head[0] != _SNAP_MAGIC:
        raise ValueError("not an MPS snapshot")
    n = int(head[1])
    center = int(head[2])
    disc = float(head[3])
    pos = newline + 1
    dims = [1]
    for s in range(n):
        newline = data.index(b"\n", pos)
        cl, cr = (int(x) for x in data[pos:newline].decode("ascii").split())
        if cl != dims[-1]:
            raise ValueError("inconsistent bond dimensions in snapshot")
        dims.append(cr)
        pos = newline + 1
    state = MPSState(n)
    state.ensure_capacity(max(dims))
    state.dims = np.array(dims, dtype=np.int64)
    state.center = center
    state.discarded_weight = disc
    for s in range(n):
        cl, cr = dims[s], dims[s + 1]
        count = cl * 2 * cr
        t = np.frombuffer(data[pos : pos + 16 * count], dtype="<c16").reshape(cl, 2, cr)
        state.buf[s, :cl, :, :cr] = t
        pos += 16 * count
    if pos != len(data):
        raise ValueError("trailing bytes in snapshot")
    return state


def save_snapshot(state: MPSState, path) -> None:
    with open(path, "wb") as fh:
        fh.write(snapshot_to_bytes(state))


def load_snapshot(path) -> MPSState:
    with open(path, "rb") as fh:
        return snapshot_from_bytes(fh.read())
