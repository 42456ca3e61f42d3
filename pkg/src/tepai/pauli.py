"""Pauli-string arithmetic, spin-ring Hamiltonian construction, and coefficient norms."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rng import disorder_stream

_PAULI_CHARS = "IXYZ"
_TOKEN_RE = re.compile(r"([XYZ])(\d+)")

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Single-qubit products: (a, b) -> (phase, c) with sigma_a sigma_b = phase * sigma_c
_PRODUCT = {}
for _a in "XYZ":
    _PRODUCT[("I", _a)] = (1.0, _a)
    _PRODUCT[(_a, "I")] = (1.0, _a)
    _PRODUCT[(_a, _a)] = (1.0, "I")
_PRODUCT[("I", "I")] = (1.0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (1j, _c)
    _PRODUCT[(_b, _a)] = (-1j, _c)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Pauli operators on ``n`` qubits.

    Only the non-identity support is stored: ``ops`` maps site -> symbol and
    is kept sorted by site so equality is positional.
    """

    n: int
    ops: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        seen = set()
        for site, sym in self.ops:
            if not 0 <= site < self.n:
                raise ValueError(f"support site {site} outside [0, {self.n})")
            if sym not in "XYZ":
                raise ValueError(f"invalid Pauli symbol {sym!r}")
            if site in seen:
                raise ValueError(f"duplicate site {site} in Pauli support")
            seen.add(site)
        object.__setattr__(self, "ops", tuple(sorted(self.ops)))

    @classmethod
    def from_label(cls, label: str, n: int) -> "PauliString":
        """Parse a compact label such as ``"X2X3"`` or ``"I"``."""
        label = label.strip()
        if label in ("", "I"):
            return cls(n)
        matched = "".join(f"{s}{q}" for s, q in _TOKEN_RE.findall(label))
        if matched != label:
            raise ValueError(f"malformed Pauli label {label!r}")
        return cls(n, tuple((int(q), s) for s, q in _TOKEN_RE.findall(label)))

    @classmethod
    def single(cls, n: int, site: int, sym: str) -> "PauliString":
        return cls(n, ((site, sym),))

    @property
    def weight(self) -> int:
        return len(self.ops)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(site for site, _ in self.ops)

    def symbol_at(self, site: int) -> str:
        for s, sym in self.ops:
            if s == site:
                return sym
        return "I"

    def label(self) -> str:
        if not self.ops:
            return "I"
        return "".join(f"{sym}{site}" for site, sym in self.ops)

    def __str__(self) -> str:
        return self.label()

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; site 0 is the most significant factor."""
        out = np.ones((1, 1), dtype=complex)
        for site in range(self.n):
            out = np.kron(out, _PAULI_MATS[self.symbol_at(site)])
        return out


def pauli_product(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Return (phase, c) with a @ b = phase * c."""
    if a.n != b.n:
        raise ValueError("qubit counts differ")
    phase = 1.0 + 0j
    ops = []
    for site in sorted(set(a.support) | set(b.support)):
        ph, sym = _PRODUCT[(a.symbol_at(site), b.symbol_at(site))]
        phase *= ph
        if sym != "I":
            ops.append((site, sym))
    return phase, PauliString(a.n, tuple(ops))


def paulis_commute(a: PauliString, b: PauliString) -> bool:
    """Pauli strings commute iff they anticommute on an even number of sites."""
    odd = 0
    for site in set(a.support) & set(b.support):
        sa, sb = a.symbol_at(site), b.symbol_at(site)
        if sa != "I" and sb != "I" and sa != sb:
            odd ^= 1
    return odd == 0


@dataclass(frozen=True)
class HamTerm:
    """One weighted Pauli term.  Zero or non-finite coefficients are rejected."""

    coeff: float
    pauli: PauliString

    def __post_init__(self):
        if not math.isfinite(self.coeff):
            raise ValueError(f"non-finite coefficient {self.coeff}")
        if self.coeff == 0.0:
            raise ValueError("zero-coefficient terms must be dropped at construction")


@dataclass(frozen=True)
class Hamiltonian:
    """Ordered sum of weighted Pauli terms; the order fixes the product formula.

    ``coupling`` and ``seed`` are construction metadata carried for
    serialization only; they do not affect any numerics beyond the terms.
    """

    n: int
    terms: tuple[HamTerm, ...]
    coupling: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        for t in self.terms:
            if t.pauli.n != self.n:
                raise ValueError("term qubit count differs from Hamiltonian")

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def coefficients(self) -> np.ndarray:
        return np.array([t.coeff for t in self.terms])


def build_spin_ring(n: int, coupling: float, omega: Sequence[float] | int) -> Hamiltonian:
    """Disordered spin ring: on-site Z fields plus isotropic nearest-neighbour
    XX+YY+ZZ couplings around a periodic chain.

    Args:
        n: number of sites, at least 3 (a 2-ring would duplicate bonds).
        coupling: bond strength applied to each of the three bond terms.
        omega: explicit per-site field values, or an integer seed from which
            fields are drawn uniformly from [-1, 1].

    Term order is canonical: Z terms by site, then bond terms by bond index
    and X/Y/Z within a bond.  Zero-coefficient terms are dropped.
    """
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    if not math.isfinite(coupling):
        raise ValueError("non-finite coupling")
    seed = None
    if isinstance(omega, (int, np.integer)):
        seed = int(omega)
        omega_vals = disorder_stream(seed).uniform(-1.0, 1.0, size=n)
    else:
        omega_vals = np.asarray(omega, dtype=float)
        if omega_vals.shape != (n,):
            raise ValueError(f"omega must have length {n}, got shape {omega_vals.shape}")
        if not np.all(np.isfinite(omega_vals)):
            raise ValueError("non-finite omega values")

    terms: list[HamTerm] = []
    for k in range(n):
        if omega_vals[k] != 0.0:
            terms.append(HamTerm(float(omega_vals[k]), PauliString.single(n, k, "Z")))
    if coupling != 0.0:
        for bond in range(n):
            a, b = bond, (bond + 1) % n
            for sym in "XYZ":
                terms.append(HamTerm(float(coupling), PauliString(n, ((a, sym), (b, sym)))))
    return Hamiltonian(n, tuple(terms), coupling=float(coupling), seed=seed)


def coeff_l1_norm(ham: Hamiltonian) -> float:
    """Sum of absolute term coefficients."""
    return float(sum(abs(t.coeff) for t in ham.terms))


DENSE_GUARD = 10


def _scatter_pauli(acc: np.ndarray, weight: complex, pauli: PauliString, n: int) -> None:
    """acc += weight * dense(pauli), built from the permutation-phase action."""
    dim = acc.shape[0]
    idx = np.arange(dim)
    flip = 0
    phase_mask = 0
    y_count = 0
    for site, sym in pauli.ops:
        bit = 1 << (n - 1 - site)
        if sym in ("X", "Y"):
            flip |= bit
        if sym in ("Z", "Y"):
            phase_mask |= bit
        if sym == "Y":
            y_count += 1
    parity = np.zeros(dim, dtype=np.int64)
    m = phase_mask
    while m:
        low = m & -m
        shift = low.bit_length() - 1
        parity ^= (idx >> shift) & 1
        m ^= low
    vals = weight * (1j**y_count) * np.where(parity, -1.0, 1.0)
    acc[idx ^ flip, idx] += vals


def commutator_error_norm(ham: Hamiltonian) -> float:
    """Squared first-order product-formula error norm.

    Returns sum over gamma1 of the spectral norm of
    sum_{gamma2 > gamma1} [c2 h2, c1 h1], evaluated densely.  Guarded to
    small systems since spectral norms need the full matrices.
    """
    if ham.n > DENSE_GUARD:
        raise ValueError(f"dense evaluation limited to n <= {DENSE_GUARD}, got {ham.n}")
    L = ham.num_terms
    dim = 2**ham.n
    total = 0.0
    for g1 in range(L):
        t1 = ham.terms[g1]
        acc = np.zeros((dim, dim), dtype=complex)
        nonzero = False
        for g2 in range(g1 + 1, L):
            t2 = ham.terms[g2]
            if paulis_commute(t1.pauli, t2.pauli):
                continue
            # [P2, P1] = 2 P2 P1 for anticommuting strings
            phase, prod = pauli_product(t2.pauli, t1.pauli)
            _scatter_pauli(acc, 2.0 * t2.coeff * t1.coeff * phase, prod, ham.n)
            nonzero = True
        if nonzero:
            total += float(np.linalg.norm(acc, 2))
    return total


def trotter_gate_count_bound(ham: Hamiltonian, total_time: float, eps: float) -> float:
    """Upper bound on the first-order product-formula gate count at error eps."""
    if eps <= 0:
        raise ValueError(f"tolerance must be positive, got {eps}")
    if total_time < 0:
        raise ValueError(f"negative time {total_time}")
    return 0.5 * ham.num_terms * total_time**2 * commutator_error_norm(ham) / eps


# --- line-oriented text serialization ----------------------------------------

def hamiltonian_to_text(ham: Hamiltonian) -> str:
    """Header ``n J seed`` then one ``coeff pauli`` line per term.

    Coefficients use shortest round-trip decimal form, so parsing the text
    reproduces the Hamiltonian exactly.
    """
    seed = "-" if ham.seed is None else str(ham.seed)
    lines = [f"{ham.n} {ham.coupling!r} {seed}"]
    lines.extend(f"{t.coeff!r} {t.pauli.label()}" for t in ham.terms)
    return "\n".join(lines) + "\n"


def hamiltonian_from_text(text: str) -> Hamiltonian:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty Hamiltonian text")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"bad header {lines[0]!r}, expected 'n J seed'")
    n = int(head[0])
    coupling = float(head[1])
    seed = None if head[2] == "-" else int(head[2])
    terms = []
    for ln in lines[1:]:
        parts = ln.split(None, 1)
        if len(parts) != 2:
            raise ValueError(f"bad term line {ln!r}")
        terms.append(HamTerm(float(parts[0]), PauliString.from_label(parts[1], n)))
    return Hamiltonian(n, tuple(terms), coupling=coupling, seed=seed)
