"""Quasiprobability decomposition of rotation gates and random circuit-variant sampling.

A continuous rotation R(theta) = exp(-i P theta / 2) is replaced by a random
draw from three gate settings: identity, a fixed rotation by sign(theta)*Delta,
or a pi rotation.  The signed weights gamma_l make the draw an unbiased
superoperator decomposition; their absolute product over all grid slots is the
sampling-overhead norm that scales the estimator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .pauli import Hamiltonian, PauliString

IDENTITY = 0
DELTA = 1
PI = 2

_VARIANT_TOKENS = {"D+": (DELTA, 1), "D-": (DELTA, -1), "PI": (PI, 1)}

# Rotation angle minimizing the asymptotic expected gate count.
DELTA_MIN_GATES = 2.0 * math.atan(1.0 / math.sqrt(2.0))


class VariantKind(enum.IntEnum):
    IDENTITY = IDENTITY
    DELTA = DELTA
    PI = PI


@dataclass(frozen=True)
class GateVariant:
    """One drawn gate setting; ``sign`` is the rotation direction of the Delta variant."""

    kind: VariantKind
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +-1, got {self.sign}")

    def token(self) -> str:
        if self.kind == VariantKind.PI:
            return "PI"
        if self.kind == VariantKind.DELTA:
            return "D+" if self.sign > 0 else "D-"
        return "ID"


@dataclass(frozen=True)
class PaiConfig:
    """Sampling configuration: interpolation angle, step count, time span, mode."""

    delta: float
    n_steps: int
    total_time: float
    mode: str = "unbiased"

    def __post_init__(self):
        if not 0.0 < self.delta <= math.pi:
            raise ValueError(f"delta must lie in (0, pi], got {self.delta}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.total_time < 0:
            raise ValueError(f"negative total_time {self.total_time}")
        if self.mode not in ("unbiased", "no_pi"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def angles(self, ham: Hamiltonian) -> np.ndarray:
        """Per-term rotation angles 2 c_k T / N of the underlying product formula."""
        return 2.0 * ham.coefficients() * self.total_time / self.n_steps

    def validate_against(self, ham: Hamiltonian) -> None:
        worst = float(np.max(np.abs(self.angles(ham)), initial=0.0))
        if worst > self.delta * (1.0 + 1e-12):
            raise ValueError(
                f"delta={self.delta} smaller than the largest rotation angle {worst}; "
                "increase n_steps or delta"
            )


def _check_domain(theta: float, delta: float) -> float:
    if not 0.0 < delta <= math.pi:
        raise ValueError(f"delta must lie in (0, pi], got {delta}")
    t = abs(theta)
    if t > delta * (1.0 + 1e-12):
        raise ValueError(f"|theta|={t} exceeds delta={delta}")
    return min(t, delta)


def gamma_coeffs(theta: float, delta: float) -> tuple[float, float, float]:
    """Closed-form decomposition weights, evaluated at |theta|.

    gamma1 and gamma2 are nonnegative on the valid domain, gamma3 is
    nonpositive, and the three always sum to one.
    """
    t = _check_domain(theta, delta)
    half_gap = 0.5 * (delta - t)
    g1 = math.cos(0.5 * t) * math.sin(half_gap) / math.sin(0.5 * delta)
    g2 = math.sin(t) / math.sin(delta)
    g3 = -math.sin(0.5 * t) * math.sin(half_gap) / math.cos(0.5 * delta)
    return g1, g2, g3


def gamma_l1_norm(theta: float, delta: float) -> float:
    """|gamma1| + |gamma2| + |gamma3| = 1 - 2*gamma3, in cancellation-free form."""
    t = _check_domain(theta, delta)
    return 1.0 + 2.0 * math.sin(0.5 * t) * math.sin(0.5 * (delta - t)) / math.cos(0.5 * delta)


def variant_probabilities(theta: float, delta: float) -> tuple[float, float, float]:
    """Selection probabilities p_l = |gamma_l| / sum |gamma_l|."""
    g1, g2, g3 = gamma_coeffs(theta, delta)
    norm = abs(g1) + abs(g2) + abs(g3)
    return abs(g1) / norm, abs(g2) / norm, abs(g3) / norm


def _slot_probabilities(ham: Hamiltonian, cfg: PaiConfig) -> tuple[np.ndarray, np.ndarray]:
    """(L, 3) variant probabilities and the per-term |theta| array."""
    thetas = np.abs(cfg.angles(ham))
    probs = np.empty((len(thetas), 3))
    if cfg.mode == "no_pi":
        lam = thetas / cfg.delta
        probs[:, 0] = 1.0 - lam
        probs[:, 1] = lam
        probs[:, 2] = 0.0
    else:
        for k, t in enumerate(thetas):
            probs[k] = variant_probabilities(t, cfg.delta)
    return probs, thetas


def circuit_weight_norm(ham: Hamiltonian, cfg: PaiConfig) -> float:
    """Finite-depth overhead: product of single-gate norms over all N*L slots.

    Independent of the drawn configuration, hence shared by every sample of an
    ensemble.  Exactly 1 in no-pi mode.
    """
    cfg.validate_against(ham)
    if cfg.mode == "no_pi":
        return 1.0
    log_terms = 0.0
    for t in np.abs(cfg.angles(ham)):
        tt = min(float(t), cfg.delta)
        log_terms += math.log1p(
            2.0 * math.sin(0.5 * tt) * math.sin(0.5 * (cfg.delta - tt)) / math.cos(0.5 * cfg.delta)
        )
    return math.exp(cfg.n_steps * log_terms)


def expected_gate_count_inf(delta: float, c_norm: float, total_time: float) -> float:
    """Asymptotic (deep-formula) expected gate count csc(D)(3 - cos D) |c|_1 T."""
    if not 0.0 < delta <= math.pi:
        raise ValueError(f"delta must lie in (0, pi], got {delta}")
    if total_time < 0:
        raise ValueError(f"negative total_time {total_time}")
    return (3.0 - math.cos(delta)) / math.sin(delta) * c_norm * total_time


def overhead_norm_inf(delta: float, c_norm: float, total_time: float) -> float:
    """Asymptotic overhead exp[2 tan(D/2) |c|_1 T]; diverges at delta = pi."""
    if not 0.0 < delta < math.pi:
        raise ValueError(f"delta must lie in (0, pi), got {delta}")
    if total_time < 0:
        raise ValueError(f"negative total_time {total_time}")
    return math.exp(2.0 * math.tan(0.5 * delta) * c_norm * total_time)


def sample_count_bound(overhead: float, config_var: float, eps: float) -> int:
    """Samples needed for precision eps: ceil(overhead^2 * Var[v] / eps^2)."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if overhead < 1.0:
        raise ValueError(f"overhead norm must be >= 1, got {overhead}")
    if not 0.0 <= config_var <= 1.0:
        raise ValueError(f"configuration variance must lie in [0, 1], got {config_var}")
    return math.ceil(overhead**2 * config_var / eps**2)


@dataclass(frozen=True)
class SampledCircuit:
    """One drawn circuit variant, stored columnar for cheap execution.

    Entries are ordered by (step, term), i.e. application order.  Identity
    draws are omitted; ``kinds`` holds DELTA or PI codes and ``signs`` the
    rotation direction of Delta entries.
    """

    hamiltonian: Hamiltonian
    config: PaiConfig
    term_index: np.ndarray
    step_index: np.ndarray
    kinds: np.ndarray
    signs: np.ndarray
    overall_sign: int
    weight_norm: float
    sample_id: int = 0

    @property
    def nu(self) -> int:
        return len(self.term_index)

    @property
    def n(self) -> int:
        return self.hamiltonian.n

    @property
    def gates(self) -> list[tuple[int, int, GateVariant]]:
        return [
            (int(k), int(j), GateVariant(VariantKind(int(kind)), int(s)))
            for k, j, kind, s in zip(self.term_index, self.step_index, self.kinds, self.signs)
        ]

    def operations(self):
        """Yield (PauliString, angle) in application order."""
        delta = self.config.delta
        terms = self.hamiltonian.terms
        for k, kind, s in zip(self.term_index, self.kinds, self.signs):
            pauli = terms[k].pauli
            yield pauli, (math.pi if kind == PI else float(s) * delta)


def _uniform_sorted_subset(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """Uniformly random m-subset of range(n), sorted."""
    if m * m * 4 <= n:
        # rejection on whole batches: conditioning iid draws on distinctness
        # yields exactly the uniform subset law
        while True:
            vals = np.unique(rng.integers(0, n, size=m))
            if len(vals) == m:
                return vals
    return np.sort(rng.permutation(n)[:m])


# grid size above which sample_circuit switches to the per-term fast path
GRID_METHOD_CUTOFF = 4096


def sample_circuit(
    ham: Hamiltonian,
    cfg: PaiConfig,
    rng: np.random.Generator,
    sample_id: int = 0,
    method: str = "auto",
) -> SampledCircuit:
    """Draw one random circuit variant over the N x L slot grid.

    Each slot draws its variant independently.  The default ``grid`` method
    materializes every slot (cost O(N L)); the ``runs`` method draws, per
    term, a binomial count of non-identity slots plus their positions and is
    distributionally identical at O(nu) cost.  ``auto`` picks by grid size.
    """
    cfg.validate_against(ham)
    probs, _ = _slot_probabilities(ham, cfg)
    L = ham.num_terms
    N = cfg.n_steps
    term_signs = np.sign(ham.coefficients()).astype(np.int8) if L else np.zeros(0, np.int8)

    if method == "auto":
        method = "runs" if N * L > GRID_METHOD_CUTOFF else "grid"
    if method not in ("grid", "runs"):
        raise ValueError(f"unknown sampling method {method!r}")

    if method == "grid":
        if L == 0:
            kk = jj = np.zeros(0, dtype=np.int32)
            vv = np.zeros(0, dtype=np.int8)
        else:
            u = rng.random((N, L))
            t1 = probs[:, 0]
            t2 = probs[:, 0] + probs[:, 1]
            variant = np.where(u < t1, IDENTITY, np.where(u < t2, DELTA, PI))
            jj, kk = np.nonzero(variant)
            vv = variant[jj, kk].astype(np.int8)
            jj = jj.astype(np.int32)
            kk = kk.astype(np.int32)
    else:
        parts_k, parts_j, parts_v = [], [], []
        for k in range(L):
            q = probs[k, 1] + probs[k, 2]
            if q <= 0.0:
                continue
            m = int(rng.binomial(N, q))
            if m == 0:
                continue
            pos = _uniform_sorted_subset(rng, N, m)
            if probs[k, 2] == 0.0:
                kinds = np.full(m, DELTA, dtype=np.int8)
            else:
                kinds = np.where(rng.random(m) < probs[k, 1] / q, DELTA, PI).astype(np.int8)
            parts_k.append(np.full(m, k, dtype=np.int32))
            parts_j.append(pos.astype(np.int32))
            parts_v.append(kinds)
        if parts_k:
            kk = np.concatenate(parts_k)
            jj = np.concatenate(parts_j)
            vv = np.concatenate(parts_v)
            order = np.lexsort((kk, jj))
            kk, jj, vv = kk[order], jj[order], vv[order]
        else:
            kk = jj = np.zeros(0, dtype=np.int32)
            vv = np.zeros(0, dtype=np.int8)

    signs = np.where(vv == DELTA, term_signs[kk], 1).astype(np.int8) if len(kk) else np.ones(0, np.int8)
    n_pi = int(np.count_nonzero(vv == PI))
    return SampledCircuit(
        hamiltonian=ham,
        config=cfg,
        term_index=kk,
        step_index=jj,
        kinds=vv,
        signs=signs,
        overall_sign=1 - 2 * (n_pi & 1),
        weight_norm=circuit_weight_norm(ham, cfg),
        sample_id=sample_id,
    )


# --- audit/replay text records ------------------------------------------------

def circuit_to_text(circ: SampledCircuit) -> str:
    lines = [f"{circ.sample_id} {circ.overall_sign} {circ.weight_norm!r} {circ.nu}"]
    for k, j, kind, s in zip(circ.term_index, circ.step_index, circ.kinds, circ.signs):
        token = "PI" if kind == PI else ("D+" if s > 0 else "D-")
        lines.append(f"{k} {j} {token}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str, ham: Hamiltonian, cfg: PaiConfig) -> SampledCircuit:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty circuit record")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError(f"bad circuit header {lines[0]!r}")
    sample_id, sign, weight, nu = int(head[0]), int(head[1]), float(head[2]), int(head[3])
    if len(lines) - 1 != nu:
        raise ValueError(f"expected {nu} gate lines, found {len(lines) - 1}")
    kk = np.zeros(nu, dtype=np.int32)
    jj = np.zeros(nu, dtype=np.int32)
    vv = np.zeros(nu, dtype=np.int8)
    ss = np.ones(nu, dtype=np.int8)
    for i, ln in enumerate(lines[1:]):
        parts = ln.split()
        if len(parts) != 3 or parts[2] not in _VARIANT_TOKENS:
            raise ValueError(f"bad gate line {ln!r}")
        kk[i], jj[i] = int(parts[0]), int(parts[1])
        vv[i], ss[i] = _VARIANT_TOKENS[parts[2]]
    return SampledCircuit(
        hamiltonian=ham,
        config=cfg,
        term_index=kk,
        step_index=jj,
        kinds=vv,
        signs=ss,
        overall_sign=sign,
        weight_norm=weight,
        sample_id=sample_id,
    )
