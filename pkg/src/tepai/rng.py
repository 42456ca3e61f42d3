"""Deterministic random-stream derivation for reproducible parallel runs.

All randomness in the package flows through named Philox streams keyed by a
master seed plus a purpose-specific spawn key.  Streams for distinct purposes
(or distinct sample indices) are statistically independent, and the stream a
consumer receives never depends on execution order or worker count.
"""

from __future__ import annotations

import numpy as np

# Purpose namespaces.  Keeping these distinct guarantees that e.g. disorder
# draws never collide with circuit-sampling draws under a shared master seed.
_DISORDER = 0
_CIRCUIT = 1


def philox_stream(master_seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for (master_seed, key) — splittable and stable."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def disorder_stream(master_seed: int) -> np.random.Generator:
    """Stream used for drawing on-site disorder when a Hamiltonian is seeded."""
    return philox_stream(master_seed, _DISORDER)


def circuit_stream(master_seed: int, sample_id: int, time_index: int = 0) -> np.random.Generator:
    """Independent stream for one sampled circuit of one ensemble member."""
    return philox_stream(master_seed, _CIRCUIT, sample_id, time_index)
