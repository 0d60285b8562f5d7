"""Counter-based splittable random streams.

Edge indicators are a pure function of (seed, i, j): the draw for a pair is
obtained by hashing the pair into a 64-bit word and mapping it to [0, 1).
This makes pair sampling order-independent, so any parallel or blocked
execution of the naive sampler produces the identical graph.  All other
randomness (latent points, proposal streams) uses numpy Philox generators
keyed by substreams derived with the same mixer.

The scalar and numpy implementations below are kept in exact arithmetic
lockstep with the compiled kernel (same splitmix64 finalizer chain).
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U53 = 1.0 / (1 << 53)


def splitmix64(z: int) -> int:
    """splitmix64 finalizer step (scalar)."""
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def mix64(*words: int) -> int:
    """Combine 64-bit words into one well-mixed 64-bit value."""
    h = 0x243F6A8885A308D3  # pi fractional bits; arbitrary nonzero start
    for w in words:
        h = splitmix64((h ^ (w & _MASK)) & _MASK)
    return h


def pair_uniform(seed: int, i: int, j: int) -> float:
    """Uniform(0,1) draw attached to the unordered pair (i, j), i <= j."""
    return (mix64(seed, i, j) >> 11) * _U53


def pair_uniform_array(seed: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Vectorized pair_uniform; bitwise identical to the scalar version."""
    golden = np.uint64(_GOLDEN)
    mix1 = np.uint64(_MIX1)
    mix2 = np.uint64(_MIX2)

    def _sm(z):
        z = z + golden
        z = (z ^ (z >> np.uint64(30))) * mix1
        z = (z ^ (z >> np.uint64(27))) * mix2
        return z ^ (z >> np.uint64(31))

    with np.errstate(over="ignore"):  # uint64 wraparound is the point
        h = np.uint64(0x243F6A8885A308D3)
        h = _sm(h ^ np.uint64(seed & _MASK))
        h = _sm(h ^ i.astype(np.uint64))
        h = _sm(h ^ j.astype(np.uint64))
        return (h >> np.uint64(11)).astype(np.float64) * _U53


def substream(seed: int, *tags: int) -> np.random.Generator:
    """Philox generator on an independent stream derived from (seed, tags)."""
    return np.random.Generator(np.random.Philox(key=mix64(seed, *tags)))


def replicate_seed(master_seed: int, alpha_index: int, replicate_index: int) -> int:
    """Per-replicate seed used by sweeps: mix64(master, alpha_idx, rep_idx)."""
    return mix64(master_seed, alpha_index, replicate_index)
