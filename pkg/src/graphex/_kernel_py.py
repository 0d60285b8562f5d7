"""Pure-numpy fallback for the all-pairs edge kernel.

Mirrors _kernel_c.find_edges exactly: same pair ordering (row-major over
i <= j), same link-probability formulas, same counter-based uniforms, so a
graph sampled with either backend is identical bit for bit.
"""

from __future__ import annotations

import numpy as np

from .rng import pair_uniform_array

# rows per block in the vectorized scan; keeps the (block x n) temporaries
# around tens of MB for the largest naive instances
_BLOCK_ROWS = 128


def _prob_block(rows: np.ndarray, a: np.ndarray, form: int, expo: float,
                block_b: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Link probabilities p[r, j] for row indices `rows` against all j."""
    ar = a[rows][:, None]
    if form == 0:
        p = ar * a[None, :]
    elif form == 1:
        p = np.power(ar + a[None, :] + 1.0, expo)
    elif form == 2:
        p = 1.0 - np.exp(-2.0 * ar * a[None, :])
        # diagonal entries use the on-diagonal link form 1 - exp(-a^2)
        on_diag = np.nonzero((rows[:, None] == np.arange(a.shape[0])[None, :]))
        p[on_diag] = 1.0 - np.exp(-(a[rows] * a[rows]))
    else:
        p = block_b[labels[rows][:, None], labels[None, :]] * (ar * a[None, :])
    return p


def find_edges(seed: int, a: np.ndarray, form: int, expo: float,
               block_b: np.ndarray, labels: np.ndarray):
    """All-pairs Bernoulli edge scan; returns (i_idx, j_idx) int64 arrays."""
    n = a.shape[0]
    cols = np.arange(n, dtype=np.int64)
    out_i = []
    out_j = []
    for start in range(0, n, _BLOCK_ROWS):
        rows = np.arange(start, min(start + _BLOCK_ROWS, n), dtype=np.int64)
        p = _prob_block(rows, a, form, expo, block_b, labels)
        upper = cols[None, :] >= rows[:, None]  # unordered pairs i <= j only
        ii, jj = np.nonzero(upper & (p > 0.0))
        gi = rows[ii]
        gj = cols[jj]
        u = pair_uniform_array(seed, gi, gj)
        keep = u <= p[ii, jj]
        out_i.append(gi[keep])
        out_j.append(gj[keep])
    if not out_i:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy()
    return np.concatenate(out_i), np.concatenate(out_j)
