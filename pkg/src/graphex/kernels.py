"""Backend selection for the all-pairs edge kernel.

Prefers the compiled extension, falls back to the numpy implementation, and
honors GRAPHEX_FORCE_PYTHON_KERNEL=1 for testing backend equivalence.  Both
backends implement the same contract and produce identical edge lists.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernel_py

FORM_SEPARABLE = 0
FORM_SHIFTED_POWER = 1
FORM_EXP_LINK = 2
FORM_BLOCK = 3

_DUMMY_B = np.ones((1, 1), dtype=np.float64)

if os.environ.get("GRAPHEX_FORCE_PYTHON_KERNEL") == "1":
    _impl = _kernel_py
    BACKEND = "python"
else:
    try:
        from . import _kernel_c as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernel_py
        BACKEND = "python"


def find_edges(seed: int, a: np.ndarray, form: int, expo: float = 0.0,
               block_b: np.ndarray | None = None,
               labels: np.ndarray | None = None):
    """Scan all unordered pairs (incl. diagonal) for edges.

    `a` holds the per-node weight: g(vartheta) for separable forms,
    vartheta itself for the shifted-power form, the transformed sociability
    for the exponential-link form.  Returns (i_idx, j_idx) with i <= j.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    if block_b is None:
        block_b = _DUMMY_B
    if labels is None:
        labels = np.zeros(a.shape[0], dtype=np.int64)
    block_b = np.ascontiguousarray(block_b, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    return _impl.find_edges(seed & ((1 << 64) - 1), a, int(form),
                            float(expo), block_b, labels)


def python_find_edges(seed: int, a: np.ndarray, form: int, expo: float = 0.0,
                      block_b: np.ndarray | None = None,
                      labels: np.ndarray | None = None):
    """Same as find_edges but always on the numpy backend (for benchmarks)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    if block_b is None:
        block_b = _DUMMY_B
    if labels is None:
        labels = np.zeros(a.shape[0], dtype=np.int64)
    return _kernel_py.find_edges(seed & ((1 << 64) - 1), a, int(form),
                                 float(expo),
                                 np.ascontiguousarray(block_b, dtype=np.float64),
                                 np.ascontiguousarray(labels, dtype=np.int64))
