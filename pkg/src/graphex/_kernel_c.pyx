# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled all-pairs edge kernel.

Scans every unordered pair (i, j), i <= j, of latent points, computes the
link probability from a precomputed per-node weight array and a small form
id, draws the pair's counter-based uniform and records an edge when the
uniform falls below the probability.  Arithmetic is kept in exact lockstep
with the numpy fallback in _kernel_py so both backends emit the same graph
bit for bit.

Forms:
  0  separable          p = a[i] * a[j]           (diagonal a[i]^2)
  1  shifted power      p = (a[i]+a[j]+1)^expo    (diagonal (2a[i]+1)^expo)
  2  exponential link   p = 1 - exp(-2 a[i]a[j])  (diagonal 1 - exp(-a[i]^2))
  3  blockwise          p = B[k[i],k[j]] a[i]a[j] (diagonal B[k,k] a[i]^2)
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, pow

cnp.import_array()

ctypedef unsigned long long u64

cdef double _U53 = 1.0 / 9007199254740992.0  # 2^-53


cdef inline u64 _splitmix64(u64 z) nogil:
    z = z + <u64>0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double _pair_uniform(u64 seed, u64 i, u64 j) nogil:
    cdef u64 h = <u64>0x243F6A8885A308D3
    h = _splitmix64(h ^ seed)
    h = _splitmix64(h ^ i)
    h = _splitmix64(h ^ j)
    return <double>(h >> 11) * _U53


def find_edges(u64 seed,
               double[::1] a,
               int form,
               double expo,
               double[:, ::1] block_b,
               long[::1] labels):
    """All-pairs Bernoulli edge scan; returns (i_idx, j_idx) int64 arrays.

    Pairs are visited in row-major order (i ascending, j ascending from i),
    matching the fallback backend exactly.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, count = 0, cap = 256
    cdef double p, ai
    cdef u64 useed = seed

    out_i = np.empty(cap, dtype=np.int64)
    out_j = np.empty(cap, dtype=np.int64)
    cdef long[::1] vi = out_i
    cdef long[::1] vj = out_j

    for i in range(n):
        ai = a[i]
        for j in range(i, n):
            if form == 0:
                p = ai * a[j]
            elif form == 1:
                if i == j:
                    p = pow(2.0 * ai + 1.0, expo)
                else:
                    p = pow(ai + a[j] + 1.0, expo)
            elif form == 2:
                if i == j:
                    p = 1.0 - exp(-(ai * ai))
                else:
                    p = 1.0 - exp(-2.0 * ai * a[j])
            else:
                p = block_b[labels[i], labels[j]] * ai * a[j]
            if p <= 0.0:
                continue
            if _pair_uniform(useed, <u64>i, <u64>j) <= p:
                if count == cap:
                    cap *= 2
                    out_i = np.resize(out_i, cap)
                    out_j = np.resize(out_j, cap)
                    vi = out_i
                    vj = out_j
                vi[count] = i
                vj[count] = j
                count += 1
    return out_i[:count].copy(), out_j[:count].copy()
