# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled collapsed-Gibbs kernels.

Must stay bit-identical to the pure fallback in ``_gibbs_py``: same splitmix64
stream, same weight arithmetic, same cumulative-sum draw. Any change here
needs the mirror change there (the parity test in tests/test_kernels.py
enforces it).
"""

import numpy as np

cimport numpy as cnp

cdef double _INV53 = 1.0 / 9007199254740992.0  # 2^-53


cdef inline unsigned long long _next_u64(unsigned long long *state) nogil:
    cdef unsigned long long z
    state[0] = state[0] + <unsigned long long>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <unsigned long long>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double _next_double(unsigned long long *state) nogil:
    return <double>(_next_u64(state) >> 11) * _INV53


def init_assignments(int[:] tokens, int[:] doc_ids, int[:] z,
                     int[:, :] n_dk, int[:, :] n_kw, int[:] n_k,
                     unsigned long long state):
    """Uniform random topic init; fills z and the count tables in place."""
    cdef Py_ssize_t i, n = tokens.shape[0]
    cdef int K = n_k.shape[0]
    cdef int k
    for i in range(n):
        k = <int>(_next_double(&state) * K)
        if k >= K:
            k = K - 1
        z[i] = k
        n_dk[doc_ids[i], k] += 1
        n_kw[k, tokens[i]] += 1
        n_k[k] += 1
    return state


def sweep_train(int[:] tokens, int[:] doc_ids, int[:] z,
                int[:, :] n_dk, int[:, :] n_kw, int[:] n_k,
                double alpha, double beta, unsigned long long state):
    """One full resampling pass over all tokens (training chain)."""
    cdef Py_ssize_t i, n = tokens.shape[0]
    cdef int K = n_kw.shape[0]
    cdef int V = n_kw.shape[1]
    cdef double vbeta = V * beta
    cdef double total, u, weight
    cdef int w, d, k, kk
    cdef double[::1] cums = np.empty(K, dtype=np.float64)
    for i in range(n):
        w = tokens[i]
        d = doc_ids[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for kk in range(K):
            weight = (n_dk[d, kk] + alpha) * (n_kw[kk, w] + beta) / (n_k[kk] + vbeta)
            total = total + weight
            cums[kk] = total
        u = _next_double(&state) * total
        k = K - 1
        for kk in range(K):
            if u < cums[kk]:
                k = kk
                break
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1
    return state


def sweep_doc(int[:] tokens, int[:] z, int[:] n_dk_row,
              double[:, :] phi, double alpha, unsigned long long state):
    """One resampling pass over a single document against the frozen smoothed
    topic-word distributions (fold-in)."""
    cdef Py_ssize_t i, n = tokens.shape[0]
    cdef int K = phi.shape[0]
    cdef double total, u, weight
    cdef int w, k, kk
    cdef double[::1] cums = np.empty(K, dtype=np.float64)
    for i in range(n):
        w = tokens[i]
        k = z[i]
        n_dk_row[k] -= 1
        total = 0.0
        for kk in range(K):
            weight = (n_dk_row[kk] + alpha) * phi[kk, w]
            total = total + weight
            cums[kk] = total
        u = _next_double(&state) * total
        k = K - 1
        for kk in range(K):
            if u < cums[kk]:
                k = kk
                break
        z[i] = k
        n_dk_row[k] += 1
    return state
