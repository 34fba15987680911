"""Pure-Python collapsed-Gibbs kernels; fallback when the compiled extension
is unavailable.

Bit-identical to ``_gibbs.pyx``: same splitmix64 stream, same weight
arithmetic and draw. Counts are copied into plain lists for the inner loop
(Python float is the same IEEE double C uses) and written back afterwards.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


def _next_double(state: int) -> tuple[int, float]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, (z >> 11) * _INV53


def init_assignments(tokens, doc_ids, z, n_dk, n_kw, n_k, state):
    """Uniform random topic init; fills z and the count tables in place."""
    K = n_k.shape[0]
    for i in range(len(tokens)):
        state, u = _next_double(state)
        k = int(u * K)
        if k >= K:
            k = K - 1
        z[i] = k
        n_dk[doc_ids[i], k] += 1
        n_kw[k, tokens[i]] += 1
        n_k[k] += 1
    return state


def sweep_train(tokens, doc_ids, z, n_dk, n_kw, n_k, alpha, beta, state):
    """One full resampling pass over all tokens (training chain)."""
    K, V = n_kw.shape
    vbeta = V * beta
    toks = tokens.tolist()
    docs = doc_ids.tolist()
    zs = z.tolist()
    dk = n_dk.tolist()
    kw = n_kw.tolist()
    nk = n_k.tolist()
    cums = [0.0] * K
    for i in range(len(toks)):
        w = toks[i]
        d = docs[i]
        k = zs[i]
        dk_d = dk[d]
        dk_d[k] -= 1
        kw[k][w] -= 1
        nk[k] -= 1
        total = 0.0
        for kk in range(K):
            weight = (dk_d[kk] + alpha) * (kw[kk][w] + beta) / (nk[kk] + vbeta)
            total = total + weight
            cums[kk] = total
        state, u = _next_double(state)
        u = u * total
        k = K - 1
        for kk in range(K):
            if u < cums[kk]:
                k = kk
                break
        zs[i] = k
        dk_d[k] += 1
        kw[k][w] += 1
        nk[k] += 1
    z[:] = zs
    n_dk[:] = np.asarray(dk, dtype=n_dk.dtype)
    n_kw[:] = np.asarray(kw, dtype=n_kw.dtype)
    n_k[:] = nk
    return state


def sweep_doc(tokens, z, n_dk_row, phi, alpha, state):
    """One resampling pass over a single document against the frozen smoothed
    topic-word distributions (fold-in)."""
    K = phi.shape[0]
    toks = tokens.tolist()
    zs = z.tolist()
    dk = n_dk_row.tolist()
    ph = phi.tolist()
    cums = [0.0] * K
    for i in range(len(toks)):
        w = toks[i]
        k = zs[i]
        dk[k] -= 1
        total = 0.0
        for kk in range(K):
            weight = (dk[kk] + alpha) * ph[kk][w]
            total = total + weight
            cums[kk] = total
        state, u = _next_double(state)
        u = u * total
        k = K - 1
        for kk in range(K):
            if u < cums[kk]:
                k = kk
                break
        zs[i] = k
        dk[k] += 1
    z[:] = zs
    n_dk_row[:] = dk
    return state
