# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled collapsed Gibbs sampling kernel.

Mirrors ``_gibbs_py.run_gibbs`` operation for operation; the two must stay
bit-identical (same RNG, same accumulation order, compiled with
-ffp-contract=off so no FMA contraction changes the floats).
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int32_t, uint64_t

cnp.import_array()

cdef double _INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


cdef inline double _next_double(uint64_t* state) noexcept nogil:
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return <double>(z >> 11) * _INV_2_53


def run_gibbs(tokens_in, offsets_in, int K, int V, double alpha, double beta,
              int iterations, seed, init=None):
    """Same contract as the pure-Python kernel: returns
    (z, n_dk, n_kw, n_k, rng_state); pass a previous call's output state
    as ``init`` to resume sampling."""
    cdef cnp.ndarray[int32_t, ndim=1] tokens = np.ascontiguousarray(tokens_in, dtype=np.int32)
    cdef cnp.ndarray[int32_t, ndim=1] offsets = np.ascontiguousarray(offsets_in, dtype=np.int32)
    cdef Py_ssize_t n_tokens = tokens.shape[0]
    cdef Py_ssize_t n_docs = offsets.shape[0] - 1

    cdef cnp.ndarray[int32_t, ndim=1] z
    cdef cnp.ndarray[int32_t, ndim=2] n_dk
    cdef cnp.ndarray[int32_t, ndim=2] n_kw
    cdef cnp.ndarray[int32_t, ndim=1] n_k
    cdef uint64_t state
    cdef bint skip_init = init is not None

    if skip_init:
        z0, dk0, kw0, nk0, rng_state = init
        z = np.array(z0, dtype=np.int32).reshape(n_tokens)
        n_dk = np.array(dk0, dtype=np.int32).reshape(n_docs, K)
        n_kw = np.array(kw0, dtype=np.int32).reshape(K, V)
        n_k = np.array(nk0, dtype=np.int32).reshape(K)
        state = <uint64_t>(int(rng_state) & ((1 << 64) - 1))
    else:
        z = np.zeros(n_tokens, dtype=np.int32)
        n_dk = np.zeros((n_docs, K), dtype=np.int32)
        n_kw = np.zeros((K, V), dtype=np.int32)
        n_k = np.zeros(K, dtype=np.int32)
        state = <uint64_t>(int(seed) & ((1 << 64) - 1))

    cdef cnp.ndarray[cnp.float64_t, ndim=1] cum = np.zeros(K, dtype=np.float64)

    cdef int32_t* tok = <int32_t*>tokens.data
    cdef int32_t* off = <int32_t*>offsets.data
    cdef int32_t* zp = <int32_t*>z.data
    cdef int32_t* dk = <int32_t*>n_dk.data
    cdef int32_t* kw = <int32_t*>n_kw.data
    cdef int32_t* nk = <int32_t*>n_k.data
    cdef double* cp = <double*>cum.data

    cdef Py_ssize_t d, i
    cdef int k, t, w, it
    cdef double u, total, r, v_beta

    with nogil:
        if not skip_init:
            for d in range(n_docs):
                for i in range(off[d], off[d + 1]):
                    u = _next_double(&state)
                    k = <int>(u * K)
                    if k >= K:
                        k = K - 1
                    w = tok[i]
                    zp[i] = k
                    dk[d * K + k] += 1
                    kw[k * V + w] += 1
                    nk[k] += 1

        v_beta = V * beta
        for it in range(iterations):
            for d in range(n_docs):
                for i in range(off[d], off[d + 1]):
                    w = tok[i]
                    k = zp[i]
                    dk[d * K + k] -= 1
                    kw[k * V + w] -= 1
                    nk[k] -= 1

                    total = 0.0
                    for t in range(K):
                        total += (dk[d * K + t] + alpha) * (kw[t * V + w] + beta) / (nk[t] + v_beta)
                        cp[t] = total

                    u = _next_double(&state)
                    r = u * total
                    k = K - 1
                    for t in range(K):
                        if cp[t] > r:
                            k = t
                            break

                    zp[i] = k
                    dk[d * K + k] += 1
                    kw[k * V + w] += 1
                    nk[k] += 1

    return z, n_dk, n_kw, n_k, int(state)
