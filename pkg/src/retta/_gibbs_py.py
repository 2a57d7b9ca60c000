"""Pure-Python collapsed Gibbs sampling kernel.

This is the fallback for the compiled kernel in ``_gibbs.pyx``; both
produce bit-identical output for the same inputs and seed, which the test
suite asserts whenever the extension is importable.  Keeping them
interchangeable pins down every numeric detail:

* RNG: splitmix64 seeded directly with the user seed; one 64-bit draw is
  turned into a double in [0, 1) by taking the top 53 bits.
* Initialization: each token, in document order then position order, draws
  one uniform and is assigned ``int(u * K)``.
* Sweeps: documents in order, tokens in position order; the full
  conditional for topic t is
  ``(n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)``
  with the current token's counts removed, accumulated left to right, and
  the new topic is the first whose cumulative mass exceeds ``u * total``.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _next_double(state: int) -> tuple[int, float]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return state, (z >> 11) * _INV_2_53


def run_gibbs(tokens, offsets, K: int, V: int, alpha: float, beta: float,
              iterations: int, seed: int, init=None):
    """Run initialization plus ``iterations`` full sweeps.

    ``tokens`` holds vocabulary indices for all documents concatenated;
    ``offsets[d]:offsets[d+1]`` is document d's slice.  Returns int32
    arrays (z, n_dk, n_kw, n_k) plus the final RNG state.

    Passing a previous call's ``(z, n_dk, n_kw, n_k, rng_state)`` as
    ``init`` resumes sampling exactly where it stopped: running N sweeps
    in one call or one at a time produces identical output.
    """
    tokens = [int(w) for w in tokens]
    offsets = [int(o) for o in offsets]
    n_tokens = len(tokens)
    n_docs = len(offsets) - 1

    if init is not None:
        z0, dk0, kw0, nk0, rng_state = init
        z = [int(v) for v in np.asarray(z0).ravel()]
        n_dk = [int(v) for v in np.asarray(dk0).ravel()]
        n_kw = [int(v) for v in np.asarray(kw0).ravel()]
        n_k = [int(v) for v in np.asarray(nk0).ravel()]
        state = int(rng_state) & _MASK
    else:
        z = [0] * n_tokens
        n_dk = [0] * (n_docs * K)
        n_kw = [0] * (K * V)
        n_k = [0] * K
        state = seed & _MASK

        for d in range(n_docs):
            base = d * K
            for i in range(offsets[d], offsets[d + 1]):
                state, u = _next_double(state)
                k = int(u * K)
                if k >= K:
                    k = K - 1
                w = tokens[i]
                z[i] = k
                n_dk[base + k] += 1
                n_kw[k * V + w] += 1
                n_k[k] += 1

    v_beta = V * beta
    cum = [0.0] * K
    for _ in range(iterations):
        for d in range(n_docs):
            base = d * K
            for i in range(offsets[d], offsets[d + 1]):
                w = tokens[i]
                k = z[i]
                n_dk[base + k] -= 1
                n_kw[k * V + w] -= 1
                n_k[k] -= 1

                total = 0.0
                for t in range(K):
                    total += (n_dk[base + t] + alpha) * (n_kw[t * V + w] + beta) / (n_k[t] + v_beta)
                    cum[t] = total

                state, u = _next_double(state)
                r = u * total
                k = K - 1
                for t in range(K):
                    if cum[t] > r:
                        k = t
                        break

                z[i] = k
                n_dk[base + k] += 1
                n_kw[k * V + w] += 1
                n_k[k] += 1

    return (
        np.asarray(z, dtype=np.int32),
        np.asarray(n_dk, dtype=np.int32).reshape(n_docs, K),
        np.asarray(n_kw, dtype=np.int32).reshape(K, V),
        np.asarray(n_k, dtype=np.int32),
        state,
    )
