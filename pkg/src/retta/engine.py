"""Gibbs kernel selection.

The compiled extension is preferred when importable; the pure-Python
kernel is the fallback.  RETTA_ENGINE=python|cython forces a choice (the
benchmark and the cross-engine equivalence test use this).  Both kernels
are bit-identical by construction, so the choice affects speed only.
"""

from __future__ import annotations

import os

from . import _gibbs_py

try:
    from . import _gibbs as _gibbs_cy
except ImportError:
    _gibbs_cy = None


def _select():
    forced = os.environ.get("RETTA_ENGINE")
    if forced == "python":
        return _gibbs_py, "python"
    if forced == "cython":
        if _gibbs_cy is None:
            raise ImportError("RETTA_ENGINE=cython but the compiled kernel is not built")
        return _gibbs_cy, "cython"
    if forced not in (None, ""):
        raise ValueError(f"unknown RETTA_ENGINE {forced!r}")
    if _gibbs_cy is not None:
        return _gibbs_cy, "cython"
    return _gibbs_py, "python"


def active_engine() -> str:
    """Name of the kernel the next fit will use."""
    return _select()[1]


def run_gibbs(tokens, offsets, K, V, alpha, beta, iterations, seed, init=None):
    impl, _ = _select()
    return impl.run_gibbs(tokens, offsets, K, V, alpha, beta, iterations, seed, init)
