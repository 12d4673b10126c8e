"""Kernel dispatch: compiled int64 core when available, exact Python otherwise.

Set ``LOSSYLAB_PURE=1`` to force the Python kernels. Calls whose integer
magnitudes could overflow int64 are routed to Python regardless.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_INT64_SAFE = 1 << 62

try:
    if os.environ.get("LOSSYLAB_PURE"):
        raise ImportError("pure kernels requested")
    from . import _ckernels as _compiled
    BACKEND = "compiled"
except ImportError:
    _compiled = None
    BACKEND = "python"


class KernelMatrix:
    """Integer kernel rows over a shared denominator, indexed by tuple rank."""

    def __init__(self, rows, N, m):
        self.rows = [list(map(int, r)) for r in rows]
        self.N = N
        self.m = m
        self.maxval = max((max(r) for r in self.rows if r), default=0)
        self._arr = None

    @property
    def arr(self):
        if self._arr is None:
            self._arr = np.array(self.rows, dtype=np.int64)
        return self._arr

    def _compiled_ok(self, backend, bound):
        use = backend or BACKEND
        return use == "compiled" and _compiled is not None and bound < _INT64_SAFE \
            and self.maxval < _INT64_SAFE


def _bound(maxval, weights):
    b = max(1, maxval)
    for w in weights:
        b *= max(1, sum(w))
    return b


def mixture_counts(km: KernelMatrix, weights, backend=None):
    if km._compiled_ok(backend, _bound(km.maxval, weights)):
        return _compiled.mixture_counts(km.arr, km.N, km.m, weights)
    return _pykernels.mixture_counts(km.rows, km.N, km.m, weights)


def mixture_batch(km: KernelMatrix, batch, backend=None):
    if not batch:
        return []
    if km._compiled_ok(backend, max(_bound(km.maxval, w) for w in batch)):
        return _compiled.mixture_batch(km.arr, km.N, km.m, batch)
    return _pykernels.mixture_batch(km.rows, km.N, km.m, batch)


def stability_l1(km: KernelMatrix, weights_a, weights_b, backend=None):
    """Sum over the batch of L1 distances between paired mixtures."""
    if not weights_a:
        return 0
    worst = max(_bound(km.maxval, w) for w in list(weights_a) + list(weights_b))
    if km._compiled_ok(backend, 2 * worst * len(weights_a)):
        return _compiled.stability_l1(km.arr, km.N, km.m, weights_a, weights_b)
    return _pykernels.stability_l1(km.rows, km.N, km.m, weights_a, weights_b)
