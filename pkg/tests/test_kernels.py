import random

import pytest

from lossylab import _pykernels, kernels


def instance(seed, N=3, m=3, K=4, batch=6):
    rng = random.Random(seed)
    rows = [[rng.randrange(0, 9) for _ in range(K)] for _ in range(N ** m)]
    ws = [[[rng.randrange(0, 5) for _ in range(N)] for _ in range(m)] for _ in range(batch)]
    return kernels.KernelMatrix(rows, N, m), ws


def test_python_kernel_by_hand():
    # two slots over two instances, rows indexed (0,0),(0,1),(1,0),(1,1)
    W = [[1, 0], [0, 1], [0, 1], [1, 0]]
    assert _pykernels.mixture_counts(W, 2, 2, [[1, 1], [1, 1]]) == [2, 2]
    assert _pykernels.mixture_counts(W, 2, 2, [[1, 0], [0, 3]]) == [0, 3]
    assert _pykernels.mixture_counts(W, 2, 2, [[0, 0], [1, 1]]) == [0, 0]


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled extension not built")
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree(seed):
    km, ws = instance(seed)
    assert [list(r) for r in kernels.mixture_batch(km, ws, backend="compiled")] == \
        _pykernels.mixture_batch(km.rows, km.N, km.m, ws)
    half = len(ws) // 2
    assert kernels.stability_l1(km, ws[:half], ws[half:], backend="compiled") == \
        _pykernels.stability_l1(km.rows, km.N, km.m, ws[:half], ws[half:])


def test_overflow_routes_to_python():
    km = kernels.KernelMatrix([[1 << 61, 1], [1, 1 << 61]], 2, 1)
    out = kernels.mixture_counts(km, [[1 << 10, 1]])
    assert out == [(1 << 71) + 1, (1 << 10) + (1 << 61)]
