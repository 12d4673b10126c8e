# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled exact kernels on int64 data.

Callers must rule out overflow beforehand (see lossylab.kernels).
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport llabs

ctypedef cnp.int64_t i64


cdef void _mix(const i64[:, ::1] W, Py_ssize_t N, Py_ssize_t m,
               const i64[:, ::1] w, i64[::1] out,
               Py_ssize_t[:, ::1] sup, Py_ssize_t[::1] nsup, Py_ssize_t[::1] idx) noexcept nogil:
    cdef Py_ssize_t K = W.shape[1]
    cdef Py_ssize_t i, k, t, x
    cdef i64 coef
    for k in range(K):
        out[k] = 0
    for i in range(m):
        nsup[i] = 0
        for x in range(N):
            if w[i, x] != 0:
                sup[i, nsup[i]] = x
                nsup[i] += 1
        if nsup[i] == 0:
            return
        idx[i] = 0
    while True:
        t = 0
        coef = 1
        for i in range(m):
            x = sup[i, idx[i]]
            t = t * N + x
            coef *= w[i, x]
        for k in range(K):
            if W[t, k] != 0:
                out[k] += coef * W[t, k]
        i = m - 1
        while i >= 0:
            idx[i] += 1
            if idx[i] < nsup[i]:
                break
            idx[i] = 0
            i -= 1
        if i < 0:
            return


def mixture_counts(W, Py_ssize_t N, Py_ssize_t m, weights):
    cdef const i64[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.int64)
    cdef const i64[:, ::1] wv = np.ascontiguousarray(weights, dtype=np.int64)
    out = np.zeros(Wv.shape[1], dtype=np.int64)
    cdef i64[::1] ov = out
    sup = np.zeros((m, N), dtype=np.intp)
    nsup = np.zeros(m, dtype=np.intp)
    idx = np.zeros(m, dtype=np.intp)
    _mix(Wv, N, m, wv, ov, sup, nsup, idx)
    return [int(v) for v in out]


def stability_l1(W, Py_ssize_t N, Py_ssize_t m, weights_a, weights_b):
    cdef const i64[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.int64)
    cdef const i64[:, :, ::1] av = np.ascontiguousarray(weights_a, dtype=np.int64)
    cdef const i64[:, :, ::1] bv = np.ascontiguousarray(weights_b, dtype=np.int64)
    cdef Py_ssize_t K = Wv.shape[1]
    cdef Py_ssize_t P = av.shape[0]
    cdef Py_ssize_t p, k
    cdef i64 total = 0
    oa = np.zeros(K, dtype=np.int64)
    ob = np.zeros(K, dtype=np.int64)
    cdef i64[::1] oav = oa
    cdef i64[::1] obv = ob
    cdef Py_ssize_t[:, ::1] sup = np.zeros((m, N), dtype=np.intp)
    cdef Py_ssize_t[::1] nsup = np.zeros(m, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = np.zeros(m, dtype=np.intp)
    with nogil:
        for p in range(P):
            _mix(Wv, N, m, av[p], oav, sup, nsup, idx)
            _mix(Wv, N, m, bv[p], obv, sup, nsup, idx)
            for k in range(K):
                total += llabs(oav[k] - obv[k])
    return int(total)


def mixture_batch(W, Py_ssize_t N, Py_ssize_t m, weights_batch):
    cdef const i64[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.int64)
    cdef const i64[:, :, ::1] bv = np.ascontiguousarray(weights_batch, dtype=np.int64)
    cdef Py_ssize_t P = bv.shape[0]
    cdef Py_ssize_t p
    out = np.zeros((P, Wv.shape[1]), dtype=np.int64)
    cdef i64[:, ::1] ov = out
    cdef Py_ssize_t[:, ::1] sup = np.zeros((m, N), dtype=np.intp)
    cdef Py_ssize_t[::1] nsup = np.zeros(m, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = np.zeros(m, dtype=np.intp)
    with nogil:
        for p in range(P):
            _mix(Wv, N, m, bv[p], ov[p], sup, nsup, idx)
    return [[int(v) for v in row] for row in out]
