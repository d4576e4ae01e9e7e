# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics identical to ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

EUCLIDEAN = 0
CORRELATION = 1


cdef inline double _cross(const double[:, :] p, Py_ssize_t o, Py_ssize_t a,
                          Py_ssize_t b) noexcept nogil:
    return ((p[a, 0] - p[o, 0]) * (p[b, 1] - p[o, 1])
            - (p[a, 1] - p[o, 1]) * (p[b, 0] - p[o, 0]))


cdef Py_ssize_t _hull(const double[:, :] p, const Py_ssize_t[:] alive,
                      Py_ssize_t m, double eps, Py_ssize_t[:] out,
                      Py_ssize_t[:] work) noexcept nogil:
    # alive[0:m] are row indices of p in lexicographic order; writes CCW hull
    # positions (into alive) to out, returns the hull size.
    cdef Py_ssize_t i, k = 0, t, nlow
    if m == 1:
        out[0] = 0
        return 1
    for i in range(m):
        while k >= 2 and _cross(p, alive[work[k - 2]], alive[work[k - 1]],
                                alive[i]) <= eps:
            k -= 1
        work[k] = i
        k += 1
    nlow = k - 1
    for t in range(nlow):
        out[t] = work[t]
    k = 0
    for i in range(m - 1, -1, -1):
        while k >= 2 and _cross(p, alive[work[k - 2]], alive[work[k - 1]],
                                alive[i]) <= eps:
            k -= 1
        work[k] = i
        k += 1
    for t in range(k - 1):
        out[nlow + t] = work[t]
    return nlow + k - 1


def hull_indices(xy, double eps):
    cdef const double[:, :] p = np.ascontiguousarray(xy, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t n = p.shape[0]
    if n == 0:
        return []
    cdef cnp.ndarray[Py_ssize_t, ndim=1] alive = np.arange(n, dtype=np.intp)
    cdef cnp.ndarray[Py_ssize_t, ndim=1] out = np.empty(n + 1, dtype=np.intp)
    cdef cnp.ndarray[Py_ssize_t, ndim=1] work = np.empty(n + 1, dtype=np.intp)
    cdef Py_ssize_t h = _hull(p, alive, n, eps, out, work)
    return out[:h].tolist()


def peel_layers(xy, double eps):
    cdef const double[:, :] p = np.ascontiguousarray(xy, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t n = p.shape[0]
    cdef cnp.ndarray[Py_ssize_t, ndim=1] alive = np.arange(n, dtype=np.intp)
    cdef cnp.ndarray[Py_ssize_t, ndim=1] out = np.empty(n + 1, dtype=np.intp)
    cdef cnp.ndarray[Py_ssize_t, ndim=1] work = np.empty(n + 1, dtype=np.intp)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] taken = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t m = n, h, i, j
    layers = []
    while m >= 3:
        h = _hull(p, alive, m, eps, out, work)
        layers.append([alive[out[i]] for i in range(h)])
        for i in range(h):
            taken[out[i]] = 1
        j = 0
        for i in range(m):
            if not taken[i]:
                alive[j] = alive[i]
                j += 1
            taken[i] = 0
        m = j
    return layers


def shift_distances(a, b, Py_ssize_t rings, int metric):
    cdef const double[:] va = np.ascontiguousarray(a, dtype=np.float64).ravel()
    cdef const double[:] vb = np.ascontiguousarray(b, dtype=np.float64).ravel()
    cdef Py_ssize_t size = va.shape[0]
    cdef Py_ssize_t width = size // rings
    cdef cnp.ndarray[double, ndim=1] out = np.empty(width, dtype=np.float64)
    cdef Py_ssize_t s, r, w, base, j
    cdef double acc, diff, ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, denom, val
    if metric == EUCLIDEAN:
        for s in range(width):
            acc = 0.0
            for r in range(rings):
                base = r * width
                for w in range(width):
                    j = w + s
                    if j >= width:
                        j -= width
                    diff = vb[base + j] - va[base + w]
                    acc += diff * diff
            out[s] = sqrt(acc)
        return out
    for j in range(size):
        ma += va[j]
        mb += vb[j]
    ma /= size
    mb /= size
    for j in range(size):
        saa += (va[j] - ma) * (va[j] - ma)
        sbb += (vb[j] - mb) * (vb[j] - mb)
    denom = sqrt(saa * sbb)
    for s in range(width):
        acc = 0.0
        for r in range(rings):
            base = r * width
            for w in range(width):
                j = w + s
                if j >= width:
                    j -= width
                acc += (vb[base + j] - mb) * (va[base + w] - ma)
        val = 1.0 - acc / denom
        out[s] = 0.0 if val < 0.0 else (2.0 if val > 2.0 else val)
    return out
