# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same signatures and results as ``_fallback``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

IMPLEMENTATION = "compiled"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _popcount(long long x) nogil:
    return __builtin_popcountll(<unsigned long long>x)


cdef double complex[4] _IPOW = [1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j]


cdef void _fwht_rows(double complex[:, ::1] y) nogil:
    cdef Py_ssize_t rows = y.shape[0], d = y.shape[1]
    cdef Py_ssize_t r, h, i, j
    cdef double complex a, b
    for r in range(rows):
        h = 1
        while h < d:
            i = 0
            while i < d:
                for j in range(i, i + h):
                    a = y[r, j]
                    b = y[r, j + h]
                    y[r, j] = a + b
                    y[r, j + h] = a - b
                i += 2 * h
            h *= 2


def fwht(x):
    """Unnormalized Walsh-Hadamard transform along the last axis (copy)."""
    arr = np.array(x, dtype=complex, copy=True)
    shape = arr.shape
    cdef double complex[:, ::1] y = np.ascontiguousarray(arr.reshape(-1, shape[arr.ndim - 1]))
    _fwht_rows(y)
    return np.asarray(y).reshape(shape)


def pauli_coefficients(x, int n):
    """Coefficients ``c`` with ``x = 2^{-n/2} sum c_P P``, index ``(p << n) | q``."""
    cdef Py_ssize_t d = 1 << n
    cdef double complex[:, ::1] src = np.ascontiguousarray(x, dtype=complex)
    cdef double complex[:, ::1] g = np.empty((d, d), dtype=complex)
    cdef Py_ssize_t q, a, p
    for q in range(d):
        for a in range(d):
            g[q, a] = src[a ^ q, a]
    _fwht_rows(g)  # g[q, p]
    out = np.empty(d * d, dtype=complex)
    cdef double complex[::1] o = out
    cdef double scale = 1.0 / sqrt(<double>d)
    for p in range(d):
        for q in range(d):
            o[(p << n) | q] = g[q, p] * _IPOW[(4 - (_popcount(p & q) & 3)) & 3] * scale
    return out


def matrix_from_pauli_coefficients(c, int n):
    """Inverse of :func:`pauli_coefficients`."""
    cdef Py_ssize_t d = 1 << n
    cdef double complex[:, ::1] coeff = np.ascontiguousarray(np.asarray(c, dtype=complex).reshape(d, d))
    cdef double complex[:, ::1] t = np.empty((d, d), dtype=complex)
    cdef Py_ssize_t p, q, r
    for p in range(d):
        for q in range(d):
            t[q, p] = coeff[p, q] * _IPOW[(4 - (_popcount(p & q) & 3)) & 3]
    _fwht_rows(t)  # t[q, r] = sum_p coeff'[p, q] (-1)^{p.r}
    out = np.zeros((d, d), dtype=complex)
    cdef double complex[:, ::1] o = out
    cdef double scale = 1.0 / sqrt(<double>d)
    for q in range(d):
        for r in range(d):
            o[r, r ^ q] = t[q, r] * scale
    return out


cdef void _rhs(const double[::1] q, double[::1] out, int n) nogil:
    cdef Py_ssize_t l
    cdef double ell, nn = n
    for l in range(n + 1):
        ell = l
        out[l] = -((3 * ell * (nn - ell) + ell * (ell - 1)) / nn) * q[l]
    for l in range(1, n + 1):
        ell = l - 1
        out[l] += (3 * ell * (nn - ell) / nn) * q[l - 1]
    for l in range(n):
        ell = l + 1
        out[l] += (ell * (ell - 1) / nn) * q[l + 1]


def master_rhs(q, int n):
    """Size-resolved Brownian master equation right-hand side."""
    cdef double[::1] qv = np.ascontiguousarray(q, dtype=float)
    out = np.empty(n + 1)
    _rhs(qv, out, n)
    return out


def rk4_integrate(q0, int n, step_counts, step_sizes):
    """Classic RK4 over consecutive segments; returns the state after each."""
    cdef Py_ssize_t m = n + 1, nseg = len(step_counts)
    cdef double[::1] q = np.array(q0, dtype=float, copy=True)
    cdef double[::1] tmp = np.empty(m)
    cdef double[::1] k1 = np.empty(m)
    cdef double[::1] k2 = np.empty(m)
    cdef double[::1] k3 = np.empty(m)
    cdef double[::1] k4 = np.empty(m)
    cdef long long[::1] counts = np.ascontiguousarray(step_counts, dtype=np.int64)
    cdef double[::1] sizes = np.ascontiguousarray(step_sizes, dtype=float)
    out = np.empty((nseg, m))
    cdef double[:, ::1] o = out
    cdef Py_ssize_t seg, i
    cdef long long s
    cdef double h
    with nogil:
        for seg in range(nseg):
            h = sizes[seg]
            for s in range(counts[seg]):
                _rhs(q, k1, n)
                for i in range(m):
                    tmp[i] = q[i] + 0.5 * h * k1[i]
                _rhs(tmp, k2, n)
                for i in range(m):
                    tmp[i] = q[i] + 0.5 * h * k2[i]
                _rhs(tmp, k3, n)
                for i in range(m):
                    tmp[i] = q[i] + h * k3[i]
                _rhs(tmp, k4, n)
                # same association order as the numpy fallback
                for i in range(m):
                    q[i] = q[i] + (h / 6.0) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
            for i in range(m):
                o[seg, i] = q[i]
    return out


def pauli_jump_sizes(long long start_p, long long start_q, int n, choices, offsets, checkpoints):
    """Apply uniformized 2-local Pauli jumps and record sizes at checkpoints."""
    cdef long long[::1] ch = np.ascontiguousarray(choices, dtype=np.int64)
    cdef long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef long long[:, ::1] cp = np.ascontiguousarray(checkpoints, dtype=np.int64)
    cdef Py_ssize_t trials = cp.shape[0], ncheck = cp.shape[1]
    pi, pj = np.triu_indices(n, 1)
    cdef long long[::1] bit_i = (np.int64(1) << (n - 1 - pi)).astype(np.int64)
    cdef long long[::1] bit_j = (np.int64(1) << (n - 1 - pj)).astype(np.int64)
    sizes = np.empty((trials, ncheck), dtype=np.int64)
    cdef long long[:, ::1] out = sizes
    cdef Py_ssize_t t, k
    cdef long long up, uq, done, e, pair, code, a, b, vp, vq, bi, bj
    with nogil:
        for t in range(trials):
            up = start_p
            uq = start_q
            done = 0
            for k in range(ncheck):
                while done < cp[t, k]:
                    e = ch[off[t] + done]
                    pair = e // 9
                    code = e % 9
                    a = code // 3 + 1
                    b = code % 3 + 1
                    bi = bit_i[pair]
                    bj = bit_j[pair]
                    vp = (bi if a & 1 else 0) | (bj if b & 1 else 0)
                    vq = (bi if a >> 1 else 0) | (bj if b >> 1 else 0)
                    if (_popcount(up & vq) + _popcount(uq & vp)) & 1:
                        up ^= vp
                        uq ^= vq
                    done += 1
                out[t, k] = _popcount(up | uq)
    return sizes
