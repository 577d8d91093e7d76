# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi kernel for batches of small real symmetric matrices."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


cdef int _jacobi_one(double* a, double* v, int n, bint want_v, int max_sweeps, double tol) noexcept nogil:
    """Diagonalize the n x n row-major matrix ``a`` in place.

    Returns the number of sweeps used, or -1 if the budget ran out.
    """
    cdef int p, q, r, sweep
    cdef double off, fro, apq, app, aqq, theta, t, c, s, arp, arq
    fro = 0.0
    for r in range(n * n):
        fro += a[r] * a[r]
    fro = sqrt(fro)
    if want_v:
        for r in range(n * n):
            v[r] = 0.0
        for r in range(n):
            v[r * n + r] = 1.0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p * n + q] * a[p * n + q]
        if sqrt(off) <= tol * fro:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p * n + q]
                if apq == 0.0:
                    continue
                app = a[p * n + p]
                aqq = a[q * n + q]
                theta = (aqq - app) / (2.0 * apq)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    if r != p and r != q:
                        arp = a[r * n + p]
                        arq = a[r * n + q]
                        a[r * n + p] = c * arp - s * arq
                        a[p * n + r] = a[r * n + p]
                        a[r * n + q] = s * arp + c * arq
                        a[q * n + r] = a[r * n + q]
                a[p * n + p] = app - t * apq
                a[q * n + q] = aqq + t * apq
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                if want_v:
                    for r in range(n):
                        arp = v[r * n + p]
                        arq = v[r * n + q]
                        v[r * n + p] = c * arp - s * arq
                        v[r * n + q] = s * arp + c * arq
    return -1


cdef void _sort(double* a, double* v, double* w, int n, bint want_v) noexcept nogil:
    # insertion sort of the diagonal, permuting eigenvector columns alongside
    cdef int i, j, r
    cdef double key
    for i in range(n):
        w[i] = a[i * n + i]
    for i in range(1, n):
        key = w[i]
        j = i - 1
        while j >= 0 and w[j] > key:
            w[j + 1] = w[j]
            if want_v:
                for r in range(n):
                    v[r * n + j], v[r * n + j + 1] = v[r * n + j + 1], v[r * n + j]
            j -= 1
        w[j + 1] = key


def jacobi_batch(A, bint want_vectors=False, int max_sweeps=50, double tol=1e-14):
    """Eigen-decompose a stack of symmetric matrices of shape (m, n, n).

    Returns ``(w, V, sweeps)``: ascending eigenvalues (m, n), eigenvector
    columns (m, n, n) or None, and per-matrix sweep counts (-1 = no
    convergence).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=3] work = np.array(A, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t m = work.shape[0]
    cdef int n = <int>work.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.empty((m, n), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3] V
    cdef cnp.ndarray[cnp.int32_t, ndim=1] sweeps = np.empty(m, dtype=np.int32)
    cdef double[:, :, ::1] wv = work
    cdef double[:, ::1] ww = w
    cdef double[:, :, ::1] vv
    cdef int[::1] sv = sweeps
    cdef double dummy = 0.0
    cdef Py_ssize_t i
    if want_vectors:
        V = np.empty((m, n, n), dtype=np.float64)
        vv = V
    if m == 0:
        return w, (V if want_vectors else None), sweeps
    with nogil:
        for i in range(m):
            if want_vectors:
                sv[i] = _jacobi_one(&wv[i, 0, 0], &vv[i, 0, 0], n, True, max_sweeps, tol)
                _sort(&wv[i, 0, 0], &vv[i, 0, 0], &ww[i, 0], n, True)
            else:
                sv[i] = _jacobi_one(&wv[i, 0, 0], &dummy, n, False, max_sweeps, tol)
                _sort(&wv[i, 0, 0], &dummy, &ww[i, 0], n, False)
    return w, (V if want_vectors else None), sweeps
