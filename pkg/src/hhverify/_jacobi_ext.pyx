# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi kernel for stacks of complex Hermitian matrices."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot

cnp.import_array()


cdef int _jacobi_one(double complex[:, ::1] a, double complex[:, ::1] v,
                     double tol, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, p, q
    cdef double norm2 = 0.0, off2, sm, thresh, r, theta, t, c, s, app, aqq, g
    cdef double complex e, ec, akp, akq, vkp, vkq
    cdef int sweep

    for i in range(n):
        for j in range(n):
            norm2 += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
            v[i, j] = 0.0
        v[i, i] = 1.0

    for sweep in range(max_sweeps + 1):
        off2 = 0.0
        sm = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = hypot(a[p, q].real, a[p, q].imag)
                off2 += 2.0 * r * r
                sm += r
        if off2 <= tol * tol * norm2:
            return sweep
        if sweep == max_sweeps:
            break
        thresh = 0.2 * sm / (n * n) if sweep < 3 else 0.0

        for p in range(n - 1):
            for q in range(p + 1, n):
                r = hypot(a[p, q].real, a[p, q].imag)
                if r == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                g = 100.0 * r
                if sweep > 3 and fabs(app) + g == fabs(app) and fabs(aqq) + g == fabs(aqq):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                if r <= thresh:
                    continue
                theta = (aqq - app) / (2.0 * r)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                e = a[p, q] / r
                ec = e.conjugate()
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * ec * akq
                    a[k, q] = c * akq + s * e * akp
                    a[p, k] = a[k, p].conjugate()
                    a[q, k] = a[k, q].conjugate()
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * ec * vkq
                    v[k, q] = c * vkq + s * e * vkp
    return -1


def jacobi_eigh_batch(h, double tol=1e-13, int max_sweeps=30):
    """Diagonalize a stack ``h`` of shape (m, n, n).

    Returns unsorted eigenvalues (m, n), eigenvector columns (m, n, n) and
    the number of sweeps used per matrix (-1 where not converged).
    """
    cdef double complex[:, :, ::1] work = np.array(h, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t m = work.shape[0], n = work.shape[1], b, i
    vecs = np.empty((m, n, n), dtype=np.complex128)
    vals = np.empty((m, n), dtype=np.float64)
    sweeps = np.empty(m, dtype=np.int64)
    cdef double complex[:, :, ::1] vv = vecs
    cdef double[:, ::1] ww = vals
    cdef long long[::1] ss = sweeps
    with nogil:
        for b in range(m):
            ss[b] = _jacobi_one(work[b], vv[b], tol, max_sweeps)
            for i in range(n):
                ww[b, i] = work[b, i, i].real
    return vals, vecs, sweeps
