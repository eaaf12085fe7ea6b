"""Pure-Python cyclic Jacobi kernel; same algorithm as the compiled one."""

import math

import numpy as np


def _jacobi_one(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    norm2 = float(np.sum(a.real**2 + a.imag**2))
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        upper = np.abs(a[iu])
        off2 = 2.0 * float(np.sum(upper**2))
        if off2 <= tol * tol * norm2:
            return a.diagonal().real.copy(), v, sweep
        if sweep == max_sweeps:
            break
        thresh = 0.2 * float(np.sum(upper)) / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                r = abs(apq)
                if r == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                g = 100.0 * r
                if sweep > 3 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                if r <= thresh:
                    continue
                theta = (aqq - app) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                e = apq / r
                ec = e.conjugate()
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                newp = c * colp - s * ec * colq
                newq = c * colq + s * e * colp
                a[:, p] = newp
                a[:, q] = newq
                a[p, :] = newp.conj()
                a[q, :] = newq.conj()
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * ec * vq
                v[:, q] = c * vq + s * e * vp
    return a.diagonal().real.copy(), v, -1


def jacobi_eigh_batch(h, tol=1e-13, max_sweeps=30):
    work = np.array(h, dtype=np.complex128, copy=True)
    m, n, _ = work.shape
    vals = np.empty((m, n))
    vecs = np.empty((m, n, n), dtype=np.complex128)
    sweeps = np.empty(m, dtype=np.int64)
    for b in range(m):
        vals[b], vecs[b], sweeps[b] = _jacobi_one(work[b], tol, max_sweeps)
    return vals, vecs, sweeps
