"""Pure numpy fallback for the compiled Jacobi kernel.

Same rotation arithmetic, sweep order and stopping rule as ``_jacobi.pyx``,
vectorized across the batch instead of looping over matrices.
"""

import numpy as np


def jacobi_batch(A, want_vectors=False, max_sweeps=50, tol=1e-14):
    a = np.array(A, dtype=np.float64, copy=True)
    m, n, _ = a.shape
    v = np.broadcast_to(np.eye(n), (m, n, n)).copy() if want_vectors else None
    sweeps = np.full(m, -1, dtype=np.int32)
    fro = np.sqrt(np.einsum("kij,kij->k", a, a))
    offmask = ~np.eye(n, dtype=bool)
    active = np.arange(m)

    for sweep in range(max_sweeps + 1):
        sub = a[active]
        off = np.sqrt(np.sum(sub[:, offmask] ** 2, axis=1))
        done = off <= tol * fro[active]
        sweeps[active[done]] = sweep
        active = active[~done]
        if active.size == 0 or sweep == max_sweeps:
            break
        sub = a[active]
        vsub = v[active] if want_vectors else None
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = sub[:, p, q].copy()
                nz = apq != 0.0
                if not nz.any():
                    continue
                app = sub[:, p, p].copy()
                aqq = sub[:, q, q].copy()
                with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                    theta = np.where(nz, (aqq - app) / (2.0 * np.where(nz, apq, 1.0)), 0.0)
                    big = np.abs(theta) > 1e150
                    t = np.where(
                        big,
                        0.5 / np.where(big, theta, 1.0),
                        np.sign(theta + (theta == 0.0)) / (np.abs(theta) + np.sqrt(np.where(big, 0.0, theta) ** 2 + 1.0)),
                    )
                t = np.where(nz, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cc = c[:, None]
                ss = s[:, None]
                colp = sub[:, :, p].copy()
                colq = sub[:, :, q].copy()
                newp = cc * colp - ss * colq
                newq = ss * colp + cc * colq
                sub[:, :, p] = newp
                sub[:, :, q] = newq
                sub[:, p, :] = newp
                sub[:, q, :] = newq
                sub[:, p, p] = app - t * apq
                sub[:, q, q] = aqq + t * apq
                sub[:, p, q] = np.where(nz, 0.0, sub[:, p, q])
                sub[:, q, p] = sub[:, p, q]
                if want_vectors:
                    vp = vsub[:, :, p].copy()
                    vq = vsub[:, :, q].copy()
                    vsub[:, :, p] = cc * vp - ss * vq
                    vsub[:, :, q] = ss * vp + cc * vq
        a[active] = sub
        if want_vectors:
            v[active] = vsub

    w = np.diagonal(a, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    if want_vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w, v, sweeps
