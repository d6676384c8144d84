# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot numeric kernels.

Mirrors ``extrinsiq.kernels.pure`` exactly; see that module for the
contracts. Loops are written point-at-a-time to avoid the temporaries the
vectorized fallback allocates.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def plane_residuals(rot, trans, pts, normal, rho, weight):
    cdef cnp.ndarray[double, ndim=2, mode="c"] R = np.ascontiguousarray(rot, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] t = np.ascontiguousarray(trans, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] P = np.ascontiguousarray(pts, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] n = np.ascontiguousarray(normal, dtype=np.float64)
    cdef double rho_c = rho
    cdef double w = weight
    cdef Py_ssize_t m = P.shape[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] r = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] J = np.empty((m, 6), dtype=np.float64)
    cdef double r00 = R[0, 0], r01 = R[0, 1], r02 = R[0, 2]
    cdef double r10 = R[1, 0], r11 = R[1, 1], r12 = R[1, 2]
    cdef double r20 = R[2, 0], r21 = R[2, 1], r22 = R[2, 2]
    cdef double n0 = n[0], n1 = n[1], n2 = n[2]
    cdef double t0 = t[0], t1 = t[1], t2 = t[2]
    cdef double px, py, pz, y0, y1, y2
    cdef Py_ssize_t i
    for i in range(m):
        px = P[i, 0]
        py = P[i, 1]
        pz = P[i, 2]
        y0 = r00 * px + r01 * py + r02 * pz
        y1 = r10 * px + r11 * py + r12 * pz
        y2 = r20 * px + r21 * py + r22 * pz
        r[i] = w * (n0 * (y0 + t0) + n1 * (y1 + t1) + n2 * (y2 + t2) - rho_c)
        J[i, 0] = w * (y1 * n2 - y2 * n1)
        J[i, 1] = w * (y2 * n0 - y0 * n2)
        J[i, 2] = w * (y0 * n1 - y1 * n0)
        J[i, 3] = w * n0
        J[i, 4] = w * n1
        J[i, 5] = w * n2
    return r, J


def plane_inlier_counts(pts, normals, rhos, threshold):
    cdef cnp.ndarray[double, ndim=2, mode="c"] P = np.ascontiguousarray(pts, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] N = np.ascontiguousarray(normals, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] rho = np.ascontiguousarray(rhos, dtype=np.float64)
    cdef double thr = threshold
    cdef Py_ssize_t n = P.shape[0]
    cdef Py_ssize_t k = N.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] counts = np.zeros(k, dtype=np.int64)
    cdef double a, b, c, r
    cdef Py_ssize_t i, j
    cdef cnp.int64_t cnt
    for j in range(k):
        a = N[j, 0]
        b = N[j, 1]
        c = N[j, 2]
        r = rho[j]
        cnt = 0
        for i in range(n):
            if fabs(a * P[i, 0] + b * P[i, 1] + c * P[i, 2] - r) <= thr:
                cnt += 1
        counts[j] = cnt
    return counts


def intersect_rectangle(dirs, rot, trans, half_w, half_h, min_range):
    cdef cnp.ndarray[double, ndim=2, mode="c"] D = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] R = np.ascontiguousarray(rot, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] t = np.ascontiguousarray(trans, dtype=np.float64)
    cdef double hw = half_w, hh = half_h, rmin = min_range
    cdef Py_ssize_t n = D.shape[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] t_hit = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] uv = np.empty((n, 2), dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1, mode="c"] hit = np.zeros(n, dtype=np.uint8)
    cdef double e0x = R[0, 0], e0y = R[1, 0], e0z = R[2, 0]
    cdef double e1x = R[0, 1], e1y = R[1, 1], e1z = R[2, 1]
    cdef double nx = R[0, 2], ny = R[1, 2], nz = R[2, 2]
    cdef double t0 = t[0], t1 = t[1], t2 = t[2]
    cdef double rho = nx * t0 + ny * t1 + nz * t2
    cdef double dx, dy, dz, denom, th, qx, qy, qz, u, v
    cdef Py_ssize_t i
    for i in range(n):
        dx = D[i, 0]
        dy = D[i, 1]
        dz = D[i, 2]
        denom = dx * nx + dy * ny + dz * nz
        if fabs(denom) <= 1e-12:
            t_hit[i] = -1.0
            uv[i, 0] = 0.0
            uv[i, 1] = 0.0
            continue
        th = rho / denom
        qx = th * dx - t0
        qy = th * dy - t1
        qz = th * dz - t2
        u = qx * e0x + qy * e0y + qz * e0z
        v = qx * e1x + qy * e1y + qz * e1z
        t_hit[i] = th
        uv[i, 0] = u
        uv[i, 1] = v
        if th > rmin and fabs(u) <= hw and fabs(v) <= hh:
            hit[i] = 1
    return t_hit, uv, hit.view(np.bool_)
