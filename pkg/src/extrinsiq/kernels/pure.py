"""Pure numpy implementations of the hot numeric kernels.

These are the fallback backend; ``extrinsiq.kernels._native`` provides the
compiled equivalents. Both backends share signatures and semantics, so any
of them can serve every call site.
"""

import numpy as np


def plane_residuals(rot, trans, pts, normal, rho, weight):
    """Weighted signed point-to-plane residuals and pose Jacobians.

    For each point ``p``: ``r = weight * (normal . (R p + t) - rho)``.
    The Jacobian columns follow the left-perturbation tangent ``[dw; dt]``
    (rotation update ``R <- exp(dw) R``, translation ``t <- t + dt``):
    ``dr/dw = weight * (R p) x normal`` and ``dr/dt = weight * normal``.

    Parameters
    ----------
    rot : (3, 3) ndarray
    trans, normal : (3,) ndarray
    pts : (m, 3) ndarray
    rho, weight : float

    Returns
    -------
    r : (m,) ndarray
    jac : (m, 6) ndarray
    """
    pts = np.asarray(pts, dtype=float)
    y = pts @ np.asarray(rot, dtype=float).T
    r = weight * ((y + trans) @ normal - rho)
    jac = np.empty((pts.shape[0], 6))
    jac[:, 0:3] = weight * np.cross(y, normal)
    jac[:, 3:6] = weight * np.asarray(normal, dtype=float)
    return r, jac


def plane_inlier_counts(pts, normals, rhos, threshold):
    """Count points within ``threshold`` of each candidate plane.

    Parameters
    ----------
    pts : (n, 3) ndarray
    normals : (k, 3) ndarray of unit normals
    rhos : (k,) ndarray of plane offsets
    threshold : float

    Returns
    -------
    counts : (k,) int64 ndarray
    """
    pts = np.asarray(pts, dtype=float)
    normals = np.asarray(normals, dtype=float)
    rhos = np.asarray(rhos, dtype=float)
    d = np.abs(pts @ normals.T - rhos[None, :])
    return np.ascontiguousarray((d <= threshold).sum(axis=0), dtype=np.int64)


def intersect_rectangle(dirs, rot, trans, half_w, half_h, min_range):
    """Intersect unit rays from the origin with a posed rectangle.

    The rectangle lives in the z=0 plane of its own frame with extents
    ``[-half_w, half_w] x [-half_h, half_h]``; ``rot``/``trans`` place that
    frame in the sensor frame.

    Parameters
    ----------
    dirs : (n, 3) ndarray of unit ray directions
    rot : (3, 3) ndarray
    trans : (3,) ndarray
    half_w, half_h, min_range : float

    Returns
    -------
    t_hit : (n,) ndarray
        Ray parameter (range) of the intersection; undefined where miss.
    uv : (n, 2) ndarray
        In-plane rectangle coordinates of the hit; undefined where miss.
    hit : (n,) bool ndarray
    """
    dirs = np.asarray(dirs, dtype=float)
    rot = np.asarray(rot, dtype=float)
    trans = np.asarray(trans, dtype=float)
    n = rot[:, 2]
    rho = float(n @ trans)
    denom = dirs @ n
    safe = np.abs(denom) > 1e-12
    t_hit = np.where(safe, rho / np.where(safe, denom, 1.0), -1.0)
    x = t_hit[:, None] * dirs - trans
    uv = np.stack([x @ rot[:, 0], x @ rot[:, 1]], axis=1)
    hit = (
        safe
        & (t_hit > min_range)
        & (np.abs(uv[:, 0]) <= half_w)
        & (np.abs(uv[:, 1]) <= half_h)
    )
    return t_hit, uv, hit
