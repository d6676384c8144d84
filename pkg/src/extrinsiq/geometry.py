"""Exact geometric primitives shared by every other module.

Conventions
-----------
- Rotations are stored as unit quaternions ``(w, x, y, z)`` with ``w >= 0``
  (double cover canonicalized). Matrices are produced on demand.
- A :class:`Pose` maps points as ``x_out = R @ x + t``.
- All angles are radians; degrees appear only at CLI/report boundaries.
- Camera frames are right handed with z pointing forward; projection
  requires positive depth.
- Planes carry a unit normal and a full 3-vector offset (the vector from
  the sensor origin to the plane frame's origin). Only the scalar
  ``normal . offset`` ever enters a residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateLine,
    NearPiAngle,
    NonPositiveDepth,
    ParallelLines,
)

_NORM_TOL = 1e-12


def _as_vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


class Rotation:
    """3D rotation as a unit quaternion ``(w, x, y, z)``.

    The quaternion is renormalized and sign-canonicalized (``w >= 0``) on
    construction, so instances always satisfy the unit-norm invariant to
    better than 1e-12. Instances are immutable.
    """

    __slots__ = ("_q",)

    def __init__(self, wxyz):
        q = np.asarray(wxyz, dtype=float).copy()
        if q.shape != (4,):
            raise ValueError("quaternion must have 4 components (w, x, y, z)")
        n = float(np.linalg.norm(q))
        if not np.isfinite(n) or n < _NORM_TOL:
            raise ValueError("quaternion norm too small to normalize")
        q /= n
        if q[0] < 0.0:
            q = -q
        q.flags.writeable = False
        self._q = q

    @classmethod
    def identity(cls) -> "Rotation":
        return cls((1.0, 0.0, 0.0, 0.0))

    @classmethod
    def from_matrix(cls, m) -> "Rotation":
        """Build from a 3x3 rotation matrix (Shepperd's method)."""
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError("rotation matrix must be 3x3")
        t = np.trace(m)
        if t > 0.0:
            s = math.sqrt(t + 1.0) * 2.0
            w = 0.25 * s
            x = (m[2, 1] - m[1, 2]) / s
            y = (m[0, 2] - m[2, 0]) / s
            z = (m[1, 0] - m[0, 1]) / s
        elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
            s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
            w = (m[2, 1] - m[1, 2]) / s
            x = 0.25 * s
            y = (m[0, 1] + m[1, 0]) / s
            z = (m[0, 2] + m[2, 0]) / s
        elif m[1, 1] >= m[2, 2]:
            s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
            w = (m[0, 2] - m[2, 0]) / s
            x = (m[0, 1] + m[1, 0]) / s
            y = 0.25 * s
            z = (m[1, 2] + m[2, 1]) / s
        else:
            s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
            w = (m[1, 0] - m[0, 1]) / s
            x = (m[0, 2] + m[2, 0]) / s
            y = (m[1, 2] + m[2, 1]) / s
            z = 0.25 * s
        return cls((w, x, y, z))

    @property
    def wxyz(self) -> np.ndarray:
        return self._q

    def matrix(self) -> np.ndarray:
        w, x, y, z = self._q
        xx, yy, zz = x * x, y * y, z * z
        wx, wy, wz = w * x, w * y, w * z
        xy, xz, yz = x * y, x * z, y * z
        return np.array(
            [
                [1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)],
                [2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)],
                [2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)],
            ]
        )

    def __mul__(self, other: "Rotation") -> "Rotation":
        w1, x1, y1, z1 = self._q
        w2, x2, y2, z2 = other._q
        return Rotation(
            (
                w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            )
        )

    def inverse(self) -> "Rotation":
        w, x, y, z = self._q
        return Rotation((w, -x, -y, -z))

    def apply(self, v) -> np.ndarray:
        """Rotate one 3-vector or an (n, 3) stack of them."""
        v = np.asarray(v, dtype=float)
        if v.ndim == 1:
            return self.matrix() @ v
        return v @ self.matrix().T

    def angle(self) -> float:
        """Rotation angle in [0, pi]."""
        w = self._q[0]
        s = float(np.linalg.norm(self._q[1:]))
        return 2.0 * math.atan2(s, w)

    def __repr__(self) -> str:
        return f"Rotation(wxyz={np.array2string(self._q, precision=9)})"


class Pose:
    """Rigid transform ``x_out = R @ x + t`` (rotation + translation, meters)."""

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation: Rotation, translation):
        t = _as_vec3(translation).copy()
        t.flags.writeable = False
        self.rotation = rotation
        self.translation = t

    @classmethod
    def identity(cls) -> "Pose":
        return cls(Rotation.identity(), np.zeros(3))

    @classmethod
    def from_matrix(cls, m) -> "Pose":
        m = np.asarray(m, dtype=float)
        return cls(Rotation.from_matrix(m[:3, :3]), m[:3, 3])

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation.matrix()
        m[:3, 3] = self.translation
        return m

    def inverse(self) -> "Pose":
        rinv = self.rotation.inverse()
        return Pose(rinv, -rinv.apply(self.translation))

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.rotation.apply(x) + self.translation

    def __repr__(self) -> str:
        return (
            f"Pose(q={np.array2string(self.rotation.wxyz, precision=9)}, "
            f"t={np.array2string(self.translation, precision=9)})"
        )


@dataclass(frozen=True)
class Plane:
    """Plane as unit normal plus the offset vector to the plane frame origin.

    ``rho = normal . origin_offset`` is the signed distance of the plane
    from the sensor origin along the normal; it is the only part of
    ``origin_offset`` that any residual may consume.
    """

    normal: np.ndarray
    origin_offset: np.ndarray

    def __post_init__(self):
        n = _as_vec3(self.normal).copy()
        norm = float(np.linalg.norm(n))
        if abs(norm - 1.0) > 1e-9:
            if norm < _NORM_TOL:
                raise ValueError("plane normal too small")
            n /= norm
        d = _as_vec3(self.origin_offset).copy()
        n.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "origin_offset", d)

    @property
    def rho(self) -> float:
        return float(self.normal @ self.origin_offset)

    def signed_distance(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ self.normal - self.rho


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics (focal lengths, principal point, skew), in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    skew: float = 0.0

    def __post_init__(self):
        if self.fx <= 0.0 or self.fy <= 0.0:
            raise ValueError("focal lengths must be positive")

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.fx, self.skew, self.cx],
                [0.0, self.fy, self.cy],
                [0.0, 0.0, 1.0],
            ]
        )


@dataclass(frozen=True)
class ImageLine:
    """Homogeneous pixel-space line ``a*u + b*v + c = 0`` with a^2 + b^2 = 1.

    The stored sign is canonical (first nonzero of (a, b) positive) so that
    serialized lines are reproducible; all consumers are sign-invariant.
    """

    abc: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.abc, dtype=float).copy()
        if v.shape != (3,):
            raise ValueError("image line needs 3 homogeneous coefficients")
        s = math.hypot(v[0], v[1])
        if s < _NORM_TOL:
            raise ValueError("image line with (a, b) = 0 is not a line")
        v /= s
        if v[0] < 0.0 or (v[0] == 0.0 and v[1] < 0.0):
            v = -v
        v.flags.writeable = False
        object.__setattr__(self, "abc", v)

    def distance(self, uv) -> np.ndarray:
        """Perpendicular pixel distance(s) from point(s) to the line."""
        uv = np.asarray(uv, dtype=float)
        return np.abs(uv @ self.abc[:2] + self.abc[2])


# ---------------------------------------------------------------------------
# Pose algebra


def compose(a: Pose, b: Pose) -> Pose:
    """Composition ``a o b``: apply ``b`` first, then ``a``."""
    return Pose(a.rotation * b.rotation, a.rotation.apply(b.translation) + a.translation)


def invert(p: Pose) -> Pose:
    return p.inverse()


def transform_point(p: Pose, x) -> np.ndarray:
    """Apply ``R @ x + t`` to a point (or an (n, 3) stack)."""
    return p.apply(x)


def skew(v) -> np.ndarray:
    v = _as_vec3(v)
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def exp_so3(omega) -> Rotation:
    """Rodrigues exponential: rotation-vector (radians) to Rotation."""
    w = _as_vec3(omega)
    theta = float(np.linalg.norm(w))
    half = 0.5 * theta
    if theta < 1e-8:
        # sin(theta/2)/theta Taylor expansion
        k = 0.5 - theta * theta / 48.0
    else:
        k = math.sin(half) / theta
    return Rotation((math.cos(half), k * w[0], k * w[1], k * w[2]))


def log_so3(r: Rotation) -> np.ndarray:
    """Rotation-vector logarithm; valid for angles below ``pi - 1e-6``."""
    q = r.wxyz
    w = q[0]
    v = q[1:]
    s = float(np.linalg.norm(v))
    theta = 2.0 * math.atan2(s, w)
    if theta >= math.pi - 1e-6:
        raise NearPiAngle(f"rotation angle {theta:.9f} too close to pi")
    if s < 1e-9:
        # theta/sin(theta/2) ~ 2/w * (1 + s^2 / (6 w^2))
        return v * (2.0 / w) * (1.0 + (s * s) / (6.0 * w * w))
    return v * (theta / s)


def so3_left_jacobian_inv(phi) -> np.ndarray:
    """Inverse left Jacobian of SO(3); d/d(dw) log(exp(dw) exp(phi^)) at 0."""
    phi = _as_vec3(phi)
    theta = float(np.linalg.norm(phi))
    ph = skew(phi)
    if theta < 1e-5:
        c = 1.0 / 12.0 + theta * theta / 720.0
    else:
        c = 1.0 / (theta * theta) - (1.0 + math.cos(theta)) / (
            2.0 * theta * math.sin(theta)
        )
    return np.eye(3) - 0.5 * ph + c * (ph @ ph)


def log_se3(p: Pose) -> np.ndarray:
    """6-vector ``[log_so3(R); t]`` used for reports and graph residuals."""
    return np.concatenate([log_so3(p.rotation), p.translation])


def retract(p: Pose, delta) -> Pose:
    """Manifold update ``(exp(dw) R, t + dt)`` for a 6-vector ``[dw; dt]``."""
    delta = np.asarray(delta, dtype=float)
    return Pose(exp_so3(delta[:3]) * p.rotation, p.translation + delta[3:])


# ---------------------------------------------------------------------------
# Camera model


def project(k: CameraIntrinsics, pose: Pose, x_lidar) -> np.ndarray:
    """Pinhole projection of a sensor-frame point into pixels.

    Raises
    ------
    NonPositiveDepth
        If the transformed point has depth <= 1e-9 in the camera frame.
    """
    xc = pose.apply(_as_vec3(x_lidar))
    z = xc[2]
    if z <= 1e-9:
        raise NonPositiveDepth(f"point depth {z:.3e} behind camera")
    u = (k.fx * xc[0] + k.skew * xc[1]) / z + k.cx
    v = k.fy * xc[1] / z + k.cy
    return np.array([u, v])


def project_points(k: CameraIntrinsics, pose: Pose, pts) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized projection; returns (pixels (n,2), valid-depth mask (n,))."""
    xc = pose.apply(np.asarray(pts, dtype=float))
    z = xc[:, 2]
    ok = z > 1e-9
    zsafe = np.where(ok, z, 1.0)
    u = (k.fx * xc[:, 0] + k.skew * xc[:, 1]) / zsafe + k.cx
    v = k.fy * xc[:, 1] / zsafe + k.cy
    return np.stack([u, v], axis=1), ok


def backprojected_plane(k: CameraIntrinsics, line: ImageLine) -> Plane:
    """Plane through the camera center containing the image line.

    The plane normal is ``K^T l`` (normalized); its offset is zero because
    the plane passes through the camera origin.
    """
    n = k.matrix().T @ line.abc
    norm = float(np.linalg.norm(n))
    if norm < 1e-12:
        raise DegenerateLine("K^T l vanished; line cannot be back-projected")
    return Plane(n / norm, np.zeros(3))


def intersect_lines(l1: ImageLine, l2: ImageLine) -> np.ndarray:
    """Intersection point of two image lines (cross product, dehomogenized)."""
    c = np.cross(l1.abc, l2.abc)
    if abs(c[2]) < 1e-12 * max(1.0, abs(c[0]), abs(c[1])):
        raise ParallelLines("lines are numerically parallel")
    return c[:2] / c[2]


def line_through_points(p, q) -> ImageLine:
    """Image line joining two pixel points (cross of homogeneous points)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    l = np.cross(np.array([p[0], p[1], 1.0]), np.array([q[0], q[1], 1.0]))
    scale = max(1.0, float(np.linalg.norm(p)), float(np.linalg.norm(q)))
    if math.hypot(l[0], l[1]) < 1e-9 * scale:
        raise ValueError("coincident points do not define a line")
    return ImageLine(l)


def rotation_about(axis, angle: float) -> Rotation:
    """Rotation of ``angle`` radians about a (not necessarily unit) axis."""
    a = _as_vec3(axis)
    n = float(np.linalg.norm(a))
    if n < _NORM_TOL:
        raise ValueError("rotation axis must be nonzero")
    return exp_so3(a * (angle / n))
