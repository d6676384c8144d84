"""extrinsiq: target-based multi-sensor LIDAR/camera extrinsic calibration.

Simulates a rigid multi-sensor rig observing a planar rectangular target,
recovers calibration features (RANSAC planes, boundary lines, planar PnP),
and estimates pairwise and rig-wide extrinsics with three algorithms
(point-to-plane, point-to-back-projected-plane, and a multi-sensor pose
graph), plus the evaluation metrics to compare them.
"""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402,F401
    CameraIntrinsics,
    ImageLine,
    Plane,
    Pose,
    Rotation,
    backprojected_plane,
    compose,
    exp_so3,
    intersect_lines,
    invert,
    log_so3,
    project,
    transform_point,
)
