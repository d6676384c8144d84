"""Synthetic scene generation: a planar target swept through poses in front
of a rigid multi-sensor rig, observed by scan-line LIDARs and pinhole
cameras with configurable noise.

The rig frame is camera-like (z forward, x right, y down). LIDAR frames are
x forward / z up; their rig poses include the axis remap. Target poses are
sampled "held diagonally" (in-plane roll between 30 and 60 degrees) so that
no board edge runs parallel to the LIDAR scan lines, and the face normal is
kept within a modest cone of the rig's forward axis so every sensor sees
the front of the board.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .dataset import (
    CAMERA,
    LIDAR,
    CameraObservation,
    Dataset,
    LidarObservation,
    NoiseModel,
    ScanPattern,
    SensorModel,
    SensorRig,
    StereoPair,
    TargetModel,
    default_meta,
)
from .errors import InfeasibleScene, NoReturns, TargetNotVisible
from .geometry import (
    CameraIntrinsics,
    Plane,
    Pose,
    Rotation,
    compose,
    exp_so3,
    line_through_points,
    project_points,
    rotation_about,
)

_MIN_LIDAR_RANGE = 0.2

# Rotation taking LIDAR axes (x forward, y left, z up) into the rig frame
# (z forward, x right, y down).
_LIDAR_BASE = np.array(
    [
        [0.0, -1.0, 0.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
    ]
)


def default_rig() -> SensorRig:
    """The rig every experiment defaults to: a noisy 64-channel LIDAR, a
    clean 32-channel LIDAR, one wide camera and an 800x600 stereo pair with
    a 10 cm factory baseline."""
    lidar_base = Rotation.from_matrix(_LIDAR_BASE)
    stereo_rot = exp_so3((-0.006, 0.012, -0.010))
    stereo_left_t = np.array([-0.06, 0.05, 0.01])
    baseline = np.array([0.10, 0.0, 0.0])
    sensors = {
        "lidar64": SensorModel(
            name="lidar64",
            kind=LIDAR,
            pose=Pose(exp_so3((0.020, -0.015, 0.010)) * lidar_base, (0.02, -0.22, -0.04)),
            pattern=ScanPattern(64, np.deg2rad(45.0), np.deg2rad(0.2)),
        ),
        "lidar32": SensorModel(
            name="lidar32",
            kind=LIDAR,
            pose=Pose(exp_so3((-0.010, 0.020, -0.012)) * lidar_base, (-0.05, -0.15, 0.03)),
            pattern=ScanPattern(32, np.deg2rad(40.0), np.deg2rad(0.2)),
        ),
        "cam": SensorModel(
            name="cam",
            kind=CAMERA,
            pose=Pose(exp_so3((0.010, -0.008, 0.004)), (0.08, 0.02, 0.0)),
            intrinsics=CameraIntrinsics(1150.0, 1150.0, 800.0, 600.0),
            image_size=(1600, 1200),
        ),
        "stereo_left": SensorModel(
            name="stereo_left",
            kind=CAMERA,
            pose=Pose(stereo_rot, stereo_left_t),
            intrinsics=CameraIntrinsics(580.0, 580.0, 400.0, 300.0),
            image_size=(800, 600),
        ),
        "stereo_right": SensorModel(
            name="stereo_right",
            kind=CAMERA,
            pose=Pose(stereo_rot, stereo_left_t + stereo_rot.apply(baseline)),
            intrinsics=CameraIntrinsics(580.0, 580.0, 400.0, 300.0),
            image_size=(800, 600),
        ),
    }
    stereo = StereoPair("stereo_left", "stereo_right", Pose(Rotation.identity(), baseline))
    return SensorRig(sensors=sensors, stereo_pairs=(stereo,))


# ---------------------------------------------------------------------------
# Target pose sampling


def _corner_visible_in_camera(sensor: SensorModel, corners_rig: np.ndarray) -> bool:
    local = sensor.pose.inverse().apply(corners_rig)
    if np.any(local[:, 2] < 0.3):
        return False
    px, ok = project_points(sensor.intrinsics, Pose.identity(), local)
    if not np.all(ok):
        return False
    if sensor.image_size is None:
        return True
    w, h = sensor.image_size
    margin = 10.0
    return bool(
        np.all(px[:, 0] >= margin)
        and np.all(px[:, 0] <= w - margin)
        and np.all(px[:, 1] >= margin)
        and np.all(px[:, 1] <= h - margin)
    )


def _corner_visible_in_lidar(sensor: SensorModel, corners_rig: np.ndarray) -> bool:
    local = sensor.pose.inverse().apply(corners_rig)
    rng_xy = np.hypot(local[:, 0], local[:, 1])
    if np.any(rng_xy < 0.5) or np.any(np.linalg.norm(local, axis=1) > 15.0):
        return False
    elev = np.arctan2(local[:, 2], rng_xy)
    spacing = sensor.pattern.vertical_fov / (sensor.pattern.channel_count - 1)
    limit = 0.5 * sensor.pattern.vertical_fov - 1.5 * spacing
    return bool(np.all(np.abs(elev) <= limit))


def sample_target_poses(
    n: int,
    range_interval=(2.5, 4.0),
    rng=None,
    *,
    rig: SensorRig | None = None,
    target: TargetModel | None = None,
    roll_interval=(np.deg2rad(30.0), np.deg2rad(60.0)),
    tilt_max=np.deg2rad(25.0),
    max_attempts_per_pose: int = 200,
) -> list[Pose]:
    """Sample ``n`` target poses visible to every sensor of the rig.

    Poses are rejected until all four board corners fall inside every
    camera frustum and every LIDAR vertical field of view. The in-plane
    roll is drawn from ``roll_interval`` (randomly signed) so the board is
    held diagonally; the face normal stays within ``tilt_max`` of the rig
    forward axis, which also guarantees at least three non-coplanar plane
    normals once ``n >= 3``.

    Raises
    ------
    InfeasibleScene
        If rejection sampling exceeds its attempt budget.
    """
    if n < 1:
        raise ValueError("need n >= 1 poses")
    rng = np.random.default_rng(rng)
    rig = rig if rig is not None else default_rig()
    target = target if target is not None else TargetModel()
    base = Rotation.from_matrix(np.diag([1.0, -1.0, -1.0]))
    corners_local = target.corners()
    poses: list[Pose] = []
    attempts = 0
    budget = max_attempts_per_pose * n
    while len(poses) < n:
        if attempts >= budget:
            raise InfeasibleScene(
                f"accepted {len(poses)}/{n} poses after {attempts} attempts"
            )
        attempts += 1
        z = rng.uniform(range_interval[0], range_interval[1])
        x = rng.uniform(-0.4, 0.4)
        y = rng.uniform(-0.15, 0.25)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        tilt = rng.uniform(np.deg2rad(5.0), tilt_max)
        roll = rng.choice([-1.0, 1.0]) * rng.uniform(*roll_interval)
        rot = (
            base
            * rotation_about((np.cos(phi), np.sin(phi), 0.0), tilt)
            * rotation_about((0.0, 0.0, 1.0), roll)
        )
        pose = Pose(rot, (x, y, z))
        corners_rig = pose.apply(corners_local)
        ok = True
        for sensor in rig.sensors.values():
            if sensor.kind == CAMERA:
                ok = _corner_visible_in_camera(sensor, corners_rig)
            else:
                ok = _corner_visible_in_lidar(sensor, corners_rig)
            if not ok:
                break
        if ok:
            poses.append(pose)
    if n >= 3:
        normals = np.stack([p.rotation.matrix()[:, 2] for p in poses])
        if np.linalg.svd(normals, compute_uv=False)[-1] <= 1e-6:
            raise InfeasibleScene("sampled poses have rank-deficient normals")
    return poses


# ---------------------------------------------------------------------------
# LIDAR simulation


def _scan_directions(pattern: ScanPattern, corners_local: np.ndarray):
    """Ray directions for the grid window covering the target's corners."""
    az = np.arctan2(corners_local[:, 1], corners_local[:, 0])
    if az.max() - az.min() > np.pi:
        raise NoReturns("target straddles the scan azimuth wrap")
    step = pattern.azimuth_step
    k_lo = int(np.floor(az.min() / step)) - 2
    k_hi = int(np.ceil(az.max() / step)) + 2
    azimuths = np.arange(k_lo, k_hi + 1) * step
    elevations = pattern.elevations()
    elev_grid, az_grid = np.meshgrid(elevations, azimuths, indexing="ij")
    ce = np.cos(elev_grid)
    dirs = np.stack(
        [ce * np.cos(az_grid), ce * np.sin(az_grid), np.sin(elev_grid)], axis=-1
    )
    return dirs.reshape(-1, 3)


def simulate_lidar_scan(
    rig: SensorRig,
    sensor_id: str,
    target_pose: Pose,
    pattern: ScanPattern | None = None,
    noise: NoiseModel | None = None,
    rng=None,
    target: TargetModel | None = None,
) -> LidarObservation:
    """Ray-cast one LIDAR's scan grid against the target rectangle.

    Grid points within one azimuth-step arc length of a board boundary
    segment are labeled as edge points for that edge (labels are assigned
    before noise). Range noise is applied along the ray. Clutter points are
    drawn uniformly in a shell around the scene so that downstream RANSAC
    has something to reject; they make up ``clutter_fraction`` of the
    returned cloud.

    Raises
    ------
    NoReturns
        If no ray hits the board.
    """
    sensor = rig.sensors[sensor_id]
    if sensor.kind != LIDAR:
        raise ValueError(f"{sensor_id!r} is not a LIDAR")
    pattern = pattern if pattern is not None else sensor.pattern
    noise = noise if noise is not None else NoiseModel()
    target = target if target is not None else TargetModel()
    rng = np.random.default_rng(rng)

    board = compose(sensor.pose.inverse(), target_pose)  # target -> lidar frame
    corners_local = board.apply(target.corners())
    dirs = _scan_directions(pattern, corners_local)
    t_hit, uv, hit = kernels.intersect_rectangle(
        dirs,
        board.rotation.matrix(),
        board.translation,
        0.5 * target.width,
        0.5 * target.height,
        _MIN_LIDAR_RANGE,
    )
    if not np.any(hit):
        raise NoReturns(f"no ray from {sensor_id!r} hits the board")

    ranges = t_hit[hit]
    dirs_hit = dirs[hit]
    u, v = uv[hit, 0], uv[hit, 1]
    hw, hh = 0.5 * target.width, 0.5 * target.height
    # in-plane distance to each boundary segment (hits are inside the
    # rectangle, so the perpendicular foot always lies on the segment)
    edge_dist = np.stack([u + hw, v + hh, hw - u, hh - v], axis=1)
    threshold = ranges * pattern.azimuth_step
    nearest = np.argmin(edge_dist, axis=1)
    is_edge = edge_dist[np.arange(len(u)), nearest] <= threshold
    labels = np.where(is_edge, nearest + 1, 0)

    if noise.lidar_range_sigma > 0.0:
        ranges = ranges + rng.normal(0.0, noise.lidar_range_sigma, size=ranges.shape)
    points = ranges[:, None] * dirs_hit

    n_clutter = 0
    if noise.clutter_fraction > 0.0:
        f = noise.clutter_fraction
        n_clutter = int(round(f / (1.0 - f) * len(points)))
    if n_clutter > 0:
        half = 0.5 * pattern.vertical_fov
        c_az = rng.uniform(-np.pi, np.pi, n_clutter)
        c_el = rng.uniform(-half, half, n_clutter)
        c_r = rng.uniform(1.0, 8.0, n_clutter)
        ce = np.cos(c_el)
        clutter = c_r[:, None] * np.stack(
            [ce * np.cos(c_az), ce * np.sin(c_az), np.sin(c_el)], axis=1
        )
    else:
        clutter = np.zeros((0, 3))

    edge_mask = labels > 0
    return LidarObservation(
        planar_points=points,
        edge_labels=labels[edge_mask],
        edge_points=points[edge_mask],
        clutter_points=clutter,
    )


# ---------------------------------------------------------------------------
# Camera simulation


def simulate_camera_view(
    rig: SensorRig,
    sensor_id: str,
    target_pose: Pose,
    noise: NoiseModel | None = None,
    rng=None,
    target: TargetModel | None = None,
) -> CameraObservation:
    """Project the target corners into one camera and build its features.

    True corners are projected through the pinhole model, pixel noise is
    added, and the four boundary lines are refit through the noisy corner
    pairs. The stored plane is the exact target plane in the camera frame
    (pipelines that want a noisy plane re-estimate it from the corners).

    Raises
    ------
    TargetNotVisible
        If any corner falls outside the image or behind the camera.
    """
    sensor = rig.sensors[sensor_id]
    if sensor.kind != CAMERA:
        raise ValueError(f"{sensor_id!r} is not a camera")
    noise = noise if noise is not None else NoiseModel()
    target = target if target is not None else TargetModel()
    rng = np.random.default_rng(rng)

    board = compose(sensor.pose.inverse(), target_pose)  # target -> camera frame
    corners_cam = board.apply(target.corners())
    px, ok = project_points(sensor.intrinsics, Pose.identity(), corners_cam)
    visible = ok.copy()
    if sensor.image_size is not None:
        w, h = sensor.image_size
        visible &= (
            (px[:, 0] >= 0.0) & (px[:, 0] <= w) & (px[:, 1] >= 0.0) & (px[:, 1] <= h)
        )
    if not np.all(visible):
        raise TargetNotVisible(f"target not fully visible in {sensor_id!r}")

    corners = px.copy()
    if noise.pixel_sigma > 0.0:
        corners = corners + rng.normal(0.0, noise.pixel_sigma, size=corners.shape)
    lines = tuple(
        line_through_points(corners[j], corners[(j + 1) % 4]) for j in range(4)
    )
    plane_normal = board.rotation.matrix()[:, 2]
    return CameraObservation(
        plane=Plane(plane_normal, board.translation),
        lines=lines,
        corners=corners,
        corner_visible=visible,
    )


# ---------------------------------------------------------------------------
# Dataset assembly


def observation_rng(seed: int, pose_index: int, sensor_index: int) -> np.random.Generator:
    """Per-observation RNG stream; independent of simulation order."""
    return np.random.default_rng([seed, 1 + pose_index, sensor_index])


def build_dataset(
    rig: SensorRig,
    n_poses: int,
    noise: dict[str, NoiseModel] | None = None,
    seed: int = 0,
    target: TargetModel | None = None,
    range_interval=(2.5, 4.0),
) -> Dataset:
    """Generate a full dataset: sampled target poses plus every sensor's
    observation of each, with per-sensor noise. A pure function of its
    arguments; each observation draws from an RNG stream derived from
    (seed, pose index, sensor index)."""
    target = target if target is not None else TargetModel()
    noise = dict(noise) if noise else {}
    poses = sample_target_poses(
        n_poses,
        range_interval,
        np.random.default_rng([seed, 0]),
        rig=rig,
        target=target,
    )
    names = sorted(rig.sensors)
    observations = []
    for i, pose in enumerate(poses):
        obs: dict[str, LidarObservation | CameraObservation] = {}
        for j, name in enumerate(names):
            sensor = rig.sensors[name]
            nm = noise.get(name, NoiseModel())
            stream = observation_rng(seed, i, j)
            if sensor.kind == LIDAR:
                obs[name] = simulate_lidar_scan(
                    rig, name, pose, noise=nm, rng=stream, target=target
                )
            else:
                obs[name] = simulate_camera_view(
                    rig, name, pose, noise=nm, rng=stream, target=target
                )
        observations.append(obs)
    meta = default_meta(seed, {n: noise.get(n, NoiseModel()) for n in names}, target)
    meta["range_interval"] = list(range_interval)
    return Dataset(rig=rig, observations=observations, meta=meta)
