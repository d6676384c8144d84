"""Dataset model: sensor rig, per-view observations, and JSON (de)serialization.

The on-disk format is UTF-8 JSON with three top-level keys:

- ``rig``: sensors (name, kind, pose as quaternion wxyz + translation xyz,
  intrinsics, scan pattern) and declared stereo pairs with their factory
  extrinsic.
- ``observations``: one entry per target pose; each entry maps sensor name
  to that sensor's features (``planar_points`` / ``edge_points`` /
  ``clutter_points`` for LIDARs; ``plane`` / ``lines`` / ``corners`` /
  ``corner_visible`` for cameras).
- ``meta``: seed, per-sensor noise, target dimensions, tool version.

Floats are serialized with Python's shortest round-trip repr, which
preserves the exact double value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .geometry import CameraIntrinsics, ImageLine, Plane, Pose, Rotation

LIDAR = "lidar"
CAMERA = "camera"


@dataclass(frozen=True)
class TargetModel:
    """Rectangular planar target; corners live in the z=0 plane of the
    target frame (x right, y up, origin at the centroid, z the face normal).

    Corner order is counterclockwise as seen from the +z side:
    top-left, bottom-left, bottom-right, top-right. Edge j joins corner j
    and corner j+1 (1-based, mod 4), i.e. left, bottom, right, top.
    """

    width: float = 0.8
    height: float = 0.6

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("target dimensions must be positive")

    def corners(self) -> np.ndarray:
        w, h = 0.5 * self.width, 0.5 * self.height
        return np.array(
            [
                [-w, h, 0.0],
                [-w, -h, 0.0],
                [w, -h, 0.0],
                [w, h, 0.0],
            ]
        )


@dataclass(frozen=True)
class ScanPattern:
    """Scan-line LIDAR beam layout: evenly spaced channels over a vertical
    field of view, stepping in azimuth around the +z (up) axis; +x is the
    sensor's forward direction."""

    channel_count: int = 64
    vertical_fov: float = np.deg2rad(45.0)
    azimuth_step: float = np.deg2rad(0.2)

    def __post_init__(self):
        if self.channel_count < 2:
            raise ValueError("need at least 2 channels")
        if self.azimuth_step <= 0:
            raise ValueError("azimuth step must be positive")

    def elevations(self) -> np.ndarray:
        half = 0.5 * self.vertical_fov
        return np.linspace(-half, half, self.channel_count)


@dataclass(frozen=True)
class NoiseModel:
    """Per-sensor noise configuration. LIDARs use ``lidar_range_sigma``
    (meters, applied along the ray) and ``clutter_fraction``; cameras use
    ``pixel_sigma``."""

    lidar_range_sigma: float = 0.0
    pixel_sigma: float = 0.0
    clutter_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.lidar_range_sigma < 0 or self.pixel_sigma < 0:
            raise ValueError("noise sigmas must be nonnegative")
        if not (0.0 <= self.clutter_fraction < 1.0):
            raise ValueError("clutter_fraction must be in [0, 1)")


@dataclass(frozen=True)
class SensorModel:
    name: str
    kind: str  # "lidar" | "camera"
    pose: Pose  # sensor frame -> rig frame
    intrinsics: CameraIntrinsics | None = None
    image_size: tuple[int, int] | None = None  # (width, height) pixels
    pattern: ScanPattern | None = None
    confidence: float = 1.0

    def __post_init__(self):
        if self.kind not in (LIDAR, CAMERA):
            raise ValueError(f"unknown sensor kind {self.kind!r}")
        if self.kind == CAMERA and self.intrinsics is None:
            raise ValueError("camera sensors need intrinsics")
        if self.kind == LIDAR and self.pattern is None:
            raise ValueError("lidar sensors need a scan pattern")


@dataclass(frozen=True)
class StereoPair:
    camera_a: str
    camera_b: str
    factory: Pose  # camera_b frame -> camera_a frame


@dataclass(frozen=True)
class SensorRig:
    """Named sensors with ground-truth poses in a common rig frame."""

    sensors: dict[str, SensorModel]
    stereo_pairs: tuple[StereoPair, ...] = ()

    def __post_init__(self):
        for pair in self.stereo_pairs:
            for cam in (pair.camera_a, pair.camera_b):
                if cam not in self.sensors or self.sensors[cam].kind != CAMERA:
                    raise ValueError(f"stereo pair references unknown camera {cam!r}")

    def names(self, kind: str | None = None) -> list[str]:
        return [
            s.name
            for s in self.sensors.values()
            if kind is None or s.kind == kind
        ]

    def true_extrinsic(self, sensor_a: str, sensor_b: str) -> Pose:
        """Ground-truth transform taking sensor_b coordinates to sensor_a."""
        inv = self.sensors[sensor_a].pose.inverse()
        pb = self.sensors[sensor_b].pose
        return Pose(inv.rotation * pb.rotation, inv.rotation.apply(pb.translation) + inv.translation)


@dataclass
class LidarObservation:
    """One LIDAR's view of one target pose.

    ``planar_points`` holds every on-board return (edge points included);
    ``edge_labels``/``edge_points`` repeat the boundary subset with its
    ground-truth edge index (1..4). ``clutter_points`` are off-board.
    """

    planar_points: np.ndarray  # (p, 3)
    edge_labels: np.ndarray  # (q,) int, values 1..4
    edge_points: np.ndarray  # (q, 3)
    clutter_points: np.ndarray  # (c, 3)


@dataclass
class CameraObservation:
    """One camera's view of one target pose.

    ``plane`` is the exact target plane in the camera frame (noise-free;
    pipelines re-estimate it from the noisy corners when realism demands).
    ``lines[j]`` joins corners j and j+1 and carries the corner noise.
    """

    plane: Plane
    lines: tuple[ImageLine, ImageLine, ImageLine, ImageLine]
    corners: np.ndarray  # (4, 2) pixels, noisy
    corner_visible: np.ndarray  # (4,) bool


@dataclass
class Dataset:
    rig: SensorRig
    observations: list[dict[str, LidarObservation | CameraObservation]]
    meta: dict = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return int(self.meta.get("seed", 0))

    @property
    def target(self) -> TargetModel:
        t = self.meta.get("target", {})
        return TargetModel(float(t.get("width", 0.8)), float(t.get("height", 0.6)))

    def noise_for(self, sensor: str) -> NoiseModel:
        n = self.meta.get("noise", {}).get(sensor, {})
        return NoiseModel(
            lidar_range_sigma=float(n.get("lidar_range_sigma", 0.0)),
            pixel_sigma=float(n.get("pixel_sigma", 0.0)),
            clutter_fraction=float(n.get("clutter_fraction", 0.0)),
            seed=self.seed,
        )

    def covisibility(self) -> dict[tuple[str, str], int]:
        """Number of views in which each sensor pair both observed the target."""
        names = sorted(self.rig.sensors)
        counts = {}
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                counts[(a, b)] = sum(
                    1 for obs in self.observations if a in obs and b in obs
                )
        return counts

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "rig": rig_to_json(self.rig),
            "observations": [
                {name: _obs_to_json(o) for name, o in sorted(obs.items())}
                for obs in self.observations
            ],
            "meta": self.meta,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Dataset":
        rig = rig_from_json(d["rig"])
        observations = []
        for obs in d["observations"]:
            decoded = {}
            for name, o in obs.items():
                kind = rig.sensors[name].kind
                decoded[name] = _obs_from_json(o, kind)
            observations.append(decoded)
        return cls(rig=rig, observations=observations, meta=d.get("meta", {}))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=1)
            f.write("\n")

    @classmethod
    def load(cls, path) -> "Dataset":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_json_dict(json.load(f))


# ---------------------------------------------------------------------------
# JSON helpers


def pose_to_json(p: Pose) -> dict:
    return {
        "quaternion_wxyz": [float(v) for v in p.rotation.wxyz],
        "translation_xyz": [float(v) for v in p.translation],
    }


def pose_from_json(d: dict) -> Pose:
    return Pose(Rotation(d["quaternion_wxyz"]), d["translation_xyz"])


def rig_to_json(rig: SensorRig) -> dict:
    sensors = []
    for name in sorted(rig.sensors):
        s = rig.sensors[name]
        entry = {
            "name": s.name,
            "kind": s.kind,
            "pose": pose_to_json(s.pose),
            "confidence": s.confidence,
        }
        if s.intrinsics is not None:
            k = s.intrinsics
            entry["intrinsics"] = {
                "fx": k.fx,
                "fy": k.fy,
                "cx": k.cx,
                "cy": k.cy,
                "skew": k.skew,
            }
            entry["image_size"] = list(s.image_size) if s.image_size else None
        if s.pattern is not None:
            entry["scan_pattern"] = {
                "channel_count": s.pattern.channel_count,
                "vertical_fov": s.pattern.vertical_fov,
                "azimuth_step": s.pattern.azimuth_step,
            }
        sensors.append(entry)
    return {
        "sensors": sensors,
        "stereo_pairs": [
            {
                "camera_a": p.camera_a,
                "camera_b": p.camera_b,
                "factory": pose_to_json(p.factory),
            }
            for p in rig.stereo_pairs
        ],
    }


def rig_from_json(d: dict) -> SensorRig:
    sensors = {}
    for e in d["sensors"]:
        intr = None
        size = None
        if e.get("intrinsics"):
            k = e["intrinsics"]
            intr = CameraIntrinsics(k["fx"], k["fy"], k["cx"], k["cy"], k.get("skew", 0.0))
            size = tuple(e["image_size"]) if e.get("image_size") else None
        pattern = None
        if e.get("scan_pattern"):
            sp = e["scan_pattern"]
            pattern = ScanPattern(
                int(sp["channel_count"]), float(sp["vertical_fov"]), float(sp["azimuth_step"])
            )
        sensors[e["name"]] = SensorModel(
            name=e["name"],
            kind=e["kind"],
            pose=pose_from_json(e["pose"]),
            intrinsics=intr,
            image_size=size,
            pattern=pattern,
            confidence=float(e.get("confidence", 1.0)),
        )
    pairs = tuple(
        StereoPair(p["camera_a"], p["camera_b"], pose_from_json(p["factory"]))
        for p in d.get("stereo_pairs", [])
    )
    return SensorRig(sensors=sensors, stereo_pairs=pairs)


def load_rig(path) -> SensorRig:
    with open(path, "r", encoding="utf-8") as f:
        return rig_from_json(json.load(f))


def save_rig(rig: SensorRig, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(rig_to_json(rig), f, indent=1)
        f.write("\n")


def _obs_to_json(o) -> dict:
    if isinstance(o, LidarObservation):
        return {
            "planar_points": [[float(v) for v in p] for p in o.planar_points],
            "edge_points": [
                {"edge": int(j), "xyz": [float(v) for v in p]}
                for j, p in zip(o.edge_labels, o.edge_points)
            ],
            "clutter_points": [[float(v) for v in p] for p in o.clutter_points],
        }
    if isinstance(o, CameraObservation):
        return {
            "plane": {
                "normal": [float(v) for v in o.plane.normal],
                "offset_vector": [float(v) for v in o.plane.origin_offset],
            },
            "lines": [[float(v) for v in ln.abc] for ln in o.lines],
            "corners": [[float(v) for v in c] for c in o.corners],
            "corner_visible": [bool(b) for b in o.corner_visible],
        }
    raise TypeError(f"unknown observation type {type(o)!r}")


def _obs_from_json(d: dict, kind: str):
    if kind == LIDAR:
        edge = d.get("edge_points", [])
        return LidarObservation(
            planar_points=np.array(d["planar_points"], dtype=float).reshape(-1, 3),
            edge_labels=np.array([e["edge"] for e in edge], dtype=int),
            edge_points=np.array([e["xyz"] for e in edge], dtype=float).reshape(-1, 3),
            clutter_points=np.array(d["clutter_points"], dtype=float).reshape(-1, 3),
        )
    return CameraObservation(
        plane=Plane(np.array(d["plane"]["normal"]), np.array(d["plane"]["offset_vector"])),
        lines=tuple(ImageLine(np.array(ln)) for ln in d["lines"]),
        corners=np.array(d["corners"], dtype=float).reshape(-1, 2),
        corner_visible=np.array(d.get("corner_visible", [True] * 4), dtype=bool),
    )


def default_meta(seed: int, noise: dict[str, NoiseModel], target: TargetModel) -> dict:
    return {
        "seed": int(seed),
        "noise": {
            name: {
                "lidar_range_sigma": nm.lidar_range_sigma,
                "pixel_sigma": nm.pixel_sigma,
                "clutter_fraction": nm.clutter_fraction,
            }
            for name, nm in sorted(noise.items())
        },
        "target": {"width": target.width, "height": target.height},
        "tool_version": __version__,
    }
