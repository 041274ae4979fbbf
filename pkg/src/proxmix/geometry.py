"""Coordinate primitives shared by every other module.

Units are meters. The world frame is right-handed with +y up and the floor
at y = 0. Yaw is degrees in [-180, 180) about the +y axis, with 0 facing -z
and positive angles turning clockwise when viewed from above (compass-style).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def normalize_yaw(deg: float) -> float:
    """Wrap an angle in degrees into [-180, 180)."""
    wrapped = math.fmod(deg + 180.0, 360.0)
    if wrapped < 0.0:
        wrapped += 360.0
    return wrapped - 180.0


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"Vec3.{name} must be a number, got {v!r}")
            if not math.isfinite(v):
                raise ValueError(f"Vec3.{name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "Vec3":
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def distance_to(self, other: "Vec3") -> float:
        return math.sqrt(
            (self.x - other.x) ** 2
            + (self.y - other.y) ** 2
            + (self.z - other.z) ** 2
        )


@dataclass(frozen=True)
class Pose:
    """Listener state: position plus view direction.

    Only yaw matters for audio (the panner works in the horizontal plane);
    pitch is carried so a camera-style feed can round-trip through us.
    """

    position: Vec3
    yaw: float = 0.0
    pitch: float = 0.0

    def __post_init__(self) -> None:
        if not (-180.0 <= self.yaw < 180.0):
            raise ValueError(f"Pose.yaw must be in [-180, 180), got {self.yaw}")
        if not (-89.0 <= self.pitch <= 89.0):
            raise ValueError(f"Pose.pitch must be in [-89, 89], got {self.pitch}")

    def forward_xz(self) -> tuple[float, float]:
        """Unit forward direction projected onto the floor plane."""
        r = math.radians(self.yaw)
        return (math.sin(r), -math.cos(r))

    def right_xz(self) -> tuple[float, float]:
        """Unit rightward direction projected onto the floor plane."""
        r = math.radians(self.yaw)
        return (math.cos(r), math.sin(r))


@dataclass(frozen=True)
class AnchorFrame:
    """Rigid transform pinning sculpture-local coordinates into the world.

    Stands in for the manual alignment step of a physical install: the scene
    author measures where the sculpture sits and writes the offset down.
    """

    origin: Vec3
    yaw: float = 0.0

    def __post_init__(self) -> None:
        if not (-180.0 <= self.yaw < 180.0):
            raise ValueError(f"AnchorFrame.yaw must be in [-180, 180), got {self.yaw}")


def yaw_matrix(yaw_deg: float) -> np.ndarray:
    """3x3 rotation matrix for a clockwise-from-above yaw about +y."""
    r = math.radians(yaw_deg)
    c, s = math.cos(r), math.sin(r)
    return np.array(
        [
            [c, 0.0, -s],
            [0.0, 1.0, 0.0],
            [s, 0.0, c],
        ],
        dtype=np.float64,
    )


def anchor_to_world(anchor: AnchorFrame, p_local: Vec3) -> Vec3:
    """Rotate by the anchor yaw, then translate by the anchor origin."""
    rotated = yaw_matrix(anchor.yaw) @ p_local.to_array()
    return Vec3.from_array(rotated + anchor.origin.to_array())


def transform_points(anchor: AnchorFrame, points: np.ndarray) -> np.ndarray:
    """Apply the anchor transform to an (..., 3) array of local points."""
    m = yaw_matrix(anchor.yaw)
    origin = anchor.origin.to_array()
    return points @ m.T + origin


def triangle_area(tri: np.ndarray) -> float:
    """Area of a 3x3 triangle (one vertex per row)."""
    cross = np.cross(tri[1] - tri[0], tri[2] - tri[0])
    return 0.5 * float(np.linalg.norm(cross))
