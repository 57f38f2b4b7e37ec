"""Rigid-body poses, twist adjoints, and capsule distance queries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ROTATION_TOL = 1e-9


def skew(v: np.ndarray) -> np.ndarray:
    """3x3 cross-product matrix: skew(a) @ b == cross(a, b)."""
    x, y, z = np.asarray(v, dtype=float).ravel()
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def so3_exp(w: np.ndarray) -> np.ndarray:
    """Rotation matrix from a rotation vector (Rodrigues)."""
    w = np.asarray(w, dtype=float).ravel()
    angle = np.linalg.norm(w)
    K = skew(w)
    if angle < 1e-12:
        # second-order series, accurate for tiny angles
        return np.eye(3) + K + 0.5 * (K @ K)
    K = K / angle
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def so3_log(R: np.ndarray) -> np.ndarray:
    """Rotation vector from a rotation matrix; inverse of so3_exp."""
    R = np.asarray(R, dtype=float)
    cos_angle = np.clip(0.5 * (np.trace(R) - 1.0), -1.0, 1.0)
    angle = np.arccos(cos_angle)
    if angle < 1e-8:
        return 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if np.pi - angle < 1e-6:
        # near pi the off-diagonal difference vanishes; recover the axis from R + I
        A = 0.5 * (R + np.eye(3))
        axis = np.sqrt(np.maximum(np.diag(A), 0.0))
        k = int(np.argmax(axis))
        axis = A[:, k] / max(axis[k], 1e-12)
        axis = axis / np.linalg.norm(axis)
        # fix the sign using the largest off-diagonal skew component
        w = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
        if np.dot(w, axis) < 0.0:
            axis = -axis
        return angle * axis
    scale = angle / (2.0 * np.sin(angle))
    return scale * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])


def rot_z(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class Pose:
    """Rigid transform: p_parent = rotation @ p_child + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.array(self.rotation, dtype=float)
        t = np.array(self.translation, dtype=float).ravel()
        if R.shape != (3, 3) or t.shape != (3,):
            raise ValueError(f"pose needs a 3x3 rotation and 3-vector, got {R.shape} and {t.shape}")
        if np.max(np.abs(R.T @ R - np.eye(3))) > ROTATION_TOL or abs(np.linalg.det(R) - 1.0) > ROTATION_TOL:
            raise ValueError("rotation is not orthonormal with determinant +1")
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def _trusted(R: np.ndarray, t: np.ndarray) -> "Pose":
        """Skip validation for rotations produced by composition of already
        validated poses (orthonormality survives to machine precision)."""
        pose = object.__new__(Pose)
        object.__setattr__(pose, "rotation", R)
        object.__setattr__(pose, "translation", t)
        return pose

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.eye(3), np.zeros(3))

    @staticmethod
    def from_rotvec(w, t) -> "Pose":
        return Pose(so3_exp(np.asarray(w, dtype=float)), np.asarray(t, dtype=float))

    @staticmethod
    def planar(x: float, y: float, theta: float, z: float = 0.0) -> "Pose":
        return Pose(rot_z(theta), np.array([x, y, z]))

    def compose(self, other: "Pose") -> "Pose":
        return Pose._trusted(self.rotation @ other.rotation,
                             self.rotation @ other.translation + self.translation)

    def __matmul__(self, other: "Pose") -> "Pose":
        return self.compose(other)

    def inverse(self) -> "Pose":
        Rt = np.ascontiguousarray(self.rotation.T)
        return Pose._trusted(Rt, -Rt @ self.translation)

    def apply(self, point: np.ndarray) -> np.ndarray:
        return self.rotation @ np.asarray(point, dtype=float) + self.translation


def adjoint_of_pose(pose: Pose, direction: str = "world") -> np.ndarray:
    """6x6 twist transformation matrix of a pose, twist layout [v; w].

    "world" uses the block layout [R, skew(r) R; 0, R]; "tool" uses the
    transposed-rotation layout [R^T, -R^T skew(r); 0, R^T], which equals the
    world-style adjoint of the inverse pose.
    """
    R, r = pose.rotation, pose.translation
    A = np.zeros((6, 6))
    if direction == "world":
        A[:3, :3] = R
        A[:3, 3:] = skew(r) @ R
        A[3:, 3:] = R
    elif direction == "tool":
        A[:3, :3] = R.T
        A[:3, 3:] = -R.T @ skew(r)
        A[3:, 3:] = R.T
    else:
        raise ValueError(f"direction must be 'world' or 'tool', got {direction!r}")
    return A


@dataclass(frozen=True)
class Capsule:
    """Segment-swept sphere: axis p1..p2 with radius radius."""

    p1: np.ndarray
    p2: np.ndarray
    radius: float

    def __post_init__(self):
        p1 = np.array(self.p1, dtype=float).ravel()
        p2 = np.array(self.p2, dtype=float).ravel()
        if p1.shape != (3,) or p2.shape != (3,):
            raise ValueError("capsule endpoints must be 3-vectors")
        if self.radius <= 0.0:
            raise ValueError(f"capsule radius must be positive, got {self.radius}")
        p1.setflags(write=False)
        p2.setflags(write=False)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    def transformed(self, pose: Pose) -> "Capsule":
        return Capsule(pose.apply(self.p1), pose.apply(self.p2), self.radius)


def capsule_point_distance(capsule: Capsule, point: np.ndarray) -> tuple[float, np.ndarray]:
    """Signed distance from a point to the capsule surface.

    Returns (d, closest_axis_point) with d = |point - x_c| - radius, where x_c
    is the closest point on the axis segment. d < 0 means the point is inside.
    """
    p = np.asarray(point, dtype=float).ravel()
    axis = capsule.p2 - capsule.p1
    denom = float(axis @ axis)
    if denom < 1e-18:
        t = 0.0
    else:
        t = float(np.clip((p - capsule.p1) @ axis / denom, 0.0, 1.0))
    x_c = capsule.p1 + t * axis
    return float(np.linalg.norm(p - x_c)) - capsule.radius, x_c
