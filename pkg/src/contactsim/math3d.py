"""Small 3D math helpers: quaternions (w, x, y, z), rotation matrices, axis-angle.

All functions take and return plain float64 ndarrays. Quaternions follow the
scalar-first (w, x, y, z) convention and are assumed unit length unless noted.
"""

from __future__ import annotations

import numpy as np

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("cannot normalize zero quaternion")
    return q / n


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector v by unit quaternion q."""
    qv = q[1:]
    t = 2.0 * np.cross(qv, v)
    return v + q[0] * t + np.cross(qv, t)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(m: np.ndarray) -> np.ndarray:
    """Shepperd's method; robust for all rotation matrices."""
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0.0:
        s = np.sqrt(tr + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        )
    elif m[1, 1] > m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        )
    return quat_normalize(q)


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        return IDENTITY_QUAT.copy()
    half = 0.5 * angle
    return np.concatenate([[np.cos(half)], np.sin(half) * axis / n])


def quat_integrate(q: np.ndarray, omega: np.ndarray, dt: float) -> np.ndarray:
    """Advance orientation by world-frame angular velocity over dt; renormalized."""
    dq = quat_multiply(np.concatenate([[0.0], omega]), q)
    return quat_normalize(q + 0.5 * dt * dq)


def rotation_to_axis_angle(m: np.ndarray) -> np.ndarray:
    """Rotation vector (axis * angle) of a rotation matrix; angle in [0, pi]."""
    cos_a = np.clip((np.trace(m) - 1.0) * 0.5, -1.0, 1.0)
    angle = np.arccos(cos_a)
    if angle < 1e-12:
        return np.zeros(3)
    if np.pi - angle < 1e-7:
        # Near pi the off-diagonal extraction degenerates; use the dominant
        # column of (m + I) which is parallel to the rotation axis.
        b = m + np.eye(3)
        col = b[:, np.argmax(np.diag(b))]
        axis = col / np.linalg.norm(col)
        # Fix sign convention from the skew part where it is still nonzero.
        skew = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
        if np.dot(skew, axis) < 0.0:
            axis = -axis
        return axis * angle
    axis = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]]) / (2.0 * np.sin(angle))
    return axis * angle


def axis_angle_to_matrix(r: np.ndarray) -> np.ndarray:
    angle = np.linalg.norm(r)
    if angle < 1e-12:
        return np.eye(3)
    k = skew(r / angle)
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def skew(v: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def so3_left_jacobian(r: np.ndarray) -> np.ndarray:
    """Left Jacobian of SO(3): maps rotation-vector rates to angular velocity."""
    angle = np.linalg.norm(r)
    if angle < 1e-8:
        return np.eye(3) + 0.5 * skew(r)
    k = skew(r)
    return (
        np.eye(3)
        + ((1.0 - np.cos(angle)) / angle**2) * k
        + ((angle - np.sin(angle)) / angle**3) * (k @ k)
    )


def tangent_basis(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal tangent pair for a unit normal."""
    if abs(n[0]) < 0.57735:
        t1 = np.array([1.0, 0.0, 0.0])
    else:
        t1 = np.array([0.0, 1.0, 0.0])
    t1 = t1 - n * np.dot(t1, n)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    return t1, t2


class Transform:
    """Rigid transform (rotation matrix + translation), used for mesh/grid frames."""

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation: np.ndarray | None = None, translation: np.ndarray | None = None):
        self.rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        self.translation = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)

    @classmethod
    def from_pose(cls, position: np.ndarray, quaternion: np.ndarray) -> "Transform":
        return cls(quat_to_matrix(np.asarray(quaternion, dtype=float)), position)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return points @ self.rotation.T + self.translation

    def apply_vector(self, vectors: np.ndarray) -> np.ndarray:
        return vectors @ self.rotation.T

    def inverse(self) -> "Transform":
        rt = self.rotation.T
        return Transform(rt, -rt @ self.translation)

    def compose(self, other: "Transform") -> "Transform":
        return Transform(self.rotation @ other.rotation, self.rotation @ other.translation + self.translation)
