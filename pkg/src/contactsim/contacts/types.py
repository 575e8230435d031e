"""Contact pipeline data types.

Candidate contacts are kept in struct-of-arrays form (ContactSet) for speed;
Contact is the single-record view used at API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_NORMAL_CONE_COS = float(np.cos(np.radians(20.0)))


@dataclass(frozen=True)
class Contact:
    """Point-normal-depth candidate; the normal points from the SDF body
    toward the mesh body, depth > 0 means penetrating."""

    point: np.ndarray
    normal: np.ndarray
    depth: float
    body_a: int  # SDF body
    body_b: int  # mesh body
    face_index: int


class ContactSet:
    """Candidate contacts of one shape pair, arrays aligned by index."""

    __slots__ = ("points", "normals", "depths", "face_indices", "body_a", "body_b")

    def __init__(self, points, normals, depths, face_indices, body_a: int, body_b: int):
        self.points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        self.normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
        self.depths = np.asarray(depths, dtype=np.float64).reshape(-1)
        self.face_indices = np.asarray(face_indices, dtype=np.int64).reshape(-1)
        self.body_a = body_a
        self.body_b = body_b

    @classmethod
    def empty(cls, body_a: int = -1, body_b: int = -1) -> "ContactSet":
        return cls(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0), np.zeros(0, dtype=np.int64), body_a, body_b)

    def __len__(self) -> int:
        return len(self.depths)

    def contact(self, i: int) -> Contact:
        return Contact(
            self.points[i].copy(), self.normals[i].copy(), float(self.depths[i]),
            self.body_a, self.body_b, int(self.face_indices[i]),
        )

    def subset(self, indices) -> "ContactSet":
        return ContactSet(
            self.points[indices], self.normals[indices], self.depths[indices],
            self.face_indices[indices], self.body_a, self.body_b,
        )


@dataclass
class ReductionParams:
    max_patches: int = 128  # N
    per_patch_cap: int = 6
    normal_cone_cos: float = DEFAULT_NORMAL_CONE_COS
    min_depth: float | None = None  # cull candidates shallower than this; None keeps all
    batch_size: int = 1024

    def __post_init__(self):
        if not 1 <= self.max_patches:
            raise ValueError("max_patches must be positive")
        if self.per_patch_cap < 1:
            raise ValueError("per_patch_cap must be at least 1")
        if not -1.0 <= self.normal_cone_cos <= 1.0:
            raise ValueError("normal_cone_cos must be a cosine")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")


@dataclass
class ContactPatch:
    """Cluster of contacts sharing a normal cone, plus the absorbed-candidate
    aggregates needed for equivalent-system checks."""

    representative_normal: np.ndarray
    points: np.ndarray  # (k, 3) kept contact points
    normals: np.ndarray  # (k, 3)
    depths: np.ndarray  # (k,)
    face_indices: np.ndarray  # (k,)
    member_indices: np.ndarray  # all absorbed candidate indices (into the input set)
    weight_sum: float = 0.0
    weighted_point_sum: np.ndarray = field(default_factory=lambda: np.zeros(3))
    weighted_normal_sum: np.ndarray = field(default_factory=lambda: np.zeros(3))
    weighted_torque_sum: np.ndarray = field(default_factory=lambda: np.zeros(3))  # about origin
    area_metric: float = 0.0
    max_depth: float = -np.inf

    def __len__(self) -> int:
        return len(self.depths)

    def contacts(self, body_a: int = -1, body_b: int = -1) -> list[Contact]:
        return [
            Contact(self.points[i].copy(), self.normals[i].copy(), float(self.depths[i]),
                    body_a, body_b, int(self.face_indices[i]))
            for i in range(len(self))
        ]


@dataclass(frozen=True)
class CollisionPairing:
    """Role assignment for a body pair: which side is sampled as an SDF.

    fallback marks pairs where neither body opted into SDF collision; this
    engine still collides them mesh-vs-SDF (larger triangle count as SDF)
    and the harness logs the substitution.
    """

    sdf_body: int
    mesh_body: int
    fallback: bool = False
