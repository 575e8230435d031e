"""Mass, center of mass, and inertia of watertight meshes via signed tetrahedra.

Each surface triangle spans a signed tetrahedron with the origin; summing the
tetrahedra's volume/first/second moments gives exact polyhedral mass
properties (divergence theorem). Inertia is reported about the center of
mass in the body frame.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import MeshValidationError
from .mesh import TriMesh

log = logging.getLogger(__name__)

# Second moments of the canonical tetrahedron (0, e1, e2, e3):
# integral of x_i*x_j is 1/60 on the diagonal, 1/120 off it.
_CANONICAL_COV = np.full((3, 3), 1.0 / 120.0) + np.eye(3) * (1.0 / 120.0)


@dataclass(frozen=True)
class MassProperties:
    mass: float
    center_of_mass: np.ndarray
    inertia_tensor: np.ndarray  # 3x3, about COM, body frame

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")

    def inv_inertia(self) -> np.ndarray:
        return np.linalg.inv(self.inertia_tensor)

    @classmethod
    def solid_sphere(cls, mass: float, radius: float) -> "MassProperties":
        i = 0.4 * mass * radius * radius
        return cls(mass, np.zeros(3), np.eye(3) * i)

    @classmethod
    def solid_box(cls, mass: float, extents) -> "MassProperties":
        e = np.asarray(extents, dtype=float)
        diag = mass / 12.0 * np.array(
            [e[1] ** 2 + e[2] ** 2, e[0] ** 2 + e[2] ** 2, e[0] ** 2 + e[1] ** 2]
        )
        return cls(mass, np.zeros(3), np.diag(diag))


def mass_properties(mesh: TriMesh, density: float) -> MassProperties:
    """Volume/COM/inertia of a watertight mesh at uniform density (kg/m^3)."""
    if density <= 0.0:
        raise ValueError("density must be positive")
    mesh.require_watertight("mass_properties")

    corners = mesh.triangle_corners()  # (n, 3, 3)
    a, b, c = corners[:, 0], corners[:, 1], corners[:, 2]
    det = np.einsum("ij,ij->i", a, np.cross(b, c))  # 6 * signed tet volume

    volume = det.sum() / 6.0
    if volume < 0.0:
        log.warning("mesh orientation is inward-facing; flipping for mass properties")
        det = -det
        volume = -volume
    if volume <= 0.0:
        raise MeshValidationError("mesh encloses no volume")

    com = (det[:, None] * (a + b + c)).sum(axis=0) / (24.0 * volume)

    # Covariance about the origin: sum over tets of det(A) * A @ C_canon @ A^T
    # with A = [a b c] columns.
    basis = np.stack([a, b, c], axis=2)  # (n, 3, 3), columns are vertices
    cov = np.einsum("n,nik,kl,njl->ij", det, basis, _CANONICAL_COV, basis)

    mass = density * volume
    inertia_origin = density * (np.trace(cov) * np.eye(3) - cov)
    # Parallel-axis shift to the COM.
    d = com
    inertia_com = inertia_origin - mass * (np.dot(d, d) * np.eye(3) - np.outer(d, d))
    inertia_com = 0.5 * (inertia_com + inertia_com.T)
    return MassProperties(mass, com, inertia_com)
