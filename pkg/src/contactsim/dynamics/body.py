"""6-DOF rigid body state and semi-implicit integration."""

from __future__ import annotations

import numpy as np

from ..errors import NonFiniteStateError
from ..geometry.massprops import MassProperties
from ..geometry.mesh import TriMesh
from ..math3d import IDENTITY_QUAT, Transform, quat_integrate, quat_to_matrix
from ..sdf.grid import SdfResolutionSpec, SignedDistanceGrid, cached_sdf


class RigidBody:
    """Simulation state of one rigid body. Pose is the mesh/body frame origin;
    velocities refer to the center of mass."""

    def __init__(
        self,
        name: str,
        mesh: TriMesh | None,
        mass_props: MassProperties | None,
        position=(0.0, 0.0, 0.0),
        quaternion=IDENTITY_QUAT,
        is_static: bool = False,
        friction: float = 0.5,
        restitution: float = 0.0,
        sdf_spec: SdfResolutionSpec | None = None,
    ):
        if mass_props is None and not is_static:
            raise ValueError(f"dynamic body {name!r} needs mass properties")
        self.name = name
        self.body_id = -1  # assigned when added to a scene
        self.mesh = mesh
        self.mass_props = mass_props
        self.position = np.array(position, dtype=np.float64)
        self.quaternion = np.array(quaternion, dtype=np.float64)
        self.linear_velocity = np.zeros(3)
        self.angular_velocity = np.zeros(3)
        self.is_static = is_static
        self.friction = float(friction)
        self.restitution = float(restitution)
        self.sdf_spec = sdf_spec
        self.sdf_enabled = sdf_spec is not None
        self.grid: SignedDistanceGrid | None = None
        self.external_force = np.zeros(3)
        self.external_torque = np.zeros(3)
        self.driven_by_chain = False  # welded to an articulated chain actor

    # -- derived quantities ---------------------------------------------------

    def pose(self) -> Transform:
        return Transform.from_pose(self.position, self.quaternion)

    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.quaternion)

    def com_world(self) -> np.ndarray:
        return self.pose().apply(self.mass_props.center_of_mass) if self.mass_props else self.position.copy()

    def inv_mass(self) -> float:
        if self.is_static or self.driven_by_chain:
            return 0.0
        return 1.0 / self.mass_props.mass

    def inv_inertia_world(self) -> np.ndarray:
        if self.is_static or self.driven_by_chain:
            return np.zeros((3, 3))
        r = self.rotation()
        return r @ self.mass_props.inv_inertia() @ r.T

    def world_aabb(self, margin: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.mesh.aabb()
        corners = np.array(
            [[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])]
        )
        world = self.pose().apply(corners)
        return world.min(axis=0) - margin, world.max(axis=0) + margin

    def ensure_grid(self, default_spec: SdfResolutionSpec, cache_dir=None) -> SignedDistanceGrid:
        if self.grid is None:
            spec = self.sdf_spec or default_spec
            self.grid = cached_sdf(self.mesh, spec, cache_dir)
        return self.grid

    def check_finite(self) -> None:
        state = np.concatenate(
            [self.position, self.quaternion, self.linear_velocity, self.angular_velocity]
        )
        if not np.all(np.isfinite(state)):
            raise NonFiniteStateError(f"body {self.name!r} reached a non-finite state")

    def set_com_world(self, com: np.ndarray) -> None:
        offset = self.rotation() @ self.mass_props.center_of_mass if self.mass_props else 0.0
        self.position = com - offset


def integrate(body: RigidBody, dt: float, gravity) -> RigidBody:
    """Semi-implicit Euler about the COM: velocities first, then pose.

    The gyroscopic torque -w x (I w) is applied explicitly; spin about a
    principal axis is conserved exactly.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if body.is_static:
        return body
    gravity = np.asarray(gravity, dtype=np.float64)

    inv_i = body.inv_inertia_world()
    r = body.rotation()
    inertia_world = r @ body.mass_props.inertia_tensor @ r.T
    gyro = np.cross(body.angular_velocity, inertia_world @ body.angular_velocity)
    body.linear_velocity = body.linear_velocity + dt * (gravity + body.external_force * body.inv_mass())
    body.angular_velocity = body.angular_velocity + dt * (inv_i @ (body.external_torque - gyro))

    com = body.com_world() + dt * body.linear_velocity
    body.quaternion = quat_integrate(body.quaternion, body.angular_velocity, dt)
    body.set_com_world(com)
    body.check_finite()
    return body
