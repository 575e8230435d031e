"""Scene container and the substepping simulation step.

Per substep: actors integrate their internal state and refresh their welded
bodies, free bodies integrate velocities, the contact pipeline runs at the
current poses, position sweeps solve non-penetration with bias, positions
integrate with the corrected velocities, and velocity sweeps remove residual
normal velocity. Contacts are regenerated every substep.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..contacts.generation import BodyShape, assign_roles, generate_contacts
from ..contacts.reduction import reduce_contacts
from ..contacts.types import ContactSet, ContactPatch, ReductionParams
from ..errors import NonFiniteStateError
from ..geometry.broadphase import broadphase_pairs
from ..math3d import quat_integrate
from ..sdf.grid import SdfResolutionSpec
from .body import RigidBody
from .solver import ContactConstraints, SolverParams, SolverState


@dataclass
class StepReport:
    contacts_before: int = 0
    contacts_after: int = 0
    patches: int = 0
    max_penetration: float = 0.0
    contact_handling_time: float = 0.0
    solve_time: float = 0.0
    body_wrenches: np.ndarray | None = None  # (nb, 6)
    pair_debug: list = field(default_factory=list)  # (pair, candidates, patches)


class Scene:
    def __init__(
        self,
        gravity=(0.0, 0.0, -9.81),
        solver_params: SolverParams | None = None,
        reduction_params: ReductionParams | None = None,
        default_sdf_spec: SdfResolutionSpec = SdfResolutionSpec(128, 4),
        sdf_cache_dir=None,
    ):
        self.gravity = np.asarray(gravity, dtype=np.float64)
        self.solver_params = solver_params or SolverParams()
        self.reduction_params = reduction_params or ReductionParams()
        self.default_sdf_spec = default_sdf_spec
        self.sdf_cache_dir = sdf_cache_dir
        self.bodies: list[RigidBody] = []
        self.actors: list = []
        self.exclusions: set[frozenset[int]] = set()
        self.fallback_pairs_seen: set[tuple[int, int]] = set()
        self.frame_index = 0

    def add_body(self, body: RigidBody) -> RigidBody:
        body.body_id = len(self.bodies)
        self.bodies.append(body)
        return body

    def body_by_name(self, name: str) -> RigidBody:
        for body in self.bodies:
            if body.name == name:
                return body
        raise KeyError(name)

    def exclude_pair(self, name_a: str, name_b: str) -> None:
        self.exclusions.add(
            frozenset((self.body_by_name(name_a).body_id, self.body_by_name(name_b).body_id))
        )

    def total_kinetic_energy(self) -> float:
        ke = 0.0
        for body in self.bodies:
            if body.is_static or body.mass_props is None:
                continue
            m = body.mass_props.mass
            r = body.rotation()
            inertia = r @ body.mass_props.inertia_tensor @ r.T
            ke += 0.5 * m * body.linear_velocity @ body.linear_velocity
            ke += 0.5 * body.angular_velocity @ inertia @ body.angular_velocity
        return ke

    def total_potential_energy(self) -> float:
        pe = 0.0
        for body in self.bodies:
            if body.is_static or body.mass_props is None:
                continue
            pe -= body.mass_props.mass * self.gravity @ body.com_world()
        return pe

    # -- stepping -------------------------------------------------------------

    def step(self, params: SolverParams | None = None) -> StepReport:
        params = params or self.solver_params
        report = StepReport()
        h = params.dt / params.substeps
        for _ in range(params.substeps):
            self._substep(h, params, report)
        for body in self.bodies:
            body.check_finite()
        self.frame_index += 1
        return report

    def _substep(self, h: float, params: SolverParams, report: StepReport) -> None:
        for actor in self.actors:
            actor.begin_substep(self, h)

        for body in self.bodies:
            if body.is_static or body.driven_by_chain:
                continue
            inv_i = body.inv_inertia_world()
            r = body.rotation()
            inertia_world = r @ body.mass_props.inertia_tensor @ r.T
            gyro = np.cross(body.angular_velocity, inertia_world @ body.angular_velocity)
            body.linear_velocity = body.linear_velocity + h * (
                self.gravity + body.external_force * body.inv_mass()
            )
            body.angular_velocity = body.angular_velocity + h * (
                inv_i @ (body.external_torque - gyro)
            )

        t0 = time.perf_counter()
        state = SolverState.from_bodies(self.bodies)
        for actor in self.actors:
            actor.fill_solver_state(self, state)
        rows, report_pairs = self._collect_contacts(params)
        constraints = ContactConstraints.build(rows, state, h, params.bias_factor)
        t1 = time.perf_counter()

        constraints.position_sweeps(state, params.pos_iterations)
        state.write_back(self.bodies)

        for body in self.bodies:
            if body.is_static or body.driven_by_chain:
                continue
            com = body.com_world() + h * body.linear_velocity
            body.quaternion = quat_integrate(body.quaternion, body.angular_velocity, h)
            body.set_com_world(com)
        for actor in self.actors:
            actor.after_position_solve(self, state, h)

        constraints.velocity_sweeps(state, params.vel_iterations)
        state.write_back(self.bodies)
        for actor in self.actors:
            actor.after_velocity_solve(self, state, h)
        t2 = time.perf_counter()

        report.contact_handling_time += t1 - t0
        report.solve_time += t2 - t1
        for pair, candidates, patches in report_pairs:
            report.contacts_before += len(candidates)
            report.contacts_after += sum(len(p) for p in patches)
            report.patches += len(patches)
        report.pair_debug = report_pairs
        if len(constraints):
            report.max_penetration = max(report.max_penetration, float(np.max(np.maximum(constraints.depth, 0.0))))
        wrenches = constraints.body_wrenches(len(self.bodies), h)
        if report.body_wrenches is None:
            report.body_wrenches = wrenches
        else:
            report.body_wrenches += wrenches

    # -- contact collection -----------------------------------------------------

    def _collect_contacts(self, params: SolverParams):
        rows: list[dict] = []
        debug: list[tuple[tuple[int, int], ContactSet, list[ContactPatch]]] = []
        boxes = []
        for body in self.bodies:
            if body.mesh is None:
                continue
            boxes.append((body.world_aabb(), body.body_id))
        if len(boxes) < 2:
            return rows, debug

        # Broadphase margin must cover the largest speculative distance.
        max_voxel = max(
            (b.grid.voxel_size for b in self.bodies if b.grid is not None), default=0.0
        )
        margin = params.contact_distance or 2.0 * max_voxel or 1e-3
        pairs = broadphase_pairs(boxes, margin)

        for id_a, id_b in pairs:
            body_a = self.bodies[id_a]
            body_b = self.bodies[id_b]
            if frozenset((id_a, id_b)) in self.exclusions:
                continue
            if (body_a.is_static or body_a.driven_by_chain) and (
                body_b.is_static or body_b.driven_by_chain
            ):
                continue
            pairing = assign_roles(
                BodyShape(id_a, len(body_a.mesh), body_a.sdf_enabled),
                BodyShape(id_b, len(body_b.mesh), body_b.sdf_enabled),
            )
            if pairing.fallback and (id_a, id_b) not in self.fallback_pairs_seen:
                self.fallback_pairs_seen.add((id_a, id_b))
            sdf_body = self.bodies[pairing.sdf_body]
            mesh_body = self.bodies[pairing.mesh_body]
            grid = sdf_body.ensure_grid(self.default_sdf_spec, self.sdf_cache_dir)
            contact_distance = params.contact_distance or 2.0 * grid.voxel_size
            slop = (
                params.penetration_slop
                if params.penetration_slop is not None
                else 0.5 * grid.voxel_size
            )
            candidates = generate_contacts(
                pairing, grid, mesh_body.mesh, sdf_body.pose(), mesh_body.pose(), contact_distance
            )
            reduction = ReductionParams(
                max_patches=self.reduction_params.max_patches,
                per_patch_cap=self.reduction_params.per_patch_cap,
                normal_cone_cos=self.reduction_params.normal_cone_cos,
                min_depth=(
                    self.reduction_params.min_depth
                    if self.reduction_params.min_depth is not None
                    else -contact_distance
                ),
                batch_size=self.reduction_params.batch_size,
            )
            patches = reduce_contacts(candidates, reduction)
            debug.append(((pairing.sdf_body, pairing.mesh_body), candidates, patches))

            mu = float(np.sqrt(sdf_body.friction * mesh_body.friction))
            e = max(sdf_body.restitution, mesh_body.restitution)
            for patch in patches:
                for k in range(len(patch)):
                    rows.append(
                        {
                            "body_a": pairing.sdf_body,
                            "body_b": pairing.mesh_body,
                            "point": patch.points[k],
                            "normal": patch.normals[k],
                            "depth": float(patch.depths[k]),
                            "mu": mu,
                            "restitution": e,
                            "slop": slop,
                        }
                    )
        return rows, debug


def step(scene: Scene, params: SolverParams | None = None) -> StepReport:
    return scene.step(params)
