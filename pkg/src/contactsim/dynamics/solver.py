"""Substepping contact solver: sequential impulses with accumulated clamping,
split into position-bias sweeps and residual-velocity sweeps.

Position sweeps target a Baumgarte pushout velocity of
bias_factor * max(depth - slop, 0) / h for penetrating contacts and allow
speculative contacts (depth < 0) to approach at up to gap / h, then positions
integrate with the corrected velocities. Velocity sweeps afterwards remove
residual approaching velocity, applying restitution on impact speeds above
the threshold. Constraints are solved in deterministic
(body_a, body_b, patch, contact) order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..math3d import tangent_basis
from . import _kernels

RESTITUTION_THRESHOLD = 0.5  # m/s; impacts slower than this take e = 0


@dataclass
class SolverParams:
    dt: float = 1.0 / 60.0
    substeps: int = 1
    pos_iterations: int = 16
    vel_iterations: int = 1
    penetration_slop: float | None = None  # None: 0.5 * voxel of the pair's grid
    bias_factor: float = 0.2
    contact_distance: float | None = None  # None: 2 * voxel of the pair's grid

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.substeps < 1:
            raise ValueError("substeps must be at least 1")
        if self.pos_iterations < 1:
            raise ValueError("pos_iterations must be at least 1")
        if self.vel_iterations < 0:
            raise ValueError("vel_iterations must be non-negative")


class SolverState:
    """Twist (at a reference point) + 6x6 inverse mobility per body."""

    def __init__(self, n_bodies: int):
        self.ref = np.zeros((n_bodies, 3))
        self.w_mat = np.zeros((n_bodies, 6, 6))
        self.vel = np.zeros((n_bodies, 6))
        self.impulse = np.zeros((n_bodies, 6))

    @classmethod
    def from_bodies(cls, bodies) -> "SolverState":
        state = cls(len(bodies))
        for i, body in enumerate(bodies):
            if body.is_static or body.driven_by_chain:
                continue  # zero mobility; chain actors fill theirs afterwards
            state.ref[i] = body.com_world()
            inv_m = body.inv_mass()
            state.w_mat[i, 0, 0] = state.w_mat[i, 1, 1] = state.w_mat[i, 2, 2] = inv_m
            state.w_mat[i, 3:, 3:] = body.inv_inertia_world()
            state.vel[i, :3] = body.linear_velocity
            state.vel[i, 3:] = body.angular_velocity
        return state

    def write_back(self, bodies) -> None:
        for i, body in enumerate(bodies):
            if body.is_static or body.driven_by_chain:
                continue
            body.linear_velocity = self.vel[i, :3].copy()
            body.angular_velocity = self.vel[i, 3:].copy()


class ContactConstraints:
    """Flattened contact rows for one substep, ready for the sweep kernel."""

    def __init__(self, n: int):
        self.body_a = np.zeros(n, dtype=np.int64)
        self.body_b = np.zeros(n, dtype=np.int64)
        self.point = np.zeros((n, 3))
        self.ra = np.zeros((n, 3))
        self.rb = np.zeros((n, 3))
        self.normal = np.zeros((n, 3))
        self.tan1 = np.zeros((n, 3))
        self.tan2 = np.zeros((n, 3))
        self.depth = np.zeros(n)
        self.kn = np.zeros(n)
        self.kt1 = np.zeros(n)
        self.kt2 = np.zeros(n)
        self.mu = np.zeros(n)
        self.restitution = np.zeros(n)
        self.bias_target = np.zeros(n)
        self.restitution_target = np.zeros(n)
        self.lam_n = np.zeros(n)
        self.lam_t1 = np.zeros(n)
        self.lam_t2 = np.zeros(n)
        self.lam_vel = np.zeros(n)

    def __len__(self) -> int:
        return len(self.depth)

    @classmethod
    def build(cls, rows: list[dict], state: SolverState, h: float, bias_factor: float) -> "ContactConstraints":
        """rows: dicts with body_a, body_b, point, normal, depth, mu,
        restitution, slop. Order is preserved and defines the sweep order."""
        con = cls(len(rows))
        for c, row in enumerate(rows):
            ia, ib = row["body_a"], row["body_b"]
            n = row["normal"]
            con.body_a[c] = ia
            con.body_b[c] = ib
            con.point[c] = row["point"]
            con.normal[c] = n
            con.depth[c] = row["depth"]
            con.mu[c] = row["mu"]
            con.restitution[c] = row["restitution"]
            con.ra[c] = row["point"] - state.ref[ia]
            con.rb[c] = row["point"] - state.ref[ib]
            t1, t2 = tangent_basis(n)
            con.tan1[c] = t1
            con.tan2[c] = t2
            for d, out in ((n, "kn"), (t1, "kt1"), (t2, "kt2")):
                ga = np.concatenate([d, np.cross(con.ra[c], d)])
                gb = np.concatenate([d, np.cross(con.rb[c], d)])
                k = ga @ state.w_mat[ia] @ ga + gb @ state.w_mat[ib] @ gb
                getattr(con, out)[c] = 1.0 / k if k > 1e-12 else 0.0

            depth = con.depth[c]
            slop = row["slop"]
            if depth > slop:
                con.bias_target[c] = bias_factor * (depth - slop) / h
            elif depth < 0.0:
                con.bias_target[c] = depth / h  # speculative: may close the gap, no more
            vn0 = _normal_velocity(state, con, c)
            v_impact = max(-vn0, 0.0)
            e = con.restitution[c] if v_impact > RESTITUTION_THRESHOLD else 0.0
            con.restitution_target[c] = e * v_impact
        return con

    def position_sweeps(self, state: SolverState, iterations: int) -> None:
        if len(self) == 0 or iterations == 0:
            return
        _kernels.gauss_seidel_sweeps(
            iterations, state.w_mat, state.vel, state.impulse,
            self.body_a, self.body_b, self.ra, self.rb,
            self.normal, self.tan1, self.tan2,
            self.kn, self.kt1, self.kt2,
            self.bias_target, self.mu,
            self.lam_n, self.lam_t1, self.lam_t2, True,
        )

    def velocity_sweeps(self, state: SolverState, iterations: int) -> None:
        if len(self) == 0 or iterations == 0:
            return
        _kernels.gauss_seidel_sweeps(
            iterations, state.w_mat, state.vel, state.impulse,
            self.body_a, self.body_b, self.ra, self.rb,
            self.normal, self.tan1, self.tan2,
            self.kn, self.kt1, self.kt2,
            self.restitution_target, self.mu,
            self.lam_vel, self.lam_t1, self.lam_t2, False,
        )

    def body_wrenches(self, n_bodies: int, h: float) -> np.ndarray:
        """(nb, 6) net contact force/torque per body over this substep."""
        out = np.zeros((n_bodies, 6))
        lam = self.lam_n + self.lam_vel
        for c in range(len(self)):
            j = lam[c] * self.normal[c] + self.lam_t1[c] * self.tan1[c] + self.lam_t2[c] * self.tan2[c]
            out[self.body_b[c], :3] += j / h
            out[self.body_b[c], 3:] += np.cross(self.rb[c], j) / h
            out[self.body_a[c], :3] -= j / h
            out[self.body_a[c], 3:] -= np.cross(self.ra[c], j) / h
        return out


def _normal_velocity(state: SolverState, con: ContactConstraints, c: int) -> float:
    ia, ib = con.body_a[c], con.body_b[c]
    ub = state.vel[ib, :3] + np.cross(state.vel[ib, 3:], con.rb[c])
    ua = state.vel[ia, :3] + np.cross(state.vel[ia, 3:], con.ra[c])
    return float((ub - ua) @ con.normal[c])


def solve_contact_sweep(constraints: ContactConstraints, state: SolverState) -> None:
    """One in-order position-phase sweep; exposed for unit-level verification."""
    constraints.position_sweeps(state, 1)
