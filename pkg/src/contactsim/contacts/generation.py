"""Role assignment and per-triangle contact generation."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteStateError
from ..geometry.mesh import TriMesh
from ..math3d import Transform
from ..sdf.grid import SignedDistanceGrid
from . import _kernels
from .types import CollisionPairing, ContactSet

log = logging.getLogger(__name__)

MAX_MINIMIZE_ITERS = 12
CONVERGENCE_TOL_VOXELS = 0.1


@dataclass(frozen=True)
class BodyShape:
    """What assign_roles needs to know about a body."""

    body_id: int
    triangle_count: int
    sdf_enabled: bool


def assign_roles(body_a: BodyShape, body_b: BodyShape) -> CollisionPairing:
    """Pick which body of a pair is sampled as an SDF.

    Both opted in: the body with more triangles becomes the SDF (ties break
    to the lower body id). One opted in: that body. Neither: fallback pairing
    with the larger body as SDF anyway, marked so callers can log it.
    """
    fallback = not (body_a.sdf_enabled or body_b.sdf_enabled)
    if body_a.sdf_enabled and not body_b.sdf_enabled:
        sdf, mesh = body_a, body_b
    elif body_b.sdf_enabled and not body_a.sdf_enabled:
        sdf, mesh = body_b, body_a
    else:
        if body_a.triangle_count > body_b.triangle_count:
            sdf, mesh = body_a, body_b
        elif body_b.triangle_count > body_a.triangle_count:
            sdf, mesh = body_b, body_a
        else:
            sdf, mesh = (body_a, body_b) if body_a.body_id < body_b.body_id else (body_b, body_a)
    return CollisionPairing(sdf_body=sdf.body_id, mesh_body=mesh.body_id, fallback=fallback)


def generate_contacts(
    pairing: CollisionPairing,
    grid: SignedDistanceGrid,
    mesh: TriMesh,
    sdf_pose: Transform,
    mesh_pose: Transform,
    contact_distance: float,
) -> ContactSet:
    """At most one contact per mesh face whose SDF minimum is within
    contact_distance; depth = -phi, normal = normalized SDF gradient in world."""
    if contact_distance < 0.0:
        raise ValueError("contact_distance must be non-negative")
    for pose in (sdf_pose, mesh_pose):
        if not (np.all(np.isfinite(pose.rotation)) and np.all(np.isfinite(pose.translation))):
            raise NonFiniteStateError("non-finite pose in contact generation")

    to_grid = sdf_pose.inverse().compose(mesh_pose)
    verts_grid = to_grid.apply(mesh.vertices)
    tri_verts = np.ascontiguousarray(verts_grid[mesh.triangles])

    # Cull faces whose AABB cannot reach the SDF surface band.
    lo, hi = grid.mesh_aabb
    margin = contact_distance + 2.0 * grid.voxel_size
    face_lo = tri_verts.min(axis=1)
    face_hi = tri_verts.max(axis=1)
    near = np.all(face_lo <= hi + margin, axis=1) & np.all(face_hi >= lo - margin, axis=1)
    face_ids = np.nonzero(near)[0]
    if len(face_ids) == 0:
        return ContactSet.empty(pairing.sdf_body, pairing.mesh_body)
    subset = np.ascontiguousarray(tri_verts[face_ids])

    n = len(face_ids)
    out_point = np.empty((n, 3), dtype=np.float64)
    out_phi = np.empty(n, dtype=np.float64)
    out_grad = np.empty((n, 3), dtype=np.float64)
    out_found = np.zeros(n, dtype=np.uint8)
    nx, ny, nz = grid.dims
    _kernels.face_contacts(
        grid.values, nx, ny, nz, grid.origin[0], grid.origin[1], grid.origin[2],
        grid.voxel_size, subset, contact_distance, MAX_MINIMIZE_ITERS,
        CONVERGENCE_TOL_VOXELS * grid.voxel_size,
        out_point, out_phi, out_grad, out_found,
    )

    hit = out_found.astype(bool)
    if not np.any(hit):
        return ContactSet.empty(pairing.sdf_body, pairing.mesh_body)
    points_grid = out_point[hit]
    grads = out_grad[hit]
    norms = np.linalg.norm(grads, axis=1)
    degenerate = norms < 1e-12
    if np.any(degenerate):
        log.debug("contact normal fallback (+Z) on %d faces", int(degenerate.sum()))
        grads[degenerate] = (0.0, 0.0, 1.0)
        norms[degenerate] = 1.0
    normals_world = (grads / norms[:, None]) @ sdf_pose.rotation.T
    points_world = sdf_pose.apply(points_grid)
    return ContactSet(
        points_world, normals_world, -out_phi[hit], face_ids[hit],
        pairing.sdf_body, pairing.mesh_body,
    )
