"""Numba kernel for per-triangle contact generation against an SDF grid."""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from ..sdf._kernels import closest_point_on_triangle, gradient_point, sample_point


@njit(cache=True, parallel=True)
def face_contacts(
    values, nx, ny, nz, ox, oy, oz, voxel,
    tri_verts,  # (m, 3, 3) in grid frame
    contact_distance, max_iters, tol,
    out_point, out_phi, out_grad, out_found,
):
    """One candidate per face: minimize the SDF over each triangle with
    projected gradient descent and backtracking-halved adaptive steps."""
    m = tri_verts.shape[0]
    for t in prange(m):
        ax, ay, az = tri_verts[t, 0, 0], tri_verts[t, 0, 1], tri_verts[t, 0, 2]
        bx, by, bz = tri_verts[t, 1, 0], tri_verts[t, 1, 1], tri_verts[t, 1, 2]
        cx, cy, cz = tri_verts[t, 2, 0], tri_verts[t, 2, 1], tri_verts[t, 2, 2]

        phi_a = sample_point(values, nx, ny, nz, ox, oy, oz, voxel, ax, ay, az)
        phi_b = sample_point(values, nx, ny, nz, ox, oy, oz, voxel, bx, by, bz)
        phi_c = sample_point(values, nx, ny, nz, ox, oy, oz, voxel, cx, cy, cz)

        # Lipschitz prune: the SDF cannot drop faster than distance travelled.
        e0 = np.sqrt((bx - ax) ** 2 + (by - ay) ** 2 + (bz - az) ** 2)
        e1 = np.sqrt((cx - bx) ** 2 + (cy - by) ** 2 + (cz - bz) ** 2)
        e2 = np.sqrt((ax - cx) ** 2 + (ay - cy) ** 2 + (az - cz) ** 2)
        diam = max(e0, max(e1, e2))
        phi_min = min(phi_a, min(phi_b, phi_c))
        if phi_min - diam > contact_distance:
            out_found[t] = 0
            continue

        gx_c = (ax + bx + cx) / 3.0
        gy_c = (ay + by + cy) / 3.0
        gz_c = (az + bz + cz) / 3.0
        phi_cen = sample_point(values, nx, ny, nz, ox, oy, oz, voxel, gx_c, gy_c, gz_c)

        # Start from the best of the three vertices and the centroid.
        px, py, pz, phi = gx_c, gy_c, gz_c, phi_cen
        if phi_a < phi:
            px, py, pz, phi = ax, ay, az, phi_a
        if phi_b < phi:
            px, py, pz, phi = bx, by, bz, phi_b
        if phi_c < phi:
            px, py, pz, phi = cx, cy, cz, phi_c

        alpha = voxel
        for _ in range(max_iters):
            grx, gry, grz = gradient_point(values, nx, ny, nz, ox, oy, oz, voxel, px, py, pz)
            gnorm = np.sqrt(grx * grx + gry * gry + grz * grz)
            if gnorm < 1e-12:
                break
            grx /= gnorm
            gry /= gnorm
            grz /= gnorm
            moved = 0.0
            for _bt in range(4):
                qx, qy, qz = closest_point_on_triangle(
                    ax, ay, az, bx, by, bz, cx, cy, cz,
                    px - alpha * grx, py - alpha * gry, pz - alpha * grz,
                )
                phi_new = sample_point(values, nx, ny, nz, ox, oy, oz, voxel, qx, qy, qz)
                if phi_new < phi:
                    moved = np.sqrt((qx - px) ** 2 + (qy - py) ** 2 + (qz - pz) ** 2)
                    px, py, pz, phi = qx, qy, qz, phi_new
                    alpha = min(alpha * 1.5, 4.0 * voxel)
                    break
                alpha *= 0.5
            if moved < tol:
                break

        out_point[t, 0] = px
        out_point[t, 1] = py
        out_point[t, 2] = pz
        out_phi[t] = phi
        grx, gry, grz = gradient_point(values, nx, ny, nz, ox, oy, oz, voxel, px, py, pz)
        out_grad[t, 0] = grx
        out_grad[t, 1] = gry
        out_grad[t, 2] = grz
        out_found[t] = 1 if phi <= contact_distance else 0
