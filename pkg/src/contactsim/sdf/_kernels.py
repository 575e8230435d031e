"""Numba kernels for SDF generation and sampling.

Grid values are a flat float32 array in x-fastest order:
index = ix + nx * (iy + ny * iz). All kernel-side geometry is float64.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

BIG = 1e30


# ---------------------------------------------------------------------------
# Point-triangle distance (Ericson, Real-Time Collision Detection)
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def closest_point_on_triangle(ax, ay, az, bx, by, bz, cx, cy, cz, px, py, pz):
    abx, aby, abz = bx - ax, by - ay, bz - az
    acx, acy, acz = cx - ax, cy - ay, cz - az
    apx, apy, apz = px - ax, py - ay, pz - az

    d1 = abx * apx + aby * apy + abz * apz
    d2 = acx * apx + acy * apy + acz * apz
    if d1 <= 0.0 and d2 <= 0.0:
        return ax, ay, az

    bpx, bpy, bpz = px - bx, py - by, pz - bz
    d3 = abx * bpx + aby * bpy + abz * bpz
    d4 = acx * bpx + acy * bpy + acz * bpz
    if d3 >= 0.0 and d4 <= d3:
        return bx, by, bz

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return ax + v * abx, ay + v * aby, az + v * abz

    cpx, cpy, cpz = px - cx, py - cy, pz - cz
    d5 = abx * cpx + aby * cpy + abz * cpz
    d6 = acx * cpx + acy * cpy + acz * cpz
    if d6 >= 0.0 and d5 <= d6:
        return cx, cy, cz

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return ax + w * acx, ay + w * acy, az + w * acz

    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return bx + w * (cx - bx), by + w * (cy - by), bz + w * (cz - bz)

    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return ax + abx * v + acx * w, ay + aby * v + acy * w, az + abz * v + acz * w


@njit(cache=True, inline="always")
def point_triangle_sqdist(tri_verts, t, px, py, pz):
    qx, qy, qz = closest_point_on_triangle(
        tri_verts[t, 0, 0], tri_verts[t, 0, 1], tri_verts[t, 0, 2],
        tri_verts[t, 1, 0], tri_verts[t, 1, 1], tri_verts[t, 1, 2],
        tri_verts[t, 2, 0], tri_verts[t, 2, 1], tri_verts[t, 2, 2],
        px, py, pz,
    )
    dx, dy, dz = px - qx, py - qy, pz - qz
    return dx * dx + dy * dy + dz * dz


# ---------------------------------------------------------------------------
# BVH traversal
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _aabb_sqdist(lo, hi, n, px, py, pz):
    d = 0.0
    v = lo[n, 0] - px
    if v > 0.0:
        d += v * v
    v = px - hi[n, 0]
    if v > 0.0:
        d += v * v
    v = lo[n, 1] - py
    if v > 0.0:
        d += v * v
    v = py - hi[n, 1]
    if v > 0.0:
        d += v * v
    v = lo[n, 2] - pz
    if v > 0.0:
        d += v * v
    v = pz - hi[n, 2]
    if v > 0.0:
        d += v * v
    return d


@njit(cache=True)
def bvh_sq_distance(node_lo, node_hi, node_left, node_right, node_count, tri_order, tri_verts, px, py, pz, best_sq):
    """Squared distance from a point to the nearest triangle, branch and bound."""
    stack = np.empty(128, dtype=np.int64)
    top = 0
    stack[top] = 0
    top += 1
    while top > 0:
        top -= 1
        n = stack[top]
        if _aabb_sqdist(node_lo, node_hi, n, px, py, pz) >= best_sq:
            continue
        left = node_left[n]
        if left < 0:  # leaf
            start = node_right[n]
            for k in range(node_count[n]):
                t = tri_order[start + k]
                dsq = point_triangle_sqdist(tri_verts, t, px, py, pz)
                if dsq < best_sq:
                    best_sq = dsq
        else:
            right = node_right[n]
            dl = _aabb_sqdist(node_lo, node_hi, left, px, py, pz)
            dr = _aabb_sqdist(node_lo, node_hi, right, px, py, pz)
            if dl < dr:  # visit nearer child first
                stack[top] = right
                top += 1
                stack[top] = left
                top += 1
            else:
                stack[top] = left
                top += 1
                stack[top] = right
                top += 1
    return best_sq


@njit(cache=True, parallel=True)
def unsigned_distance_grid(
    out, nx, ny, nz, ox, oy, oz, voxel,
    node_lo, node_hi, node_left, node_right, node_count, tri_order, tri_verts,
):
    total = nx * ny * nz
    for idx in prange(total):
        iz = idx // (nx * ny)
        rem = idx - iz * (nx * ny)
        iy = rem // nx
        ix = rem - iy * nx
        px = ox + ix * voxel
        py = oy + iy * voxel
        pz = oz + iz * voxel
        out[idx] = np.sqrt(
            bvh_sq_distance(
                node_lo, node_hi, node_left, node_right, node_count, tri_order, tri_verts,
                px, py, pz, BIG,
            )
        )


# ---------------------------------------------------------------------------
# Sign via ray-parity voting
# ---------------------------------------------------------------------------


@njit(cache=True)
def _count_or_fill_crossings(
    tri_u, tri_v, tri_w, nu, nv, ou, ov, voxel, nudge_u, nudge_v,
    counts, offsets, cross_w, fill,
):
    """Per-column ray/triangle crossings along the w axis.

    fill == 0: accumulate counts per (u, v) column.
    fill == 1: write crossing w values using offsets as running cursors.
    """
    n_tris = tri_u.shape[0]
    for t in range(n_tris):
        au, bu, cu = tri_u[t, 0], tri_u[t, 1], tri_u[t, 2]
        av, bv, cv = tri_v[t, 0], tri_v[t, 1], tri_v[t, 2]
        aw, bw, cw = tri_w[t, 0], tri_w[t, 1], tri_w[t, 2]
        # Projected normal component along w (twice signed area in (u, v)).
        area = (bu - au) * (cv - av) - (bv - av) * (cu - au)
        if area == 0.0:
            continue
        min_u = min(au, min(bu, cu))
        max_u = max(au, max(bu, cu))
        min_v = min(av, min(bv, cv))
        max_v = max(av, max(bv, cv))
        iu0 = max(0, int(np.ceil((min_u - ou - nudge_u) / voxel)))
        iu1 = min(nu - 1, int(np.floor((max_u - ou - nudge_u) / voxel)))
        iv0 = max(0, int(np.ceil((min_v - ov - nudge_v) / voxel)))
        iv1 = min(nv - 1, int(np.floor((max_v - ov - nudge_v) / voxel)))
        for iu in range(iu0, iu1 + 1):
            pu = ou + iu * voxel + nudge_u
            for iv in range(iv0, iv1 + 1):
                pv = ov + iv * voxel + nudge_v
                e0 = (bu - au) * (pv - av) - (bv - av) * (pu - au)
                e1 = (cu - bu) * (pv - bv) - (cv - bv) * (pu - bu)
                e2 = (au - cu) * (pv - cv) - (av - cv) * (pu - cu)
                inside = (e0 > 0.0 and e1 > 0.0 and e2 > 0.0) or (
                    e0 < 0.0 and e1 < 0.0 and e2 < 0.0
                )
                if not inside:
                    continue
                # Barycentric interpolation of w at (pu, pv).
                wa = e1 / area
                wb = e2 / area
                wc = 1.0 - wa - wb
                w_cross = wa * aw + wb * bw + wc * cw
                col = iu * nv + iv
                if fill == 0:
                    counts[col] += 1
                else:
                    cross_w[offsets[col]] = w_cross
                    offsets[col] += 1


@njit(cache=True, parallel=True)
def _vote_columns(votes, starts, counts, cross_w, nu, nv, nw, ow, voxel, su, sv, sw):
    for col in prange(nu * nv):
        iu = col // nv
        iv = col - iu * nv
        start = starts[col]
        cnt = counts[col]
        # insertion sort of this column's crossings
        for i in range(start + 1, start + cnt):
            key = cross_w[i]
            j = i - 1
            while j >= start and cross_w[j] > key:
                cross_w[j + 1] = cross_w[j]
                j -= 1
            cross_w[j + 1] = key
        k = 0
        for iw in range(nw):
            w = ow + iw * voxel
            while k < cnt and cross_w[start + k] < w:
                k += 1
            node = iu * su + iv * sv + iw * sw
            if k % 2 == 1:
                votes[node] -= 1  # odd parity: inside
            else:
                votes[node] += 1


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def trilinear(values, nx, ny, nz, gx, gy, gz):
    """Trilinear interpolation at clamped grid coordinates."""
    x0 = int(np.floor(gx))
    y0 = int(np.floor(gy))
    z0 = int(np.floor(gz))
    if x0 < 0:
        x0 = 0
    if x0 > nx - 2:
        x0 = nx - 2
    if y0 < 0:
        y0 = 0
    if y0 > ny - 2:
        y0 = ny - 2
    if z0 < 0:
        z0 = 0
    if z0 > nz - 2:
        z0 = nz - 2
    fx = gx - x0
    fy = gy - y0
    fz = gz - z0
    base = x0 + nx * (y0 + ny * z0)
    sx = 1
    sy = nx
    sz = nx * ny
    c000 = values[base]
    c100 = values[base + sx]
    c010 = values[base + sy]
    c110 = values[base + sx + sy]
    c001 = values[base + sz]
    c101 = values[base + sx + sz]
    c011 = values[base + sy + sz]
    c111 = values[base + sx + sy + sz]
    c00 = c000 * (1.0 - fx) + c100 * fx
    c10 = c010 * (1.0 - fx) + c110 * fx
    c01 = c001 * (1.0 - fx) + c101 * fx
    c11 = c011 * (1.0 - fx) + c111 * fx
    c0 = c00 * (1.0 - fy) + c10 * fy
    c1 = c01 * (1.0 - fy) + c11 * fy
    return c0 * (1.0 - fz) + c1 * fz


@njit(cache=True, inline="always")
def sample_point(values, nx, ny, nz, ox, oy, oz, voxel, px, py, pz):
    """Distance at a grid-frame point; outside the grid, the AABB distance is
    added to the clamped boundary sample (conservative positive lower bound)."""
    gx = (px - ox) / voxel
    gy = (py - oy) / voxel
    gz = (pz - oz) / voxel
    cx = min(max(gx, 0.0), nx - 1.0)
    cy = min(max(gy, 0.0), ny - 1.0)
    cz = min(max(gz, 0.0), nz - 1.0)
    dx = gx - cx
    dy = gy - cy
    dz = gz - cz
    outside = np.sqrt(dx * dx + dy * dy + dz * dz) * voxel
    return trilinear(values, nx, ny, nz, cx, cy, cz) + outside


@njit(cache=True, inline="always")
def gradient_point(values, nx, ny, nz, ox, oy, oz, voxel, px, py, pz):
    """Central-difference gradient with step = voxel_size, unnormalized."""
    gx = (
        sample_point(values, nx, ny, nz, ox, oy, oz, voxel, px + voxel, py, pz)
        - sample_point(values, nx, ny, nz, ox, oy, oz, voxel, px - voxel, py, pz)
    ) / (2.0 * voxel)
    gy = (
        sample_point(values, nx, ny, nz, ox, oy, oz, voxel, px, py + voxel, pz)
        - sample_point(values, nx, ny, nz, ox, oy, oz, voxel, px, py - voxel, pz)
    ) / (2.0 * voxel)
    gz = (
        sample_point(values, nx, ny, nz, ox, oy, oz, voxel, px, py, pz + voxel)
        - sample_point(values, nx, ny, nz, ox, oy, oz, voxel, px, py, pz - voxel)
    ) / (2.0 * voxel)
    return gx, gy, gz


@njit(cache=True, parallel=True)
def sample_batch(values, nx, ny, nz, ox, oy, oz, voxel, points, out):
    for i in prange(points.shape[0]):
        out[i] = sample_point(
            values, nx, ny, nz, ox, oy, oz, voxel, points[i, 0], points[i, 1], points[i, 2]
        )


@njit(cache=True, parallel=True)
def gradient_batch(values, nx, ny, nz, ox, oy, oz, voxel, points, out):
    for i in prange(points.shape[0]):
        gx, gy, gz = gradient_point(
            values, nx, ny, nz, ox, oy, oz, voxel, points[i, 0], points[i, 1], points[i, 2]
        )
        out[i, 0] = gx
        out[i, 1] = gy
        out[i, 2] = gz
