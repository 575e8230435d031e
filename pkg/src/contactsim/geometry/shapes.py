"""Procedural watertight primitives: boxes, icospheres, cylinders, toruses,
and the cylindrical-heightfield lathe used by the fastener generators.

The lathe meshes any solid whose boundary radius is a single-valued function
r(theta, z) (star-shaped about the z axis) from a list of z-stations. Two
stations may share the same z to form an annular step, provided their radii
differ everywhere. Annular solids (nut bodies, hole blocks) take separate
inner and outer station lists that agree at the bottom and top z.
"""

from __future__ import annotations

import numpy as np

from .mesh import TriMesh

Rows = list[tuple[float, np.ndarray]]  # (z, radius per theta sample)


# ---------------------------------------------------------------------------
# Lathe machinery
# ---------------------------------------------------------------------------


def _ring_positions(thetas: np.ndarray, z: float, radii: np.ndarray) -> np.ndarray:
    return np.column_stack([radii * np.cos(thetas), radii * np.sin(thetas), np.full_like(thetas, z)])


def _band(ring_a: np.ndarray, ring_b: np.ndarray, m: int, flip: bool) -> list[tuple[int, int, int]]:
    """Triangles between two rings of m vertices (index arrays), wrapped in theta."""
    tris = []
    for j in range(m):
        k = (j + 1) % m
        v00, v01 = ring_a[j], ring_a[k]
        v10, v11 = ring_b[j], ring_b[k]
        if flip:
            tris.append((v00, v11, v01))
            tris.append((v00, v10, v11))
        else:
            tris.append((v00, v01, v11))
            tris.append((v00, v11, v10))
    return tris


def revolve_solid(thetas: np.ndarray, rows: Rows) -> TriMesh:
    """Solid of revolution-like heightfield r(theta, z) with fan caps."""
    m = len(thetas)
    verts: list[np.ndarray] = []
    rings: list[np.ndarray] = []
    for z, radii in rows:
        base = sum(len(v) for v in verts)
        verts.append(_ring_positions(thetas, z, np.asarray(radii, dtype=float)))
        rings.append(np.arange(base, base + m))
    bottom_center = sum(len(v) for v in verts)
    verts.append(np.array([[0.0, 0.0, rows[0][0]]]))
    top_center = bottom_center + 1
    verts.append(np.array([[0.0, 0.0, rows[-1][0]]]))

    tris: list[tuple[int, int, int]] = []
    for i in range(len(rings) - 1):
        tris.extend(_band(rings[i], rings[i + 1], m, flip=False))
    for j in range(m):
        k = (j + 1) % m
        tris.append((bottom_center, rings[0][k], rings[0][j]))
        tris.append((top_center, rings[-1][j], rings[-1][k]))
    return TriMesh(np.vstack(verts), np.array(tris, dtype=np.int32))


def annular_solid(thetas: np.ndarray, inner_rows: Rows, outer_rows: Rows) -> TriMesh:
    """Solid between an inner heightfield surface and an outer one.

    Inner and outer stations must share their first and last z values so the
    flat cap bands close the solid.
    """
    if not (
        np.isclose(inner_rows[0][0], outer_rows[0][0])
        and np.isclose(inner_rows[-1][0], outer_rows[-1][0])
    ):
        raise ValueError("inner and outer stations must agree at bottom and top z")
    m = len(thetas)
    verts: list[np.ndarray] = []
    inner_rings: list[np.ndarray] = []
    outer_rings: list[np.ndarray] = []
    for rows, rings in ((inner_rows, inner_rings), (outer_rows, outer_rings)):
        for z, radii in rows:
            base = sum(len(v) for v in verts)
            verts.append(_ring_positions(thetas, z, np.asarray(radii, dtype=float)))
            rings.append(np.arange(base, base + m))

    tris: list[tuple[int, int, int]] = []
    for i in range(len(inner_rings) - 1):
        tris.extend(_band(inner_rings[i], inner_rings[i + 1], m, flip=True))
    for i in range(len(outer_rings) - 1):
        tris.extend(_band(outer_rings[i], outer_rings[i + 1], m, flip=False))
    ib, ob = inner_rings[0], outer_rings[0]
    it, ot = inner_rings[-1], outer_rings[-1]
    for j in range(m):
        k = (j + 1) % m
        tris.append((ib[j], ob[k], ob[j]))
        tris.append((ib[j], ib[k], ob[k]))
        tris.append((it[j], ot[j], ot[k]))
        tris.append((it[j], ot[k], it[k]))
    return TriMesh(np.vstack(verts), np.array(tris, dtype=np.int32))


def polygon_radius(thetas: np.ndarray, width_across_flats: float, sides: int) -> np.ndarray:
    """Radius function of a regular polygon with a flat centered at theta = 0."""
    half = np.pi / sides
    local = np.mod(thetas + half, 2.0 * half) - half
    return (width_across_flats / 2.0) / np.cos(local)


def thetas_with_corners(segments: int, sides: int | None = None) -> np.ndarray:
    """Uniform theta samples, with exact polygon corner angles inserted."""
    base = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    if sides is None:
        return base
    half = np.pi / sides
    corners = half + np.arange(sides) * 2.0 * half
    merged = np.concatenate([base, corners])
    merged = np.unique(np.round(merged, 12))
    return merged[merged < 2.0 * np.pi - 1e-12]


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------


def make_box(extents, subdivisions: int = 1, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Axis-aligned box with each face split into subdivisions^2 quads."""
    e = np.asarray(extents, dtype=float)
    n = max(1, int(subdivisions))
    vert_index: dict[tuple[int, int, int], int] = {}
    verts: list[np.ndarray] = []

    def vid(i: int, j: int, k: int) -> int:
        key = (i, j, k)
        if key not in vert_index:
            vert_index[key] = len(verts)
            verts.append(np.array([i, j, k], dtype=float) / n * e - e / 2.0 + center)
        return vert_index[key]

    tris: list[tuple[int, int, int]] = []

    def face(origin, du, dv):
        # Quad grid over one face; winding chosen so normals point outward.
        for a in range(n):
            for b in range(n):
                p00 = vid(*(origin + a * du + b * dv))
                p10 = vid(*(origin + (a + 1) * du + b * dv))
                p11 = vid(*(origin + (a + 1) * du + (b + 1) * dv))
                p01 = vid(*(origin + a * du + (b + 1) * dv))
                tris.append((p00, p10, p11))
                tris.append((p00, p11, p01))

    o = np.array
    face(o([0, 0, 0]), o([0, 1, 0]), o([1, 0, 0]))  # -z
    face(o([0, 0, n]), o([1, 0, 0]), o([0, 1, 0]))  # +z
    face(o([0, 0, 0]), o([1, 0, 0]), o([0, 0, 1]))  # -y
    face(o([0, n, 0]), o([0, 0, 1]), o([1, 0, 0]))  # +y
    face(o([0, 0, 0]), o([0, 0, 1]), o([0, 1, 0]))  # -x
    face(o([n, 0, 0]), o([0, 1, 0]), o([0, 0, 1]))  # +x
    return TriMesh(np.array(verts), np.array(tris, dtype=np.int32))


def make_icosphere(radius: float, subdivisions: int = 2, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Subdivided icosahedron in polar orientation (vertices exactly at +/-z poles)."""
    lat = np.arctan(0.5)
    upper = [
        (np.cos(lat) * np.cos(a), np.cos(lat) * np.sin(a), np.sin(lat))
        for a in np.arange(5) * (2 * np.pi / 5)
    ]
    lower = [
        (np.cos(lat) * np.cos(a), np.cos(lat) * np.sin(a), -np.sin(lat))
        for a in (np.arange(5) + 0.5) * (2 * np.pi / 5)
    ]
    verts = [np.array([0.0, 0.0, 1.0])] + [np.array(p) for p in upper] + [np.array(p) for p in lower]
    verts.append(np.array([0.0, 0.0, -1.0]))
    tris: list[tuple[int, int, int]] = []
    for i in range(5):
        j = (i + 1) % 5
        tris.append((0, 1 + i, 1 + j))
        tris.append((1 + i, 6 + i, 1 + j))
        tris.append((1 + j, 6 + i, 6 + j))
        tris.append((11, 6 + j, 6 + i))

    for _ in range(max(0, int(subdivisions))):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in cache:
                p = verts[a] + verts[b]
                verts.append(p / np.linalg.norm(p))
                cache[key] = len(verts) - 1
            return cache[key]

        new_tris: list[tuple[int, int, int]] = []
        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_tris += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        tris = new_tris

    points = np.array(verts) * radius + np.asarray(center, dtype=float)
    return TriMesh(points, np.array(tris, dtype=np.int32))


def make_cylinder(radius: float, length: float, segments: int = 32, z_rows: int = 2) -> TriMesh:
    """Closed cylinder from z=0 to z=length."""
    thetas = thetas_with_corners(segments)
    zs = np.linspace(0.0, length, max(2, z_rows))
    r = np.full(len(thetas), radius)
    return revolve_solid(thetas, [(float(z), r) for z in zs])


def make_torus(major_radius: float, minor_radius: float, major_segments: int = 64, minor_segments: int = 48) -> TriMesh:
    """Watertight torus around the z axis."""
    nu, nv = major_segments, minor_segments
    u = np.linspace(0.0, 2 * np.pi, nu, endpoint=False)
    v = np.linspace(0.0, 2 * np.pi, nv, endpoint=False)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    x = (major_radius + minor_radius * np.cos(vv)) * np.cos(uu)
    y = (major_radius + minor_radius * np.cos(vv)) * np.sin(uu)
    z = minor_radius * np.sin(vv)
    verts = np.column_stack([x.ravel(), y.ravel(), z.ravel()])
    tris = []
    for i in range(nu):
        for j in range(nv):
            a = i * nv + j
            b = i * nv + (j + 1) % nv
            c = ((i + 1) % nu) * nv + (j + 1) % nv
            d = ((i + 1) % nu) * nv + j
            tris.append((a, d, c))
            tris.append((a, c, b))
    return TriMesh(verts, np.array(tris, dtype=np.int32))
