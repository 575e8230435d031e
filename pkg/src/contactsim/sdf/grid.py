"""Dense voxel signed distance grids: generation, lookup, gradients, file I/O.

Sign convention: negative strictly inside the watertight surface, positive
outside. Values are stored as a flat float32 array in x-fastest order
(index = ix + nx * (iy + ny * iz)) in the mesh's body frame.
"""

from __future__ import annotations

import logging
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import MeshValidationError
from ..math3d import Transform
from ..geometry.mesh import TriMesh
from . import _kernels
from .bvh import build_bvh

log = logging.getLogger(__name__)

MAGIC = b"CSIMSDF1"
MAX_VOXELS = 1_000_000_000
CACHE_ENV_VAR = "CONTACTSIM_SDF_CACHE"

# Sub-voxel ray origin offsets; they keep grid lines off mesh vertices/edges
# so the parity test stays transversal.
_NUDGE_U = 2.0954e-4
_NUDGE_V = 3.1416e-4


@dataclass(frozen=True)
class SdfResolutionSpec:
    resolution: int = 128  # voxels along the longest (padded) AABB dimension
    padding_voxels: int = 4

    def __post_init__(self):
        if self.resolution < 16:
            raise ValueError("resolution must be at least 16")
        if self.padding_voxels < 1:
            raise ValueError("padding_voxels must be at least 1")


class SignedDistanceGrid:
    """Immutable voxel grid of signed distances with trilinear lookup."""

    __slots__ = ("origin", "voxel_size", "dims", "values", "mesh_aabb")

    def __init__(self, origin, voxel_size: float, dims, values: np.ndarray, mesh_aabb):
        self.origin = np.asarray(origin, dtype=np.float64)
        self.voxel_size = float(voxel_size)
        self.dims = tuple(int(d) for d in dims)
        if any(d < 2 for d in self.dims):
            raise ValueError("grid dims must be at least 2 per axis")
        if self.voxel_size <= 0.0:
            raise ValueError("voxel_size must be positive")
        self.values = np.ascontiguousarray(values, dtype=np.float32).reshape(-1)
        if len(self.values) != self.dims[0] * self.dims[1] * self.dims[2]:
            raise ValueError("values length does not match dims")
        self.values.flags.writeable = False
        self.mesh_aabb = (
            np.asarray(mesh_aabb[0], dtype=np.float64),
            np.asarray(mesh_aabb[1], dtype=np.float64),
        )

    # -- lookups ------------------------------------------------------------

    def _to_grid_frame(self, points: np.ndarray, pose: Transform | None) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pose is not None:
            points = pose.inverse().apply(points)
        return np.ascontiguousarray(points)

    def sample(self, points, pose: Transform | None = None):
        """Signed distance at world points; `pose` is the grid body's world pose.

        Inside the grid: trilinear interpolation of the 8 surrounding nodes.
        Outside: distance to the grid AABB plus the boundary sample.
        """
        pts = self._to_grid_frame(points, pose)
        out = np.empty(len(pts), dtype=np.float64)
        nx, ny, nz = self.dims
        _kernels.sample_batch(
            self.values, nx, ny, nz, self.origin[0], self.origin[1], self.origin[2],
            self.voxel_size, pts, out,
        )
        return out[0] if np.asarray(points).ndim == 1 else out

    def gradient(self, points, pose: Transform | None = None, normalize: bool = True):
        """Central-difference gradient (step = voxel size), in world axes.

        Zero-magnitude raw gradients (medial axis) fall back to +Z in the
        grid frame; the occurrence is logged at debug level.
        """
        single = np.asarray(points).ndim == 1
        pts = self._to_grid_frame(points, pose)
        out = np.empty((len(pts), 3), dtype=np.float64)
        nx, ny, nz = self.dims
        _kernels.gradient_batch(
            self.values, nx, ny, nz, self.origin[0], self.origin[1], self.origin[2],
            self.voxel_size, pts, out,
        )
        if normalize:
            norms = np.linalg.norm(out, axis=1)
            degenerate = norms < 1e-12
            if np.any(degenerate):
                log.debug("gradient fallback (+Z) at %d medial-axis points", int(degenerate.sum()))
                out[degenerate] = (0.0, 0.0, 1.0)
                norms[degenerate] = 1.0
            out /= norms[:, None]
        if pose is not None:
            out = out @ pose.rotation.T
        return out[0] if single else out

    def node_points(self) -> np.ndarray:
        nx, ny, nz = self.dims
        ix, iy, iz = np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij")
        pts = np.column_stack([ix.ravel(), iy.ravel(), iz.ravel()]).astype(np.float64)
        return pts * self.voxel_size + self.origin

    def aabb_world(self, pose: Transform | None = None) -> tuple[np.ndarray, np.ndarray]:
        lo = self.origin
        hi = self.origin + (np.array(self.dims) - 1) * self.voxel_size
        if pose is None:
            return lo, hi
        corners = np.array(
            [[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])]
        )
        world = pose.apply(corners)
        return world.min(axis=0), world.max(axis=0)

    # -- serialization --------------------------------------------------------

    def save(self, path: str | Path) -> None:
        header = struct.pack(
            "<8s3i d 3d 6d",
            MAGIC,
            *self.dims,
            self.voxel_size,
            *self.origin,
            *self.mesh_aabb[0],
            *self.mesh_aabb[1],
        )
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(self.values.astype("<f4").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "SignedDistanceGrid":
        with open(path, "rb") as fh:
            head = fh.read(struct.calcsize("<8s3i d 3d 6d"))
            magic, nx, ny, nz, voxel, ox, oy, oz, *aabb = struct.unpack("<8s3i d 3d 6d", head)
            if magic != MAGIC:
                raise ValueError(f"not an SDF grid file: {path}")
            values = np.frombuffer(fh.read(nx * ny * nz * 4), dtype="<f4")
        return cls((ox, oy, oz), voxel, (nx, ny, nz), values, (aabb[:3], aabb[3:]))


def generate_sdf(mesh: TriMesh, spec: SdfResolutionSpec = SdfResolutionSpec()) -> SignedDistanceGrid:
    """Sample a dense SDF over the mesh AABB inflated by the spec's padding.

    Each node stores the exact distance to the nearest triangle, signed by a
    majority vote of ray-parity tests along the three grid axes.
    """
    mesh.require_watertight("generate_sdf")
    lo, hi = mesh.aabb()
    extent = hi - lo
    max_extent = float(extent.max())
    if max_extent <= 0.0:
        raise MeshValidationError("degenerate mesh AABB")

    interior_cells = spec.resolution - 1 - 2 * spec.padding_voxels
    if interior_cells < 1:
        raise ValueError("resolution too small for the requested padding")
    voxel = max_extent / interior_cells

    dims = np.empty(3, dtype=np.int64)
    origin = np.empty(3)
    for axis in range(3):
        n_cells = int(np.ceil(extent[axis] / voxel - 1e-9))
        n_cells = max(n_cells, 1)
        slack = n_cells * voxel - extent[axis]
        dims[axis] = n_cells + 1 + 2 * spec.padding_voxels
        origin[axis] = lo[axis] - spec.padding_voxels * voxel - slack / 2.0
    if int(dims.prod()) > MAX_VOXELS:
        raise MeshValidationError(
            f"SDF grid of {dims.prod()} voxels exceeds the {MAX_VOXELS} guard"
        )

    bvh = build_bvh(mesh.triangle_corners())
    nx, ny, nz = (int(d) for d in dims)
    unsigned = np.empty(nx * ny * nz, dtype=np.float64)
    _kernels.unsigned_distance_grid(
        unsigned, nx, ny, nz, origin[0], origin[1], origin[2], voxel,
        bvh.node_lo, bvh.node_hi, bvh.node_left, bvh.node_right, bvh.node_count,
        bvh.tri_order, bvh.tri_verts,
    )

    votes = _parity_votes(bvh.tri_verts, dims, origin, voxel)
    signs = np.where(votes > 0, 1.0, -1.0)
    return SignedDistanceGrid(origin, voxel, dims, (unsigned * signs).astype(np.float32), (lo, hi))


def _parity_votes(tri_verts: np.ndarray, dims, origin, voxel: float) -> np.ndarray:
    """Inside/outside votes per node from rays along x, y, and z."""
    nx, ny, nz = (int(d) for d in dims)
    votes = np.zeros(nx * ny * nz, dtype=np.int64)
    sx, sy, sz = 1, nx, nx * ny
    # (u, v, w) per ray axis w; strides map column-local indices to flat nodes.
    setups = (
        ((1, 2, 0), (ny, nz, nx), (sy, sz, sx)),  # rays along x
        ((2, 0, 1), (nz, nx, ny), (sz, sx, sy)),  # rays along y
        ((0, 1, 2), (nx, ny, nz), (sx, sy, sz)),  # rays along z
    )
    for perm, (nu, nv, nw), (su, sv, sw) in setups:
        tri_u = np.ascontiguousarray(tri_verts[:, :, perm[0]])
        tri_v = np.ascontiguousarray(tri_verts[:, :, perm[1]])
        tri_w = np.ascontiguousarray(tri_verts[:, :, perm[2]])
        ou, ov, ow = origin[perm[0]], origin[perm[1]], origin[perm[2]]
        counts = np.zeros(nu * nv, dtype=np.int64)
        empty = np.empty(0, dtype=np.float64)
        _kernels._count_or_fill_crossings(
            tri_u, tri_v, tri_w, nu, nv, ou, ov, voxel,
            _NUDGE_U * voxel, _NUDGE_V * voxel, counts, counts, empty, 0,
        )
        starts = np.zeros(nu * nv, dtype=np.int64)
        np.cumsum(counts[:-1], out=starts[1:])
        cross_w = np.empty(int(counts.sum()), dtype=np.float64)
        cursors = starts.copy()
        _kernels._count_or_fill_crossings(
            tri_u, tri_v, tri_w, nu, nv, ou, ov, voxel,
            _NUDGE_U * voxel, _NUDGE_V * voxel, counts, cursors, cross_w, 1,
        )
        _kernels._vote_columns(votes, starts, counts, cross_w, nu, nv, nw, ow, voxel, su, sv, sw)
    return votes


# ---------------------------------------------------------------------------
# Grid cache
# ---------------------------------------------------------------------------


def cached_sdf(mesh: TriMesh, spec: SdfResolutionSpec, cache_dir: str | Path | None = None) -> SignedDistanceGrid:
    """generate_sdf with an optional on-disk cache keyed by mesh content.

    The cache directory comes from the argument or the CONTACTSIM_SDF_CACHE
    environment variable; with neither set, grids are regenerated each call.
    """
    directory = cache_dir or os.environ.get(CACHE_ENV_VAR)
    if not directory:
        return generate_sdf(mesh, spec)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    key = f"{mesh.content_digest()}_r{spec.resolution}_p{spec.padding_voxels}.sdf"
    path = directory / key
    if path.exists():
        try:
            return SignedDistanceGrid.load(path)
        except (ValueError, OSError) as exc:
            log.warning("discarding unreadable SDF cache entry %s: %s", path, exc)
    grid = generate_sdf(mesh, spec)
    grid.save(path)
    return grid
