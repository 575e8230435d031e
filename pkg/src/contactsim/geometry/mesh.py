"""Indexed triangle meshes: validation, watertightness, OBJ round-trip.

Vertices are float64 meters; triangles are int32 vertex-index triples.
Meshes are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import io

import numpy as np

from ..errors import MeshValidationError, ObjParseError


class TriMesh:
    """Indexed triangle surface with derived per-face unit normals.

    Raises MeshValidationError for out-of-range indices, degenerate
    triangles (repeated vertex indices), non-finite coordinates, or
    zero-area faces.
    """

    __slots__ = ("vertices", "triangles", "face_normals", "_watertight", "_aabb")

    def __init__(self, vertices: np.ndarray, triangles: np.ndarray):
        vertices = np.ascontiguousarray(np.asarray(vertices, dtype=np.float64).reshape(-1, 3))
        triangles = np.ascontiguousarray(np.asarray(triangles, dtype=np.int32).reshape(-1, 3))
        if not np.all(np.isfinite(vertices)):
            raise MeshValidationError("non-finite vertex coordinate")
        if triangles.size and (triangles.min() < 0 or triangles.max() >= len(vertices)):
            raise MeshValidationError(
                f"triangle index out of range (have {len(vertices)} vertices)"
            )
        if triangles.size:
            a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
            if np.any((a == b) | (b == c) | (a == c)):
                raise MeshValidationError("triangle with repeated vertex indices")
        self.vertices = vertices
        self.triangles = triangles
        self.face_normals = self._compute_normals()
        self.vertices.flags.writeable = False
        self.triangles.flags.writeable = False
        self.face_normals.flags.writeable = False
        self._watertight: bool | None = None
        self._aabb: tuple[np.ndarray, np.ndarray] | None = None

    def _compute_normals(self) -> np.ndarray:
        tri = self.vertices[self.triangles]
        n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        lengths = np.linalg.norm(n, axis=1)
        if np.any(lengths <= 0.0):
            bad = int(np.argmin(lengths))
            raise MeshValidationError(f"zero-area face at triangle {bad}")
        return n / lengths[:, None]

    def __len__(self) -> int:
        return len(self.triangles)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        if self._aabb is None:
            self._aabb = (self.vertices.min(axis=0), self.vertices.max(axis=0))
        return self._aabb

    def triangle_corners(self) -> np.ndarray:
        """(n, 3, 3) array of triangle corner positions."""
        return self.vertices[self.triangles]

    def is_watertight(self) -> bool:
        """Every undirected edge shared by exactly 2 triangles, once per direction."""
        if self._watertight is None:
            self._watertight = self._check_watertight()
        return self._watertight

    def _check_watertight(self) -> bool:
        if len(self.triangles) == 0:
            return False
        t = self.triangles.astype(np.int64)
        edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        key = edges[:, 0] * len(self.vertices) + edges[:, 1]
        if len(np.unique(key)) != len(key):
            return False  # duplicated directed edge: non-manifold or inconsistent winding
        rev = edges[:, 1] * len(self.vertices) + edges[:, 0]
        return bool(np.all(np.isin(key, rev, assume_unique=False)))

    def require_watertight(self, what: str) -> None:
        if not self.is_watertight():
            raise MeshValidationError(f"{what} requires a watertight mesh")

    def translated(self, offset: np.ndarray) -> "TriMesh":
        return TriMesh(self.vertices + np.asarray(offset, dtype=float), self.triangles)

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "TriMesh":
        return TriMesh(self.vertices @ np.asarray(rotation).T + translation, self.triangles)

    def merged(self, other: "TriMesh") -> "TriMesh":
        verts = np.vstack([self.vertices, other.vertices])
        tris = np.vstack([self.triangles, other.triangles + len(self.vertices)])
        return TriMesh(verts, tris)

    def content_digest(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(self.vertices.tobytes())
        h.update(self.triangles.tobytes())
        return h.hexdigest()[:24]


def load_obj(text: str) -> TriMesh:
    """Parse a Wavefront OBJ string: positions and faces only, other directives ignored.

    Quads and larger polygons are fan-triangulated. Malformed indices,
    non-finite coordinates, and zero-area faces are rejected with the
    offending line number.
    """
    vertices: list[list[float]] = []
    faces: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise ObjParseError("vertex with fewer than 3 coordinates", lineno)
            try:
                coords = [float(x) for x in parts[1:4]]
            except ValueError:
                raise ObjParseError(f"malformed vertex coordinate {parts[1:4]}", lineno) from None
            if not all(np.isfinite(coords)):
                raise ObjParseError("non-finite vertex coordinate", lineno)
            vertices.append(coords)
        elif tag == "f":
            if len(parts) < 4:
                raise ObjParseError("face with fewer than 3 vertices", lineno)
            idx = []
            for token in parts[1:]:
                head = token.split("/", 1)[0]
                try:
                    i = int(head)
                except ValueError:
                    raise ObjParseError(f"malformed face index {token!r}", lineno) from None
                if i < 0:
                    i = len(vertices) + i  # negative indices are relative to current count
                else:
                    i = i - 1
                if i < 0 or i >= len(vertices):
                    raise ObjParseError(f"index out of range: {token}", lineno)
                idx.append(i)
            for k in range(1, len(idx) - 1):
                faces.append((idx[0], idx[k], idx[k + 1]))
        # vn/vt/usemtl/o/g/s/mtllib are ignored
    try:
        return TriMesh(np.array(vertices, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int32).reshape(-1, 3))
    except MeshValidationError as exc:
        raise ObjParseError(str(exc), 0) from exc


def export_obj(mesh: TriMesh, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    for v in mesh.vertices:
        buf.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
    for t in mesh.triangles:
        buf.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
    return buf.getvalue()
