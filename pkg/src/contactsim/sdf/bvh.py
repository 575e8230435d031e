"""Median-split AABB tree over triangles, flattened to arrays for numba traversal."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF_SIZE = 4


@dataclass
class TriangleBvh:
    node_lo: np.ndarray  # (n, 3)
    node_hi: np.ndarray
    node_left: np.ndarray  # int32; -1 marks a leaf
    node_right: np.ndarray  # internal: right child; leaf: start into tri_order
    node_count: np.ndarray  # leaf triangle count
    tri_order: np.ndarray  # permutation of triangle indices
    tri_verts: np.ndarray  # (m, 3, 3) float64


def build_bvh(tri_verts: np.ndarray) -> TriangleBvh:
    tri_verts = np.ascontiguousarray(tri_verts, dtype=np.float64)
    m = len(tri_verts)
    tri_lo = tri_verts.min(axis=1)
    tri_hi = tri_verts.max(axis=1)
    centroids = tri_verts.mean(axis=1)

    order = np.arange(m, dtype=np.int64)
    node_lo: list[np.ndarray] = []
    node_hi: list[np.ndarray] = []
    node_left: list[int] = []
    node_right: list[int] = []
    node_count: list[int] = []

    def new_node() -> int:
        node_lo.append(np.zeros(3))
        node_hi.append(np.zeros(3))
        node_left.append(-1)
        node_right.append(0)
        node_count.append(0)
        return len(node_lo) - 1

    root = new_node()
    stack: list[tuple[int, int, int]] = [(root, 0, m)]
    while stack:
        node, start, end = stack.pop()
        seg = order[start:end]
        node_lo[node] = tri_lo[seg].min(axis=0)
        node_hi[node] = tri_hi[seg].max(axis=0)
        if end - start <= LEAF_SIZE:
            node_left[node] = -1
            node_right[node] = start
            node_count[node] = end - start
            continue
        cen = centroids[seg]
        axis = int(np.argmax(cen.max(axis=0) - cen.min(axis=0)))
        mid = (end - start) // 2
        part = np.argpartition(cen[:, axis], mid, kind="introselect")
        order[start:end] = seg[part]
        left = new_node()
        right = new_node()
        node_left[node] = left
        node_right[node] = right
        stack.append((left, start, start + mid))
        stack.append((right, start + mid, end))

    return TriangleBvh(
        node_lo=np.ascontiguousarray(node_lo, dtype=np.float64),
        node_hi=np.ascontiguousarray(node_hi, dtype=np.float64),
        node_left=np.array(node_left, dtype=np.int32),
        node_right=np.array(node_right, dtype=np.int32),
        node_count=np.array(node_count, dtype=np.int32),
        tri_order=np.ascontiguousarray(order, dtype=np.int64),
        tri_verts=tri_verts,
    )
