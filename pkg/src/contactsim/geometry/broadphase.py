"""Broadphase pair finding over margin-inflated AABBs.

Pairwise testing below 64 bodies, sweep-and-prune along x above. Both paths
return the identical pair set: every unordered id pair whose inflated boxes
overlap, reported once, sorted by (id_a, id_b).
"""

from __future__ import annotations

import numpy as np

SWEEP_THRESHOLD = 64

Aabb = tuple[np.ndarray, np.ndarray]


def aabb_of_points(points: np.ndarray) -> Aabb:
    return points.min(axis=0), points.max(axis=0)


def aabb_overlap(lo_a, hi_a, lo_b, hi_b) -> bool:
    return bool(np.all(lo_a <= hi_b) and np.all(lo_b <= hi_a))


def broadphase_pairs(bodies: list[tuple[Aabb, int]], margin: float = 0.0) -> list[tuple[int, int]]:
    n = len(bodies)
    if n < 2:
        return []
    lo = np.array([np.asarray(aabb[0], dtype=float) for aabb, _ in bodies]) - margin
    hi = np.array([np.asarray(aabb[1], dtype=float) for aabb, _ in bodies]) + margin
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("non-finite AABB in broadphase input")
    ids = [body_id for _, body_id in bodies]

    if n <= SWEEP_THRESHOLD:
        hits = _all_pairs(lo, hi)
    else:
        hits = _sweep_and_prune(lo, hi)

    pairs = sorted(tuple(sorted((ids[i], ids[j]))) for i, j in hits)
    return pairs


def _all_pairs(lo: np.ndarray, hi: np.ndarray) -> list[tuple[int, int]]:
    overlap = np.all(
        (lo[:, None, :] <= hi[None, :, :]) & (lo[None, :, :] <= hi[:, None, :]), axis=2
    )
    i, j = np.nonzero(np.triu(overlap, k=1))
    return list(zip(i.tolist(), j.tolist()))


def _sweep_and_prune(lo: np.ndarray, hi: np.ndarray) -> list[tuple[int, int]]:
    order = np.argsort(lo[:, 0], kind="stable")
    hits: list[tuple[int, int]] = []
    active: list[int] = []
    for idx in order:
        x_min = lo[idx, 0]
        active = [k for k in active if hi[k, 0] >= x_min]
        for k in active:
            if (
                lo[idx, 1] <= hi[k, 1]
                and lo[k, 1] <= hi[idx, 1]
                and lo[idx, 2] <= hi[k, 2]
                and lo[k, 2] <= hi[idx, 2]
            ):
                hits.append((min(idx, k), max(idx, k)))
        active.append(int(idx))
    return hits
