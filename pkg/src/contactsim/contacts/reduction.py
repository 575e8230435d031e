"""Contact-patch reduction and the equivalent-system verification utility.

Candidates are processed in fixed-size batches. Each batch is first assigned
to existing patches by normal similarity; the remainder repeatedly seeds a
new patch at the deepest unassigned candidate, absorbs similar-normal
candidates into it, and adds it to the patch list. Adding merges into an
existing similar-normal patch or, at the patch cap, replaces the
lowest-priority patch, where priority favors penetration depth then hull
area. Within a patch, at most per_patch_cap contacts are kept: the deepest
plus extremal points of the member hull.

Every absorbed candidate contributes its depth-weighted normal impulse to
the patch aggregates, so a reduced patch list always carries the net force
and torque of the full candidate set it came from.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import nnls

from ..math3d import tangent_basis
from .types import ContactPatch, ContactSet, ReductionParams

MERGE_COS = float(np.cos(np.radians(5.0)))


class _PatchBuilder:
    __slots__ = ("normal", "members", "max_depth", "deepest_member")

    def __init__(self, normal: np.ndarray):
        self.normal = normal
        self.members: list[int] = []
        self.max_depth = -np.inf
        self.deepest_member = -1

    def absorb(self, indices, depths) -> None:
        for i, d in zip(indices, depths):
            self.members.append(int(i))
            if d > self.max_depth:
                self.max_depth = float(d)
                self.deepest_member = int(i)


def reduce_contacts(candidates: ContactSet, params: ReductionParams | None = None) -> list[ContactPatch]:
    params = params or ReductionParams()
    if len(candidates) == 0:
        return []
    depths = candidates.depths
    keep = np.ones(len(candidates), dtype=bool)
    if params.min_depth is not None:
        keep = depths >= params.min_depth
    order = np.nonzero(keep)[0]
    if len(order) == 0:
        return []

    normals = candidates.normals
    builders: list[_PatchBuilder] = []

    for start in range(0, len(order), params.batch_size):
        batch = order[start : start + params.batch_size]
        unassigned = _assign_to_existing(batch, normals, depths, builders, params)
        while len(unassigned) > 0:
            deepest_pos = int(np.argmax(depths[unassigned]))
            seed = int(unassigned[deepest_pos])
            seed_normal = normals[seed]
            cos = normals[unassigned] @ seed_normal
            in_bin = cos >= params.normal_cone_cos
            in_bin[deepest_pos] = True
            patch = _PatchBuilder(seed_normal.copy())
            patch.absorb(unassigned[in_bin], depths[unassigned[in_bin]])
            unassigned = unassigned[~in_bin]
            _add_patch(patch, builders, candidates, params)

    return [_finalize(b, candidates, params) for b in builders]


def _assign_to_existing(batch, normals, depths, builders, params) -> np.ndarray:
    if not builders:
        return batch
    reps = np.array([b.normal for b in builders])
    cos = normals[batch] @ reps.T
    best = np.argmax(cos, axis=1)
    best_cos = cos[np.arange(len(batch)), best]
    matched = best_cos >= params.normal_cone_cos
    for k in np.nonzero(matched)[0]:
        builders[best[k]].absorb([batch[k]], [depths[batch[k]]])
    return batch[~matched]


def _add_patch(patch: _PatchBuilder, builders: list[_PatchBuilder], candidates: ContactSet, params) -> None:
    if builders:
        reps = np.array([b.normal for b in builders])
        cos = reps @ patch.normal
        best = int(np.argmax(cos))
        similar = cos[best] >= params.normal_cone_cos
    else:
        best, similar = -1, False

    if similar and (cos[best] >= MERGE_COS or len(builders) >= params.max_patches):
        # Replace-or-merge: union the members, keep the deeper patch's normal.
        target = builders[best]
        if patch.max_depth > target.max_depth:
            target.normal = patch.normal
        target.absorb(patch.members, candidates.depths[patch.members])
        return
    if len(builders) < params.max_patches:
        builders.append(patch)
        return

    # At the cap with no similar patch: evict the lowest-priority patch,
    # never the one holding the globally deepest contact.
    global_max = max(b.max_depth for b in builders)
    scores = []
    for i, b in enumerate(builders):
        protected = b.max_depth >= global_max
        scores.append((0 if protected else 1, -b.max_depth, -_member_area(b, candidates), -i))
    victim = max(range(len(builders)), key=lambda i: scores[i])
    vb = builders[victim]
    if (patch.max_depth, _member_area_of(patch, candidates)) > (vb.max_depth, _member_area(vb, candidates)):
        # Fold the victim's members into its nearest-normal survivor so its
        # impulse weight is not lost, then take its slot.
        builders[victim] = patch
        _fold_members(vb, builders, victim, candidates)
    else:
        _fold_members(patch, builders, -1, candidates)


def _fold_members(patch: _PatchBuilder, builders: list[_PatchBuilder], skip: int, candidates: ContactSet) -> None:
    reps = np.array([b.normal for b in builders])
    cos = reps @ patch.normal
    if 0 <= skip < len(cos):
        cos[skip] = -np.inf
    target = builders[int(np.argmax(cos))]
    target.absorb(patch.members, candidates.depths[patch.members])


def _member_area(builder: _PatchBuilder, candidates: ContactSet) -> float:
    return _hull_area(candidates.points[builder.members], builder.normal)


def _member_area_of(patch: _PatchBuilder, candidates: ContactSet) -> float:
    return _hull_area(candidates.points[patch.members], patch.normal)


def _finalize(builder: _PatchBuilder, candidates: ContactSet, params: ReductionParams) -> ContactPatch:
    members = np.array(sorted(set(builder.members)), dtype=np.int64)
    pts = candidates.points[members]
    deps = candidates.depths[members]
    norms = candidates.normals[members]

    kept = _select_kept(pts, deps, builder.normal, params.per_patch_cap)
    weights = np.maximum(deps, 0.0)
    torque = np.cross(pts, norms) * weights[:, None]

    return ContactPatch(
        representative_normal=builder.normal.copy(),
        points=pts[kept],
        normals=norms[kept],
        depths=deps[kept],
        face_indices=candidates.face_indices[members][kept],
        member_indices=members,
        weight_sum=float(weights.sum()),
        weighted_point_sum=(pts * weights[:, None]).sum(axis=0),
        weighted_normal_sum=(norms * weights[:, None]).sum(axis=0),
        weighted_torque_sum=torque.sum(axis=0),
        area_metric=_hull_area(pts, builder.normal),
        max_depth=float(deps.max()),
    )


def _select_kept(points: np.ndarray, depths: np.ndarray, normal: np.ndarray, cap: int) -> np.ndarray:
    """Deepest contact plus extremal hull points.

    The hull is taken over the touching members when at least three exist,
    so the kept set spans the load-bearing region rather than speculative
    fringe contacts; remaining slots fill with the next-deepest members.
    """
    n = len(depths)
    if n <= cap:
        return np.arange(n)
    deepest = int(np.argmax(depths))
    touching = np.nonzero(depths >= 0.0)[0]
    base = touching if len(touching) >= 3 else np.arange(n)
    uv = _project_2d(points[base], normal)
    hull = [int(base[h]) for h in _monotone_hull(uv) if int(base[h]) != deepest]
    chosen = [deepest]
    if len(hull) <= cap - 1:
        chosen.extend(hull)
        extra = np.argsort(-depths, kind="stable")
        for e in extra:
            if len(chosen) >= cap:
                break
            if int(e) not in chosen:
                chosen.append(int(e))
    else:
        picks = np.linspace(0, len(hull), cap - 1, endpoint=False).astype(int)
        chosen.extend(hull[p] for p in picks)
    return np.array(chosen[:cap], dtype=np.int64)


def _project_2d(points: np.ndarray, normal: np.ndarray) -> np.ndarray:
    t1, t2 = tangent_basis(normal)
    return np.column_stack([points @ t1, points @ t2])


def _monotone_hull(uv: np.ndarray) -> list[int]:
    """Andrew's monotone chain; returns hull vertex indices in CCW order."""
    order = np.lexsort((uv[:, 1], uv[:, 0]))

    def cross(o, a, b):
        return (uv[a, 0] - uv[o, 0]) * (uv[b, 1] - uv[o, 1]) - (uv[a, 1] - uv[o, 1]) * (uv[b, 0] - uv[o, 0])

    lower: list[int] = []
    for i in order:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(int(i))
    upper: list[int] = []
    for i in order[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(int(i))
    return lower[:-1] + upper[:-1]


def _hull_area(points: np.ndarray, normal: np.ndarray) -> float:
    if len(points) < 3:
        return 0.0
    uv = _project_2d(points, normal)
    hull = _monotone_hull(uv)
    if len(hull) < 3:
        return 0.0
    poly = uv[hull]
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


# ---------------------------------------------------------------------------
# Equivalent-system verification
# ---------------------------------------------------------------------------


def patches_from_contacts(candidates: ContactSet) -> list[ContactPatch]:
    """Identity reduction: one single-contact patch per candidate."""
    out = []
    for i in range(len(candidates)):
        w = max(float(candidates.depths[i]), 0.0)
        p = candidates.points[i]
        n = candidates.normals[i]
        out.append(
            ContactPatch(
                representative_normal=n.copy(),
                points=p[None, :].copy(),
                normals=n[None, :].copy(),
                depths=candidates.depths[i : i + 1].copy(),
                face_indices=candidates.face_indices[i : i + 1].copy(),
                member_indices=np.array([i], dtype=np.int64),
                weight_sum=w,
                weighted_point_sum=w * p,
                weighted_normal_sum=w * n,
                weighted_torque_sum=w * np.cross(p, n),
                area_metric=0.0,
                max_depth=float(candidates.depths[i]),
            )
        )
    return out


def equivalent_system_check(
    candidates: ContactSet, patches: list[ContactPatch], reference_point
) -> tuple[float, float]:
    """Relative net-force and net-torque error of the reduced system.

    Each candidate carries a unit normal impulse weighted by its (clamped)
    depth. Patch impulses are rebalanced over the kept contacts by
    non-negative least squares against the patch's absorbed aggregates.
    When the candidate set's net force vanishes, the force error is
    absolute and the torque is taken about the weighted centroid.
    """
    ref = np.asarray(reference_point, dtype=np.float64)
    weights = np.maximum(candidates.depths, 0.0)
    force_full = (candidates.normals * weights[:, None]).sum(axis=0)
    weight_total = weights.sum()

    force_scale = np.linalg.norm(force_full)
    degenerate_force = force_scale < 1e-12 * max(weight_total, 1.0)
    if degenerate_force and weight_total > 0.0:
        ref = (candidates.points * weights[:, None]).sum(axis=0) / weight_total

    torque_full = (np.cross(candidates.points - ref, candidates.normals) * weights[:, None]).sum(axis=0)

    force_red = np.zeros(3)
    torque_red = np.zeros(3)
    for patch in patches:
        lam = _rebalanced_weights(patch, ref)
        force_red += lam @ patch.normals
        torque_red += lam @ np.cross(patch.points - ref, patch.normals)

    force_err = np.linalg.norm(force_red - force_full)
    if not degenerate_force:
        force_err /= force_scale
    torque_scale = np.linalg.norm(torque_full)
    torque_err = np.linalg.norm(torque_red - torque_full)
    if torque_scale > 1e-12 * max(weight_total, 1.0):
        torque_err /= torque_scale
    return float(force_err), float(torque_err)


def _rebalanced_weights(patch: ContactPatch, ref: np.ndarray) -> np.ndarray:
    k = len(patch)
    if k == 0 or patch.weight_sum <= 0.0:
        return np.zeros(k)
    target_force = patch.weighted_normal_sum
    target_torque = patch.weighted_torque_sum - np.cross(ref, target_force)
    arms = patch.points - ref
    scale = max(np.linalg.norm(arms, axis=1).max(), 1e-9)
    a = np.vstack([patch.normals.T, np.cross(arms, patch.normals).T / scale])
    b = np.concatenate([target_force, target_torque / scale])
    lam, _ = nnls(a, b)
    return lam


# ---------------------------------------------------------------------------
# Debug point-cloud dumps
# ---------------------------------------------------------------------------

POINTCLOUD_HEADER = "x,y,z,nx,ny,nz,depth,patch_id"


def candidates_csv(candidates: ContactSet, patches: list[ContactPatch]) -> str:
    assignment = np.full(len(candidates), -1, dtype=np.int64)
    for pid, patch in enumerate(patches):
        assignment[patch.member_indices] = pid
    lines = [POINTCLOUD_HEADER]
    for i in range(len(candidates)):
        p, n = candidates.points[i], candidates.normals[i]
        lines.append(
            f"{p[0]:.10g},{p[1]:.10g},{p[2]:.10g},{n[0]:.10g},{n[1]:.10g},{n[2]:.10g},"
            f"{candidates.depths[i]:.10g},{assignment[i]}"
        )
    return "\n".join(lines) + "\n"


def patches_csv(patches: list[ContactPatch]) -> str:
    lines = [POINTCLOUD_HEADER]
    for pid, patch in enumerate(patches):
        for i in range(len(patch)):
            p, n = patch.points[i], patch.normals[i]
            lines.append(
                f"{p[0]:.10g},{p[1]:.10g},{p[2]:.10g},{n[0]:.10g},{n[1]:.10g},{n[2]:.10g},"
                f"{patch.depths[i]:.10g},{pid}"
            )
    return "\n".join(lines) + "\n"
