"""Gauss-Seidel sequential-impulse sweep kernel.

Bodies are represented by a 6-vector twist (linear; angular) at a per-body
reference point and a 6x6 inverse mobility matrix W. Free bodies have
W = diag(1/m I, I_world^-1) about the COM; chain-welded bodies carry the
chain's task-space mobility J M^-1 J^T at the end effector; static bodies
have W = 0. One code path covers all of them.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _apply_impulse(w_mat, vel, imp, body, jx, jy, jz, rx, ry, rz, sign):
    # generalized impulse [j; r x j]
    gx = jx * sign
    gy = jy * sign
    gz = jz * sign
    tx = (ry * jz - rz * jy) * sign
    ty = (rz * jx - rx * jz) * sign
    tz = (rx * jy - ry * jx) * sign
    for k in range(6):
        vel[body, k] += (
            w_mat[body, k, 0] * gx
            + w_mat[body, k, 1] * gy
            + w_mat[body, k, 2] * gz
            + w_mat[body, k, 3] * tx
            + w_mat[body, k, 4] * ty
            + w_mat[body, k, 5] * tz
        )
    imp[body, 0] += gx
    imp[body, 1] += gy
    imp[body, 2] += gz
    imp[body, 3] += tx
    imp[body, 4] += ty
    imp[body, 5] += tz


@njit(cache=True, inline="always")
def _rel_velocity_along(vel, ia, ib, ra, rb, c, dx, dy, dz):
    # (v_b + w_b x r_b - v_a - w_a x r_a) . d
    ub_x = vel[ib, 0] + vel[ib, 4] * rb[c, 2] - vel[ib, 5] * rb[c, 1]
    ub_y = vel[ib, 1] + vel[ib, 5] * rb[c, 0] - vel[ib, 3] * rb[c, 2]
    ub_z = vel[ib, 2] + vel[ib, 3] * rb[c, 1] - vel[ib, 4] * rb[c, 0]
    ua_x = vel[ia, 0] + vel[ia, 4] * ra[c, 2] - vel[ia, 5] * ra[c, 1]
    ua_y = vel[ia, 1] + vel[ia, 5] * ra[c, 0] - vel[ia, 3] * ra[c, 2]
    ua_z = vel[ia, 2] + vel[ia, 3] * ra[c, 1] - vel[ia, 4] * ra[c, 0]
    return (ub_x - ua_x) * dx + (ub_y - ua_y) * dy + (ub_z - ua_z) * dz


@njit(cache=True)
def gauss_seidel_sweeps(
    iters,
    w_mat,  # (nb, 6, 6)
    vel,  # (nb, 6) in/out
    imp,  # (nb, 6) accumulated generalized impulse, in/out
    body_a, body_b,  # (m,)
    ra, rb,  # (m, 3) contact offsets from each body's reference point
    nrm, tan1, tan2,  # (m, 3)
    kn, kt1, kt2,  # (m,) effective masses (0 disables the row)
    target_vn,  # (m,) desired normal velocity floor
    mu,  # (m,)
    lam_n, lam_t1, lam_t2,  # (m,) accumulators, in/out
    with_friction,
):
    m = body_a.shape[0]
    for _ in range(iters):
        for c in range(m):
            ia = body_a[c]
            ib = body_b[c]
            nx_, ny_, nz_ = nrm[c, 0], nrm[c, 1], nrm[c, 2]
            if kn[c] > 0.0:
                vn = _rel_velocity_along(vel, ia, ib, ra, rb, c, nx_, ny_, nz_)
                dl = kn[c] * (target_vn[c] - vn)
                new_l = lam_n[c] + dl
                if new_l < 0.0:
                    new_l = 0.0
                dl = new_l - lam_n[c]
                lam_n[c] = new_l
                if dl != 0.0:
                    _apply_impulse(w_mat, vel, imp, ib, dl * nx_, dl * ny_, dl * nz_, rb[c, 0], rb[c, 1], rb[c, 2], 1.0)
                    _apply_impulse(w_mat, vel, imp, ia, dl * nx_, dl * ny_, dl * nz_, ra[c, 0], ra[c, 1], ra[c, 2], -1.0)

            if with_friction and mu[c] > 0.0 and lam_n[c] > 0.0:
                t1x, t1y, t1z = tan1[c, 0], tan1[c, 1], tan1[c, 2]
                t2x, t2y, t2z = tan2[c, 0], tan2[c, 1], tan2[c, 2]
                d1 = 0.0
                d2 = 0.0
                if kt1[c] > 0.0:
                    vt1 = _rel_velocity_along(vel, ia, ib, ra, rb, c, t1x, t1y, t1z)
                    d1 = -kt1[c] * vt1
                if kt2[c] > 0.0:
                    vt2 = _rel_velocity_along(vel, ia, ib, ra, rb, c, t2x, t2y, t2z)
                    d2 = -kt2[c] * vt2
                new1 = lam_t1[c] + d1
                new2 = lam_t2[c] + d2
                limit = mu[c] * lam_n[c]
                mag = np.sqrt(new1 * new1 + new2 * new2)
                if mag > limit:
                    scale = limit / mag
                    new1 *= scale
                    new2 *= scale
                d1 = new1 - lam_t1[c]
                d2 = new2 - lam_t2[c]
                lam_t1[c] = new1
                lam_t2[c] = new2
                if d1 != 0.0 or d2 != 0.0:
                    jx = d1 * t1x + d2 * t2x
                    jy = d1 * t1y + d2 * t2y
                    jz = d1 * t1z + d2 * t2z
                    _apply_impulse(w_mat, vel, imp, ib, jx, jy, jz, rb[c, 0], rb[c, 1], rb[c, 2], 1.0)
                    _apply_impulse(w_mat, vel, imp, ia, jx, jy, jz, ra[c, 0], ra[c, 1], ra[c, 2], -1.0)
