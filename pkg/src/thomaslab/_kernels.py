"""Compiled inner loops (numba).

Everything here works on plain float scalars and small preallocated arrays so
the hot paths stay allocation-free.  All kernels are deterministic: fixed
iteration order, no threading inside a kernel, sequential reductions.

Status codes returned by the long-running kernels:

    STATUS_OK          run completed
    STATUS_NONFINITE   a state component stopped being finite at step i
    STATUS_DEGENERATE  a QR diagonal underflowed (tangent run only)
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_DEGENERATE = 2

_R_FLOOR = 1e-300


@njit(cache=True, nogil=True, inline="always")
def _vf(x, y, z, b):
    return math.sin(y) - b * x, math.sin(z) - b * y, math.sin(x) - b * z


@njit(cache=True, nogil=True, inline="always")
def rk4_step(x, y, z, b, h):
    k1x, k1y, k1z = _vf(x, y, z, b)
    k2x, k2y, k2z = _vf(x + 0.5 * h * k1x, y + 0.5 * h * k1y, z + 0.5 * h * k1z, b)
    k3x, k3y, k3z = _vf(x + 0.5 * h * k2x, y + 0.5 * h * k2y, z + 0.5 * h * k2z, b)
    k4x, k4y, k4z = _vf(x + h * k3x, y + h * k3y, z + h * k3z, b)
    s = h / 6.0
    return (x + s * (k1x + 2.0 * (k2x + k3x) + k4x),
            y + s * (k1y + 2.0 * (k2y + k3y) + k4y),
            z + s * (k1z + 2.0 * (k2z + k3z) + k4z))


@njit(cache=True, nogil=True)
def run_record(x, y, z, b, h, n_steps, skip_steps, rec_stride):
    """Integrate n_steps fixed RK4 steps, recording the state at steps
    skip_steps, skip_steps + rec_stride, ... (inclusive of skip_steps).
    Returns (states, fail_step); fail_step is -1 on success, else the first
    step index whose result is non-finite."""
    n_rec = (n_steps - skip_steps) // rec_stride + 1
    out = np.empty((n_rec, 3))
    j = 0
    if skip_steps == 0:
        out[0, 0] = x
        out[0, 1] = y
        out[0, 2] = z
        j = 1
    for i in range(1, n_steps + 1):
        x, y, z = rk4_step(x, y, z, b, h)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            return out[:j], i
        if i >= skip_steps and (i - skip_steps) % rec_stride == 0:
            out[j, 0] = x
            out[j, 1] = y
            out[j, 2] = z
            j += 1
    return out, -1


@njit(cache=True, nogil=True)
def run_final(x, y, z, b, h, n_steps):
    """Integrate n_steps and return only the final state plus fail_step."""
    for i in range(1, n_steps + 1):
        x, y, z = rk4_step(x, y, z, b, h)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            return x, y, z, i
    return x, y, z, -1


@njit(cache=True, nogil=True)
def batch_final(starts, b, h, n_steps):
    """run_final over a batch of starts. Returns (finals, fail_steps)."""
    n = starts.shape[0]
    finals = np.empty((n, 3))
    fails = np.empty(n, dtype=np.int64)
    for k in range(n):
        x, y, z, f = run_final(starts[k, 0], starts[k, 1], starts[k, 2], b, h, n_steps)
        finals[k, 0] = x
        finals[k, 1] = y
        finals[k, 2] = z
        fails[k] = f
    return finals, fails


@njit(cache=True, nogil=True, inline="always")
def _jmul(cx, cy, cz, b, v0, v1, v2):
    # Jacobian [[-b, cy, 0], [0, -b, cz], [cx, 0, -b]] times column (v0,v1,v2)
    return (-b * v0 + cy * v1, -b * v1 + cz * v2, cx * v0 - b * v2)


@njit(cache=True, nogil=True)
def tangent_run(x, y, z, b, h, skip_steps, n_blocks, renorm_every):
    """Benettin tangent integration.

    Skips skip_steps plain RK4 steps, seeds the tangent matrix with the
    identity, then advances state and tangent together for
    n_blocks * renorm_every steps.  The tangent matrix is re-orthonormalized
    by modified Gram-Schmidt every renorm_every steps; log of each (positive
    by construction) diagonal factor is stored per block.

    Returns (log_r[n_blocks, 3], final_state[3], status, status_step).
    """
    log_r = np.empty((n_blocks, 3))
    final = np.empty(3)
    for i in range(1, skip_steps + 1):
        x, y, z = rk4_step(x, y, z, b, h)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            final[0], final[1], final[2] = x, y, z
            return log_r[:0], final, STATUS_NONFINITE, i
    Y = np.eye(3)
    K1 = np.empty((3, 3))
    K2 = np.empty((3, 3))
    K3 = np.empty((3, 3))
    K4 = np.empty((3, 3))
    step = skip_steps
    for blk in range(n_blocks):
        for _ in range(renorm_every):
            step += 1
            # stage states of the underlying RK4 step
            k1x, k1y, k1z = _vf(x, y, z, b)
            x2, y2, z2 = x + 0.5 * h * k1x, y + 0.5 * h * k1y, z + 0.5 * h * k1z
            k2x, k2y, k2z = _vf(x2, y2, z2, b)
            x3, y3, z3 = x + 0.5 * h * k2x, y + 0.5 * h * k2y, z + 0.5 * h * k2z
            k3x, k3y, k3z = _vf(x3, y3, z3, b)
            x4, y4, z4 = x + h * k3x, y + h * k3y, z + h * k3z
            k4x, k4y, k4z = _vf(x4, y4, z4, b)
            # cosines entering the Jacobian at each stage state
            c1x, c1y, c1z = math.cos(x), math.cos(y), math.cos(z)
            c2x, c2y, c2z = math.cos(x2), math.cos(y2), math.cos(z2)
            c3x, c3y, c3z = math.cos(x3), math.cos(y3), math.cos(z3)
            c4x, c4y, c4z = math.cos(x4), math.cos(y4), math.cos(z4)
            for c in range(3):
                a0, a1, a2 = _jmul(c1x, c1y, c1z, b, Y[0, c], Y[1, c], Y[2, c])
                K1[0, c], K1[1, c], K1[2, c] = a0, a1, a2
            for c in range(3):
                v0 = Y[0, c] + 0.5 * h * K1[0, c]
                v1 = Y[1, c] + 0.5 * h * K1[1, c]
                v2 = Y[2, c] + 0.5 * h * K1[2, c]
                a0, a1, a2 = _jmul(c2x, c2y, c2z, b, v0, v1, v2)
                K2[0, c], K2[1, c], K2[2, c] = a0, a1, a2
            for c in range(3):
                v0 = Y[0, c] + 0.5 * h * K2[0, c]
                v1 = Y[1, c] + 0.5 * h * K2[1, c]
                v2 = Y[2, c] + 0.5 * h * K2[2, c]
                a0, a1, a2 = _jmul(c3x, c3y, c3z, b, v0, v1, v2)
                K3[0, c], K3[1, c], K3[2, c] = a0, a1, a2
            for c in range(3):
                v0 = Y[0, c] + h * K3[0, c]
                v1 = Y[1, c] + h * K3[1, c]
                v2 = Y[2, c] + h * K3[2, c]
                a0, a1, a2 = _jmul(c4x, c4y, c4z, b, v0, v1, v2)
                K4[0, c], K4[1, c], K4[2, c] = a0, a1, a2
            s6 = h / 6.0
            for r in range(3):
                for c in range(3):
                    Y[r, c] += s6 * (K1[r, c] + 2.0 * (K2[r, c] + K3[r, c]) + K4[r, c])
            x = x + s6 * (k1x + 2.0 * (k2x + k3x) + k4x)
            y = y + s6 * (k1y + 2.0 * (k2y + k3y) + k4y)
            z = z + s6 * (k1z + 2.0 * (k2z + k3z) + k4z)
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
                final[0], final[1], final[2] = x, y, z
                return log_r[:blk], final, STATUS_NONFINITE, step
        # modified Gram-Schmidt, diagonal positive by construction
        r00 = math.sqrt(Y[0, 0] ** 2 + Y[1, 0] ** 2 + Y[2, 0] ** 2)
        if r00 < _R_FLOOR:
            final[0], final[1], final[2] = x, y, z
            return log_r[:blk], final, STATUS_DEGENERATE, step
        q00, q10, q20 = Y[0, 0] / r00, Y[1, 0] / r00, Y[2, 0] / r00
        r01 = q00 * Y[0, 1] + q10 * Y[1, 1] + q20 * Y[2, 1]
        v0 = Y[0, 1] - r01 * q00
        v1 = Y[1, 1] - r01 * q10
        v2 = Y[2, 1] - r01 * q20
        r11 = math.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
        if r11 < _R_FLOOR:
            final[0], final[1], final[2] = x, y, z
            return log_r[:blk], final, STATUS_DEGENERATE, step
        q01, q11, q21 = v0 / r11, v1 / r11, v2 / r11
        r02 = q00 * Y[0, 2] + q10 * Y[1, 2] + q20 * Y[2, 2]
        r12 = q01 * Y[0, 2] + q11 * Y[1, 2] + q21 * Y[2, 2]
        w0 = Y[0, 2] - r02 * q00 - r12 * q01
        w1 = Y[1, 2] - r02 * q10 - r12 * q11
        w2 = Y[2, 2] - r02 * q20 - r12 * q21
        r22 = math.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
        if r22 < _R_FLOOR:
            final[0], final[1], final[2] = x, y, z
            return log_r[:blk], final, STATUS_DEGENERATE, step
        Y[0, 0], Y[1, 0], Y[2, 0] = q00, q10, q20
        Y[0, 1], Y[1, 1], Y[2, 1] = q01, q11, q21
        Y[0, 2], Y[1, 2], Y[2, 2] = w0 / r22, w1 / r22, w2 / r22
        log_r[blk, 0] = math.log(r00)
        log_r[blk, 1] = math.log(r11)
        log_r[blk, 2] = math.log(r22)
    final[0], final[1], final[2] = x, y, z
    return log_r, final, STATUS_OK, step


@njit(cache=True, nogil=True, inline="always")
def _gval(x, z, b):
    return math.sin(x) - b * z


@njit(cache=True, nogil=True)
def refine_crossing(x, y, z, b, h, g_tol):
    """Bisect the RK4 substep length tau in (0, h] so that the surface value
    g = sin(x) - b z at the substepped state satisfies |g| <= g_tol.

    (x, y, z) is the last pre-crossing sample. Returns (tau, xs, ys, zs, g)."""
    g0 = _gval(x, z, b)
    lo, hi = 0.0, h
    xs, ys, zs = rk4_step(x, y, z, b, h)
    g = _gval(xs, zs, b)
    tau = h
    for _ in range(200):
        if abs(g) <= g_tol or (hi - lo) < 1e-16:
            break
        mid = 0.5 * (lo + hi)
        xm, ym, zm = rk4_step(x, y, z, b, mid)
        gm = _gval(xm, zm, b)
        if (gm < 0.0) == (g0 < 0.0):
            lo = mid
        else:
            hi = mid
            xs, ys, zs, g, tau = xm, ym, zm, gm, mid
    return tau, xs, ys, zs, g


@njit(cache=True, nogil=True)
def section_run(x, y, z, b, h, n_steps, skip_steps, max_hits, g_tol):
    """Collect crossings of the surface sin(x) = b z along an RK4 trajectory.

    Detects sign changes of g = sin(x) - b z between consecutive steps (from
    skip_steps onward) and refines each crossing by bisecting the substep.
    Direction is +1 when g passes from negative to positive, else -1.

    Returns (times, states, dirs, n_hits, fail_step, final_state).
    """
    times = np.empty(max_hits)
    states = np.empty((max_hits, 3))
    dirs = np.empty(max_hits, dtype=np.int64)
    final = np.empty(3)
    n_hits = 0
    g_prev = _gval(x, z, b)
    for i in range(1, n_steps + 1):
        xn, yn, zn = rk4_step(x, y, z, b, h)
        if not (math.isfinite(xn) and math.isfinite(yn) and math.isfinite(zn)):
            final[0], final[1], final[2] = xn, yn, zn
            return times[:n_hits], states[:n_hits], dirs[:n_hits], n_hits, i, final
        g_new = _gval(xn, zn, b)
        if i > skip_steps and ((g_prev < 0.0) != (g_new < 0.0)):
            if n_hits >= max_hits:
                final[0], final[1], final[2] = x, y, z
                return times, states, dirs, n_hits, -1, final
            tau, xs, ys, zs, g = refine_crossing(x, y, z, b, h, g_tol)
            times[n_hits] = (i - 1) * h + tau
            states[n_hits, 0] = xs
            states[n_hits, 1] = ys
            states[n_hits, 2] = zs
            dirs[n_hits] = 1 if g_prev < 0.0 else -1
            n_hits += 1
        x, y, z, g_prev = xn, yn, zn, g_new
    final[0], final[1], final[2] = x, y, z
    return times[:n_hits], states[:n_hits], dirs[:n_hits], n_hits, -1, final


@njit(cache=True, nogil=True)
def speed_stats(x, y, z, b, h, n_steps, skip_steps):
    """Accumulate mean squared speed and mean sin^2 of each coordinate over
    the recorded window (states at steps skip_steps..n_steps inclusive).

    Returns (mean_speed_sq, mean_sin2_x, mean_sin2_y, mean_sin2_z, fail_step).
    """
    n = 0
    acc_v2 = 0.0
    acc_sx = 0.0
    acc_sy = 0.0
    acc_sz = 0.0
    if skip_steps == 0:
        fx, fy, fz = _vf(x, y, z, b)
        acc_v2 += fx * fx + fy * fy + fz * fz
        sx, sy, sz = math.sin(x), math.sin(y), math.sin(z)
        acc_sx += sx * sx
        acc_sy += sy * sy
        acc_sz += sz * sz
        n = 1
    for i in range(1, n_steps + 1):
        x, y, z = rk4_step(x, y, z, b, h)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            return np.nan, np.nan, np.nan, np.nan, i
        if i >= skip_steps:
            fx, fy, fz = _vf(x, y, z, b)
            acc_v2 += fx * fx + fy * fy + fz * fz
            sx, sy, sz = math.sin(x), math.sin(y), math.sin(z)
            acc_sx += sx * sx
            acc_sy += sy * sy
            acc_sz += sz * sz
            n += 1
    return acc_v2 / n, acc_sx / n, acc_sy / n, acc_sz / n, -1
