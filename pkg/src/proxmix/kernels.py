"""Hot numeric kernels: block mixing and point-to-mesh distance.

Each kernel has a numba jitted path and a pure-numpy fallback. The numba
path is used when numba imports cleanly, unless PROXMIX_PURE_NUMPY=1 forces
the fallback. Both paths are written with the exact same per-element
arithmetic (same operation order, same predicates), so the rendered audio
does not depend on which one is active.

Gain ramps are anchored: each source carries the gain the ramp started
from, its target, and how many frames have elapsed since the target was
set. The gain at elapsed frame t is then a pure function of t, which makes
the output independent of how the stream is chopped into blocks.

benchmarks/bench_kernels.py times the two paths against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("PROXMIX_PURE_NUMPY", "") != "1"


# ---------------------------------------------------------------------------
# Block mixer
# ---------------------------------------------------------------------------

def ramp_gain(start: float, target: float, frames_elapsed: int, step: float) -> float:
    """Smoothed gain after `frames_elapsed` frames of ramping toward target."""
    delta = target - start
    adelta = abs(delta)
    adv = float(frames_elapsed) * step
    if adv >= adelta:
        return target
    if delta >= 0.0:
        return start + adv
    return start - adv


def mix_block_numpy(track_data, track_off, track_len, cursors, ramp_start,
                    targets, frames_done, pan_l, pan_r, step, n):
    """Fallback mixer: vectorized over frames, Python loop over sources."""
    out_l = np.zeros(n, dtype=np.float64)
    out_r = np.zeros(n, dtype=np.float64)
    karr = np.arange(1, n + 1, dtype=np.int64)
    idx0 = np.arange(n, dtype=np.int64)
    for s in range(cursors.shape[0]):
        start = ramp_start[s]
        target = targets[s]
        delta = target - start
        adelta = abs(delta)
        adv = (frames_done[s] + karr).astype(np.float64) * step
        ramp = start + adv if delta >= 0.0 else start - adv
        g = np.where(adv >= adelta, target, ramp)
        idx = track_off[s] + (cursors[s] + idx0) % track_len[s]
        contrib = track_data[idx] * g
        out_l += contrib * pan_l[s]
        out_r += contrib * pan_r[s]
        cursors[s] = (cursors[s] + n) % track_len[s]
        frames_done[s] += n
    np.clip(out_l, -1.0, 1.0, out=out_l)
    np.clip(out_r, -1.0, 1.0, out=out_r)
    return out_l, out_r


if HAVE_NUMBA:

    @njit(cache=True)
    def _mix_block_jit(track_data, track_off, track_len, cursors, ramp_start,
                       targets, frames_done, pan_l, pan_r, step, n):
        out_l = np.zeros(n, dtype=np.float64)
        out_r = np.zeros(n, dtype=np.float64)
        for s in range(cursors.shape[0]):
            start = ramp_start[s]
            target = targets[s]
            delta = target - start
            adelta = abs(delta)
            off = track_off[s]
            ln = track_len[s]
            cur = cursors[s]
            fd = frames_done[s]
            gl = pan_l[s]
            gr = pan_r[s]
            for k in range(n):
                adv = float(fd + k + 1) * step
                if adv >= adelta:
                    g = target
                elif delta >= 0.0:
                    g = start + adv
                else:
                    g = start - adv
                contrib = track_data[off + cur] * g
                out_l[k] += contrib * gl
                out_r[k] += contrib * gr
                cur += 1
                if cur == ln:
                    cur = 0
            cursors[s] = cur
            frames_done[s] = fd + n
        for k in range(n):
            v = out_l[k]
            if v > 1.0:
                out_l[k] = 1.0
            elif v < -1.0:
                out_l[k] = -1.0
            v = out_r[k]
            if v > 1.0:
                out_r[k] = 1.0
            elif v < -1.0:
                out_r[k] = -1.0
        return out_l, out_r

    def mix_block_numba(track_data, track_off, track_len, cursors, ramp_start,
                        targets, frames_done, pan_l, pan_r, step, n):
        return _mix_block_jit(track_data, track_off, track_len, cursors,
                              ramp_start, targets, frames_done, pan_l, pan_r,
                              step, n)

else:  # pragma: no cover
    mix_block_numba = None


mix_block = mix_block_numba if USE_NUMBA else mix_block_numpy


# ---------------------------------------------------------------------------
# Point-to-triangle-mesh distance
# ---------------------------------------------------------------------------
# Exact closest-feature query (face, edges, vertices) per triangle, minimum
# over the mesh. The region tests follow the classic barycentric-coordinate
# decomposition of the plane around a triangle.

def mesh_distances_numpy(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Fallback distances: vectorized over triangles per query point."""
    a = triangles[:, 0, :]
    b = triangles[:, 1, :]
    c = triangles[:, 2, :]
    ab = b - a
    ac = c - a
    bc = c - b
    out = np.empty(points.shape[0], dtype=np.float64)
    for i in range(points.shape[0]):
        p = points[i]
        ap = p - a
        bp = p - b
        cp = p - c
        d1 = np.einsum("ij,ij->i", ab, ap)
        d2 = np.einsum("ij,ij->i", ac, ap)
        d3 = np.einsum("ij,ij->i", ab, bp)
        d4 = np.einsum("ij,ij->i", ac, bp)
        d5 = np.einsum("ij,ij->i", ab, cp)
        d6 = np.einsum("ij,ij->i", ac, cp)
        va = d3 * d6 - d5 * d4
        vb = d5 * d2 - d1 * d6
        vc = d1 * d4 - d3 * d2

        q = np.empty_like(a)
        remain = np.ones(a.shape[0], dtype=bool)

        m = (d1 <= 0.0) & (d2 <= 0.0)
        q[m] = a[m]
        remain &= ~m

        m = remain & (d3 >= 0.0) & (d4 <= d3)
        q[m] = b[m]
        remain &= ~m

        m = remain & (vc <= 0.0) & (d1 >= 0.0) & (d3 <= 0.0)
        if np.any(m):
            v = (d1[m] / (d1[m] - d3[m]))[:, None]
            q[m] = a[m] + v * ab[m]
            remain &= ~m

        m = remain & (d6 >= 0.0) & (d5 <= d6)
        q[m] = c[m]
        remain &= ~m

        m = remain & (vb <= 0.0) & (d2 >= 0.0) & (d6 <= 0.0)
        if np.any(m):
            w = (d2[m] / (d2[m] - d6[m]))[:, None]
            q[m] = a[m] + w * ac[m]
            remain &= ~m

        m = remain & (va <= 0.0) & (d4 - d3 >= 0.0) & (d5 - d6 >= 0.0)
        if np.any(m):
            w = ((d4[m] - d3[m]) / ((d4[m] - d3[m]) + (d5[m] - d6[m])))[:, None]
            q[m] = b[m] + w * bc[m]
            remain &= ~m

        if np.any(remain):
            denom = 1.0 / (va[remain] + vb[remain] + vc[remain])
            v = (vb[remain] * denom)[:, None]
            w = (vc[remain] * denom)[:, None]
            q[remain] = a[remain] + v * ab[remain] + w * ac[remain]

        diff = q - p
        out[i] = math.sqrt(float(np.min(np.einsum("ij,ij->i", diff, diff))))
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _tri_dist_sq(tri, px, py, pz):
        ax, ay, az = tri[0, 0], tri[0, 1], tri[0, 2]
        bx, by, bz = tri[1, 0], tri[1, 1], tri[1, 2]
        cx, cy, cz = tri[2, 0], tri[2, 1], tri[2, 2]
        abx, aby, abz = bx - ax, by - ay, bz - az
        acx, acy, acz = cx - ax, cy - ay, cz - az

        apx, apy, apz = px - ax, py - ay, pz - az
        d1 = abx * apx + aby * apy + abz * apz
        d2 = acx * apx + acy * apy + acz * apz
        if d1 <= 0.0 and d2 <= 0.0:
            return apx * apx + apy * apy + apz * apz

        bpx, bpy, bpz = px - bx, py - by, pz - bz
        d3 = abx * bpx + aby * bpy + abz * bpz
        d4 = acx * bpx + acy * bpy + acz * bpz
        if d3 >= 0.0 and d4 <= d3:
            return bpx * bpx + bpy * bpy + bpz * bpz

        vc = d1 * d4 - d3 * d2
        if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
            v = d1 / (d1 - d3)
            ex = apx - v * abx
            ey = apy - v * aby
            ez = apz - v * abz
            return ex * ex + ey * ey + ez * ez

        cpx, cpy, cpz = px - cx, py - cy, pz - cz
        d5 = abx * cpx + aby * cpy + abz * cpz
        d6 = acx * cpx + acy * cpy + acz * cpz
        if d6 >= 0.0 and d5 <= d6:
            return cpx * cpx + cpy * cpy + cpz * cpz

        vb = d5 * d2 - d1 * d6
        if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
            w = d2 / (d2 - d6)
            ex = apx - w * acx
            ey = apy - w * acy
            ez = apz - w * acz
            return ex * ex + ey * ey + ez * ez

        va = d3 * d6 - d5 * d4
        if va <= 0.0 and d4 - d3 >= 0.0 and d5 - d6 >= 0.0:
            w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
            ex = bpx - w * (cx - bx)
            ey = bpy - w * (cy - by)
            ez = bpz - w * (cz - bz)
            return ex * ex + ey * ey + ez * ez

        denom = 1.0 / (va + vb + vc)
        v = vb * denom
        w = vc * denom
        ex = apx - v * abx - w * acx
        ey = apy - v * aby - w * acy
        ez = apz - v * abz - w * acz
        return ex * ex + ey * ey + ez * ez

    @njit(cache=True)
    def _mesh_distances_jit(points, triangles):
        out = np.empty(points.shape[0], dtype=np.float64)
        for i in range(points.shape[0]):
            px, py, pz = points[i, 0], points[i, 1], points[i, 2]
            best = np.inf
            for t in range(triangles.shape[0]):
                d2 = _tri_dist_sq(triangles[t], px, py, pz)
                if d2 < best:
                    best = d2
            out[i] = math.sqrt(best)
        return out

    def mesh_distances_numba(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
        return _mesh_distances_jit(
            np.ascontiguousarray(points, dtype=np.float64),
            np.ascontiguousarray(triangles, dtype=np.float64),
        )

else:  # pragma: no cover
    mesh_distances_numba = None


mesh_distances = mesh_distances_numba if USE_NUMBA else mesh_distances_numpy


def mesh_distance(point: np.ndarray, triangles: np.ndarray) -> float:
    """Minimum distance from a single world-space point to the mesh."""
    p = np.asarray(point, dtype=np.float64).reshape(1, 3)
    return float(mesh_distances(p, triangles)[0])
