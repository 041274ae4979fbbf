"""Benchmark the compiled mixer/mesh kernels against the numpy fallbacks.

Run directly:  python3 benchmarks/bench_kernels.py

Both paths must produce bit-identical blocks (that is a shipped guarantee,
not just a nice-to-have), so besides timings this prints the max absolute
difference between them.
"""

import time

import numpy as np

from proxmix.kernels import (
    HAVE_NUMBA,
    mesh_distances_numba,
    mesh_distances_numpy,
    mix_block_numba,
    mix_block_numpy,
    ramp_gain,
)

RATE = 48_000
BLOCK = 128
SECONDS = 30.0
N_SOURCES = 6
RAMP = 960


def make_mix_inputs(rng):
    track_len = RATE * 6
    data = rng.uniform(-0.5, 0.5, track_len * 3)
    offsets = np.array([0, track_len, 2 * track_len] * 2, dtype=np.int64)
    lengths = np.full(N_SOURCES, track_len, dtype=np.int64)
    pan = rng.uniform(0.1, 0.9, (2, N_SOURCES))
    return data, offsets, lengths, pan


def run_mixer(mix_block, data, offsets, lengths, pan, seed):
    """Mix SECONDS of audio with a fresh target every 10 blocks."""
    rng = np.random.default_rng(seed)
    cursors = np.zeros(N_SOURCES, dtype=np.int64)
    ramp_start = np.zeros(N_SOURCES)
    targets = np.zeros(N_SOURCES)
    frames_done = np.zeros(N_SOURCES, dtype=np.int64)
    n_blocks = int(SECONDS * RATE / BLOCK)
    out = np.empty((n_blocks, 2, BLOCK))
    for b in range(n_blocks):
        if b % 10 == 0:
            # Re-anchor one source's ramp, as RenderState.set_target does.
            s = int(rng.integers(N_SOURCES))
            ramp_start[s] = ramp_gain(float(ramp_start[s]), float(targets[s]),
                                      int(frames_done[s]), 1.0 / RAMP)
            targets[s] = float(rng.uniform(0.0, 1.0))
            frames_done[s] = 0
        left, right = mix_block(data, offsets, lengths, cursors, ramp_start,
                                targets, frames_done, pan[0], pan[1],
                                1.0 / RAMP, BLOCK)
        out[b, 0] = left
        out[b, 1] = right
    return out


def bench_mixer():
    rng = np.random.default_rng(99)
    data, offsets, lengths, pan = make_mix_inputs(rng)

    run_mixer(mix_block_numba, data, offsets, lengths, pan, 1)  # JIT warm-up

    t0 = time.perf_counter()
    fast = run_mixer(mix_block_numba, data, offsets, lengths, pan, 1)
    t_numba = time.perf_counter() - t0

    t0 = time.perf_counter()
    slow = run_mixer(mix_block_numpy, data, offsets, lengths, pan, 1)
    t_numpy = time.perf_counter() - t0

    diff = np.abs(fast - slow).max()
    print(f"mix_block   ({SECONDS:.0f} s of audio, {BLOCK}-frame blocks)")
    print(f"  numpy:  {t_numpy:.3f} s  ({SECONDS / t_numpy:6.0f}x realtime)")
    print(f"  numba:  {t_numba:.3f} s  ({SECONDS / t_numba:6.0f}x realtime)")
    print(f"  speedup {t_numpy / t_numba:.1f}x, max |diff| = {diff:.1e}")
    assert diff == 0.0, "kernel paths diverged"


def bench_mesh():
    from proxmix.demo import DEMO_SCENE, demo_cone_mesh

    triangles = np.asarray(demo_cone_mesh(), dtype=np.float64)
    rng = np.random.default_rng(7)
    points = rng.uniform(-1.5, 1.5, (20_000, 3))

    mesh_distances_numba(points[:16], triangles)  # JIT warm-up

    t0 = time.perf_counter()
    fast = mesh_distances_numba(points, triangles)
    t_numba = time.perf_counter() - t0

    t0 = time.perf_counter()
    slow = mesh_distances_numpy(points, triangles)
    t_numpy = time.perf_counter() - t0

    diff = np.abs(fast - slow).max()
    n = len(points)
    print(f"mesh_distances  ({n} points x {len(triangles)} triangles, "
          f"mesh from {DEMO_SCENE['hologram']['mesh_path']})")
    print(f"  numpy:  {t_numpy:.3f} s  ({t_numpy / n * 1e6:7.2f} us/query)")
    print(f"  numba:  {t_numba:.3f} s  ({t_numba / n * 1e6:7.2f} us/query)")
    print(f"  speedup {t_numpy / t_numba:.1f}x, max |diff| = {diff:.1e}")
    assert diff < 1e-12, "kernel paths diverged"


if __name__ == "__main__":
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    bench_mixer()
    bench_mesh()
