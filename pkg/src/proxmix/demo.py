"""Self-contained demo assets: cone sculpture mesh, synth tracks, scene.

Everything here is deterministic (fixed RNG seed, closed-form geometry)
so generated assets are reproducible byte-for-byte and safe to use as
test fixtures. `write_demo` lays out a ready-to-serve directory:

    scene.json
    cones.obj
    tracks/natural.wav  tracks/human.wav  tracks/radio.wav
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from scipy import signal
from scipy.io import wavfile

CONE_SEGMENTS = 16
CONE_RADIUS = 0.4  # 80 cm diameter
TRACK_SECONDS = 6.0

# Scheme-B sources sit on an equilateral triangle of side 4 m around the
# sculpture, 1.2 m above the floor squares that mark them.
_TRI_R = 4.0 / math.sqrt(3.0)  # circumradius
SOURCE_HEIGHT = 1.2

DEMO_SCENE = {
    "anchor": {"origin": [2.5, 0.0, -1.5], "yaw": 30.0},
    "hologram": {"mesh_path": "cones.obj"},
    "layers": [
        {"id": "natural", "media": "tracks/natural.wav", "duration": TRACK_SECONDS},
        {"id": "human", "media": "tracks/human.wav", "duration": TRACK_SECONDS},
        {"id": "radio", "media": "tracks/radio.wav", "duration": TRACK_SECONDS},
    ],
    "sources": [
        {"layer": "natural", "scheme": "A", "position": [0.0, 1.0, 0.0]},
        {"layer": "human", "scheme": "A", "position": [0.0, 1.0, 0.0]},
        {"layer": "radio", "scheme": "A", "position": [0.0, 1.0, 0.0]},
        {"layer": "natural", "scheme": "B",
         "position": [0.0, SOURCE_HEIGHT, -_TRI_R]},
        {"layer": "human", "scheme": "B",
         "position": [2.0, SOURCE_HEIGHT, _TRI_R / 2.0]},
        {"layer": "radio", "scheme": "B",
         "position": [-2.0, SOURCE_HEIGHT, _TRI_R / 2.0]},
    ],
    "panels": [
        {"center": [0.0, 0.0, -_TRI_R], "side": 1.0, "source": "natural"},
        {"center": [2.0, 0.0, _TRI_R / 2.0], "side": 1.0, "source": "human"},
        {"center": [-2.0, 0.0, _TRI_R / 2.0], "side": 1.0, "source": "radio"},
    ],
    "mixer": [0.0, 0.9, -1.2],
}


def cone_triangles(
    apex: np.ndarray,
    base_center: np.ndarray,
    radius: float,
    segments: int = CONE_SEGMENTS,
) -> np.ndarray:
    """Open cone (side surface only) as a (segments, 3, 3) triangle fan."""
    apex = np.asarray(apex, dtype=np.float64)
    base_center = np.asarray(base_center, dtype=np.float64)
    axis = apex - base_center
    axis = axis / np.linalg.norm(axis)
    # Any unit vector not parallel to the axis seeds the base-circle frame.
    seed = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(seed, axis)) > 0.9:
        seed = np.array([0.0, 0.0, 1.0])
    u = np.cross(axis, seed)
    u = u / np.linalg.norm(u)
    v = np.cross(axis, u)
    angles = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    rim = (base_center[None, :]
           + radius * np.cos(angles)[:, None] * u[None, :]
           + radius * np.sin(angles)[:, None] * v[None, :])
    tris = np.empty((segments, 3, 3), dtype=np.float64)
    for i in range(segments):
        tris[i, 0] = apex
        tris[i, 1] = rim[i]
        tris[i, 2] = rim[(i + 1) % segments]
    return tris


def demo_cone_mesh() -> np.ndarray:
    """Two intersecting 80 cm cones, roughly chest height, anchor-local."""
    upright = cone_triangles(
        apex=np.array([0.0, 1.35, 0.0]),
        base_center=np.array([0.0, 0.45, 0.0]),
        radius=CONE_RADIUS,
    )
    sideways = cone_triangles(
        apex=np.array([-0.45, 0.9, 0.0]),
        base_center=np.array([0.45, 0.9, 0.0]),
        radius=CONE_RADIUS,
    )
    return np.concatenate([upright, sideways])


def write_obj(path: Path, triangles: np.ndarray) -> None:
    lines = ["# cone sculpture stand-in mesh"]
    for tri in triangles:
        for vert in tri:
            lines.append(f"v {vert[0]:.9f} {vert[1]:.9f} {vert[2]:.9f}")
    for i in range(triangles.shape[0]):
        base = 3 * i
        lines.append(f"f {base + 1} {base + 2} {base + 3}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Synthetic layer tracks
# ---------------------------------------------------------------------------

def _envelope(n: int, rate: int, period: float, rng: np.random.Generator) -> np.ndarray:
    """Slow random-phase amplitude swell, in [0.2, 1]."""
    t = np.arange(n) / rate
    phase = rng.uniform(0.0, 2.0 * np.pi)
    return 0.6 + 0.4 * np.sin(2.0 * np.pi * t / period + phase)


def synth_natural(n: int, rate: int, rng: np.random.Generator) -> np.ndarray:
    """Bird-like chirps over a soft low drone."""
    t = np.arange(n) / rate
    drone = 0.20 * np.sin(2.0 * np.pi * 110.0 * t)
    out = drone * _envelope(n, rate, 3.0, rng)
    for _ in range(10):
        start = rng.uniform(0.0, n / rate - 0.4)
        dur = rng.uniform(0.15, 0.35)
        f0 = rng.uniform(1800.0, 3200.0)
        f1 = f0 * rng.uniform(1.2, 1.8)
        i0 = int(start * rate)
        i1 = min(n, i0 + int(dur * rate))
        tt = np.arange(i1 - i0) / rate
        sweep = f0 + (f1 - f0) * tt / max(tt[-1], 1e-9)
        chirp = np.sin(2.0 * np.pi * np.cumsum(sweep) / rate)
        win = np.sin(np.pi * np.arange(i1 - i0) / (i1 - i0)) ** 2
        out[i0:i1] += 0.25 * chirp * win
    return out


def synth_human(n: int, rate: int, rng: np.random.Generator) -> np.ndarray:
    """Crowd-murmur texture: band-limited noise with a speechy flutter."""
    noise = rng.standard_normal(n)
    # One-pole lowpass keeps it murmur-dark.
    alpha = 0.04
    filtered = signal.lfilter([alpha], [1.0, -(1.0 - alpha)], noise)
    filtered /= np.max(np.abs(filtered))
    t = np.arange(n) / rate
    flutter = 0.55 + 0.45 * np.sin(2.0 * np.pi * 2.7 * t + rng.uniform(0, 2 * np.pi))
    hum = 0.08 * np.sin(2.0 * np.pi * 140.0 * t)
    return 0.30 * filtered * flutter + hum * _envelope(n, rate, 4.0, rng)


def synth_radio(n: int, rate: int, rng: np.random.Generator) -> np.ndarray:
    """Morse-ish beeps over faint static."""
    t = np.arange(n) / rate
    static = 0.05 * rng.standard_normal(n)
    out = static * _envelope(n, rate, 5.0, rng)
    pos = 0.1
    while pos < n / rate - 0.2:
        dur = float(rng.choice([0.06, 0.18]))
        i0 = int(pos * rate)
        i1 = min(n, i0 + int(dur * rate))
        tt = np.arange(i1 - i0) / rate
        win = np.minimum(1.0, np.minimum(tt, (i1 - i0) / rate - tt) / 0.01)
        out[i0:i1] += 0.35 * np.sin(2.0 * np.pi * 880.0 * tt) * win
        pos += dur + float(rng.uniform(0.08, 0.3))
    return out


_SYNTHS = {"natural": synth_natural, "human": synth_human, "radio": synth_radio}


def synth_track(layer: str, seconds: float = TRACK_SECONDS,
                rate: int = 48000, seed: int = 2020) -> np.ndarray:
    """Deterministic mono test signal for a layer, peak-normalized to 0.8."""
    rng = np.random.default_rng([seed, int.from_bytes(layer.encode(), "little")])
    n = int(round(seconds * rate))
    data = _SYNTHS[layer](n, rate, rng)
    peak = np.max(np.abs(data))
    if peak > 0:
        data = 0.8 * data / peak
    return data


def write_demo(out_dir: str | Path, rate: int = 48000,
               seconds: float = TRACK_SECONDS) -> Path:
    """Write scene.json, cones.obj and the three tracks; returns scene path."""
    out = Path(out_dir)
    (out / "tracks").mkdir(parents=True, exist_ok=True)
    write_obj(out / "cones.obj", demo_cone_mesh())
    for layer in ("natural", "human", "radio"):
        data = synth_track(layer, seconds=seconds, rate=rate)
        pcm = np.rint(np.clip(data, -1.0, 1.0) * 32767.0).astype(np.int16)
        wavfile.write(out / "tracks" / f"{layer}.wav", rate, pcm)
    doc = dict(DEMO_SCENE)
    if seconds != TRACK_SECONDS:
        doc["layers"] = [dict(l, duration=seconds) for l in DEMO_SCENE["layers"]]
    if rate != 48000:
        doc["constants"] = {"sample_rate": rate}
    scene_path = out / "scene.json"
    scene_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return scene_path


def bundled_scene_path() -> Path:
    """The example scene shipped inside the package (geometry only; track
    media must be generated with `write_demo` before rendering)."""
    return Path(__file__).parent / "assets" / "example_scene.json"
