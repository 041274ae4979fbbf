"""Deterministic block-based stereo renderer.

Every layer exists twice — once as a scheme-A source at the sculpture and
once as a scheme-B source on the triangle — so six mono sources feed the
mix. All six cursors advance every block (the works loop continuously);
the inactive scheme's targets are simply held at zero, which makes scheme
switches a plain gain crossfade with no cursor jumps.

Per-source gain moves toward its target along a linear ramp of at most
``1/ramp_samples`` per frame. Ramps are anchored: the state stores the
gain at the moment the target last changed plus the frames elapsed since,
so the per-frame gain is a pure function of elapsed frame count. That is
what makes renders bit-identical across block sizes and across the
compiled and pure-numpy mixer paths.

Determinism contract: identical (scene, timeline, scheme) inputs yield
bit-identical output files, at any block size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .geometry import Pose, Vec3
from .interaction import MixerState, Scheme, active_gains
from .kernels import mix_block, ramp_gain
from .scene import LAYER_IDS, SCHEMES, SceneDescriptor
from .timeline import PoseUpdate, SchemeSelect, SliderSet, Timeline

N_SOURCES = 6  # 3 layers × 2 schemes; index = scheme_index*3 + layer_index

INITIAL_POSE = Pose(position=Vec3(0.0, 1.6, 0.0), yaw=0.0)

_SQRT1_2 = math.sqrt(0.5)


def pan_gains(azimuth_deg: float) -> tuple[float, float]:
    """Constant-power stereo pan; rear azimuths fold onto the front arc."""
    az = azimuth_deg
    if az > 90.0:
        az = 180.0 - az
    elif az < -90.0:
        az = -180.0 - az
    p = az / 90.0
    theta = (p + 1.0) * math.pi / 4.0
    return math.cos(theta), math.sin(theta)


def distance_attenuation(d: float, d_ref: float) -> float:
    """Inverse-distance gain, clamped to 1 inside the reference distance."""
    return d_ref / max(d, d_ref)


def source_azimuth(listener: Pose, source_world: Vec3 | np.ndarray) -> float:
    """Horizontal angle of a source relative to the listener's heading.

    0 is dead ahead, +90 due right, range [-180, 180). A source within
    1e-6 m horizontally (directly overhead) reads as 0 by convention.
    """
    if isinstance(source_world, Vec3):
        sx, sz = source_world.x, source_world.z
    else:
        sx, sz = float(source_world[0]), float(source_world[2])
    dx = sx - listener.position.x
    dz = sz - listener.position.z
    if math.hypot(dx, dz) < 1e-6:
        return 0.0
    fx, fz = listener.forward_xz()
    rx, rz = listener.right_xz()
    ahead = dx * fx + dz * fz
    right = dx * rx + dz * rz
    az = math.degrees(math.atan2(right, ahead))
    if az >= 180.0:
        az = -180.0
    return az


# ---------------------------------------------------------------------------
# Track loading
# ---------------------------------------------------------------------------

class TrackError(ValueError):
    """A track file that cannot be used by the renderer."""


def load_track(path: str | Path, target_rate: int) -> np.ndarray:
    """Load a mono WAV (PCM-16 or float-32) as float64 at the scene rate."""
    try:
        rate, data = wavfile.read(path)
    except (OSError, ValueError) as exc:
        raise TrackError(f"cannot read track {path}: {exc}") from exc
    if data.ndim != 1:
        raise TrackError(f"track {path} must be mono, got {data.ndim} channels")
    if data.size == 0:
        raise TrackError(f"track {path} is empty")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise TrackError(
            f"track {path}: unsupported sample format {data.dtype}; "
            "use 16-bit PCM or 32-bit float"
        )
    if rate != target_rate:
        n_out = int(round(samples.size * target_rate / rate))
        positions = np.arange(n_out, dtype=np.float64) * (rate / target_rate)
        samples = np.interp(positions, np.arange(samples.size), samples)
    return samples


@dataclass(frozen=True, eq=False)
class TrackBundle:
    """The three layer tracks packed flat, with per-source views.

    ``offsets[s]``/``lengths[s]`` locate source ``s``'s track inside
    ``data``. Sources 0-2 (scheme A) and 3-5 (scheme B) share the same
    three tracks, but keep independent cursors.
    """

    data: np.ndarray      # float64, all tracks concatenated
    offsets: np.ndarray   # (N_SOURCES,) int64
    lengths: np.ndarray   # (N_SOURCES,) int64

    @classmethod
    def from_scene(cls, scene: SceneDescriptor) -> "TrackBundle":
        rate = scene.constants.sample_rate
        tracks = [load_track(scene.layer_by_id(layer).media, rate)
                  for layer in LAYER_IDS]
        data = np.concatenate(tracks)
        layer_offsets = np.cumsum([0] + [t.size for t in tracks[:-1]])
        offsets = np.array([layer_offsets[s % 3] for s in range(N_SOURCES)],
                           dtype=np.int64)
        lengths = np.array([tracks[s % 3].size for s in range(N_SOURCES)],
                           dtype=np.int64)
        return cls(data=data, offsets=offsets, lengths=lengths)

    @classmethod
    def silent(cls, scene: SceneDescriptor, seconds: float = 1.0) -> "TrackBundle":
        """All-zero tracks, for sessions that only need gains/telemetry."""
        n = max(1, int(round(scene.constants.sample_rate * seconds)))
        data = np.zeros(n, dtype=np.float64)
        offsets = np.zeros(N_SOURCES, dtype=np.int64)
        lengths = np.full(N_SOURCES, n, dtype=np.int64)
        return cls(data=data, offsets=offsets, lengths=lengths)


# ---------------------------------------------------------------------------
# Render state and block rendering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AudioBlock:
    frames: int
    left: np.ndarray
    right: np.ndarray

    def interleaved_int16(self) -> np.ndarray:
        out = np.empty(self.frames * 2, dtype=np.int16)
        out[0::2] = float_to_int16(self.left)
        out[1::2] = float_to_int16(self.right)
        return out


def float_to_int16(samples: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(samples, -1.0, 1.0) * 32767.0).astype(np.int16)


@dataclass
class RenderState:
    """Mutable per-session renderer state.

    The smoothed gain of source ``s`` is not stored directly; it is
    derived from (``ramp_start``, ``targets``, ``frames_done``) — the gain
    when the target last changed, and the frames rendered since.
    """

    cursors: np.ndarray      # (N_SOURCES,) int64, modulo track length
    ramp_start: np.ndarray   # (N_SOURCES,) float64
    targets: np.ndarray      # (N_SOURCES,) float64
    frames_done: np.ndarray  # (N_SOURCES,) int64 since last target change
    sample_clock: int = 0

    @classmethod
    def initial(cls) -> "RenderState":
        return cls(
            cursors=np.zeros(N_SOURCES, dtype=np.int64),
            ramp_start=np.zeros(N_SOURCES, dtype=np.float64),
            targets=np.zeros(N_SOURCES, dtype=np.float64),
            frames_done=np.zeros(N_SOURCES, dtype=np.int64),
        )

    def smoothed_gain(self, s: int, step: float) -> float:
        return ramp_gain(float(self.ramp_start[s]), float(self.targets[s]),
                         int(self.frames_done[s]), step)

    def set_target(self, s: int, value: float, step: float) -> None:
        """Re-anchor the ramp only if the target actually changes."""
        if value != self.targets[s]:
            self.ramp_start[s] = self.smoothed_gain(s, step)
            self.targets[s] = value
            self.frames_done[s] = 0

    def copy(self) -> "RenderState":
        return RenderState(
            cursors=self.cursors.copy(),
            ramp_start=self.ramp_start.copy(),
            targets=self.targets.copy(),
            frames_done=self.frames_done.copy(),
            sample_clock=self.sample_clock,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, RenderState):
            return NotImplemented
        return (
            self.sample_clock == other.sample_clock
            and np.array_equal(self.cursors, other.cursors)
            and np.array_equal(self.ramp_start, other.ramp_start)
            and np.array_equal(self.targets, other.targets)
            and np.array_equal(self.frames_done, other.frames_done)
        )


class Renderer:
    """Binds a scene and its tracks to a RenderState and mixes blocks.

    ``set_control`` snapshots the control state (pose + scheme + sliders)
    into per-source targets and pan gains; ``render_block`` then mixes
    with those held constant. Callers re-issue ``set_control`` whenever
    anything changes, at whatever frame position they choose — this is
    what keeps live and offline rendering sample-identical.
    """

    def __init__(self, scene: SceneDescriptor, tracks: TrackBundle | None = None):
        self.scene = scene
        self.tracks = tracks if tracks is not None else TrackBundle.from_scene(scene)
        self.consts = scene.constants
        self.step = 1.0 / self.consts.ramp_samples
        self.state = RenderState.initial()
        self.pan_l = np.zeros(N_SOURCES, dtype=np.float64)
        self.pan_r = np.zeros(N_SOURCES, dtype=np.float64)
        self._source_world = np.vstack(
            [scene.source_world[scheme] for scheme in SCHEMES]
        )
        self.set_control(INITIAL_POSE, Scheme.A, MixerState())

    def set_control(self, pose: Pose, scheme: Scheme, mixer: MixerState) -> None:
        gains = active_gains(scheme, mixer, pose, self.scene).as_tuple()
        p = pose.position.to_array()
        active_block = 0 if scheme == Scheme.A else 1
        for s in range(N_SOURCES):
            src = self._source_world[s]
            if s // 3 == active_block:
                d = float(np.linalg.norm(p - src))
                att = distance_attenuation(d, self.consts.d_ref)
                target = gains[s % 3] * att
            else:
                target = 0.0
            self.state.set_target(s, target, self.step)
            l, r = pan_gains(source_azimuth(pose, src))
            self.pan_l[s] = l
            self.pan_r[s] = r

    def render_block(self, frames: int | None = None) -> AudioBlock:
        n = frames if frames is not None else self.consts.block_frames
        st = self.state
        out_l, out_r = mix_block(
            self.tracks.data, self.tracks.offsets, self.tracks.lengths,
            st.cursors, st.ramp_start, st.targets, st.frames_done,
            self.pan_l, self.pan_r, self.step, n,
        )
        st.sample_clock += n
        return AudioBlock(frames=n, left=out_l, right=out_r)


def render_block(
    state: RenderState,
    targets: np.ndarray,
    pan_l: np.ndarray,
    pan_r: np.ndarray,
    tracks: TrackBundle,
    block_frames: int,
    ramp_samples: int,
) -> tuple[RenderState, AudioBlock]:
    """Functional single-block form: returns the advanced state.

    The Renderer class is the streaming wrapper around the same kernel.
    """
    out = state.copy()
    step = 1.0 / ramp_samples
    for s in range(N_SOURCES):
        out.set_target(s, float(targets[s]), step)
    out_l, out_r = mix_block(
        tracks.data, tracks.offsets, tracks.lengths,
        out.cursors, out.ramp_start, out.targets, out.frames_done,
        pan_l, pan_r, step, block_frames,
    )
    out.sample_clock += block_frames
    return out, AudioBlock(frames=block_frames, left=out_l, right=out_r)


# ---------------------------------------------------------------------------
# Offline timeline rendering
# ---------------------------------------------------------------------------

def render_timeline_float(
    scene: SceneDescriptor,
    timeline: Timeline,
    scheme: Scheme | str = Scheme.A,
    block_frames: int | None = None,
    tracks: TrackBundle | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Render a scripted walkthrough to float64 (left, right) channels.

    Events are quantized to the nearest sample and take effect exactly
    there: rendering splits into segments at event positions, so the
    result does not depend on ``block_frames`` (asserted bit-exact in the
    test suite).
    """
    rate = scene.constants.sample_rate
    n_total = round(timeline.duration * rate)
    renderer = Renderer(scene, tracks=tracks)

    scheme = Scheme(scheme)
    mixer = MixerState()
    pose = INITIAL_POSE
    renderer.set_control(pose, scheme, mixer)

    block = block_frames if block_frames is not None else scene.constants.block_frames
    if block <= 0:
        raise ValueError(f"block_frames must be positive, got {block}")

    # (sample position, payload), event order preserved within a sample.
    pending = [(min(round(ev.t * rate), n_total), ev.payload)
               for ev in timeline.events]
    left = np.empty(n_total, dtype=np.float64)
    right = np.empty(n_total, dtype=np.float64)

    cursor = 0
    idx = 0
    while cursor < n_total or idx < len(pending):
        while idx < len(pending) and pending[idx][0] <= cursor:
            payload = pending[idx][1]
            if isinstance(payload, PoseUpdate):
                pose = payload.pose
            elif isinstance(payload, SliderSet):
                value = min(1.0, max(0.0, payload.value))
                mixer = mixer.with_slider(payload.layer, value)
            elif isinstance(payload, SchemeSelect):
                scheme, mixer = _apply_scheme(scheme, payload.value, mixer)
            idx += 1
            renderer.set_control(pose, scheme, mixer)
        if cursor >= n_total:
            break
        segment_end = pending[idx][0] if idx < len(pending) else n_total
        segment_end = min(segment_end, n_total)
        while cursor < segment_end:
            n = min(block, segment_end - cursor)
            blk = renderer.render_block(n)
            left[cursor:cursor + n] = blk.left
            right[cursor:cursor + n] = blk.right
            cursor += n

    return left, right


def render_timeline(
    scene: SceneDescriptor,
    timeline: Timeline,
    scheme: Scheme | str = Scheme.A,
    out_path: str | Path | None = None,
    block_frames: int | None = None,
    tracks: TrackBundle | None = None,
) -> np.ndarray:
    """Like render_timeline_float, quantized to interleaved stereo int16.

    Writes a 16-bit stereo WAV when ``out_path`` is given.
    """
    left, right = render_timeline_float(
        scene, timeline, scheme, block_frames=block_frames, tracks=tracks
    )
    interleaved = np.empty(left.size * 2, dtype=np.int16)
    interleaved[0::2] = float_to_int16(left)
    interleaved[1::2] = float_to_int16(right)
    if out_path is not None:
        write_stereo_wav(out_path, scene.constants.sample_rate, interleaved)
    return interleaved


def _apply_scheme(current: Scheme, requested: str, mixer: MixerState):
    from .interaction import select_scheme
    return select_scheme(current, Scheme(requested), mixer)


def write_stereo_wav(path: str | Path, rate: int, interleaved: np.ndarray) -> None:
    """Write interleaved int16 stereo samples as a RIFF WAV file."""
    frames = interleaved.reshape(-1, 2)
    wavfile.write(path, rate, frames)
