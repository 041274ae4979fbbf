"""Per-user sessions: protocol handling, telemetry, logging, replay.

One Session per connected user. Messages are handled strictly in arrival
order; the session owns all its state (scheme, sliders, pose, glow/touch
flags, renderer) and shares nothing but the immutable scene with other
sessions.

Time is counted in samples actually rendered — the session clock is the
renderer's sample clock, reported in seconds. Every accepted message is
appended to a JSON-lines log together with that clock, which is what
makes logs exactly replayable: replay advances the renderer to each
record's clock (rendering and discarding the same blocks the live
session rendered), then applies the message through the same code path.
"""

from __future__ import annotations

import base64
import json
import math
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from .geometry import Pose, Vec3, normalize_yaw
from .interaction import (
    InteractionEvent,
    MixerState,
    ProximityState,
    Scheme,
    active_gains,
    select_scheme,
    step_proximity,
)
from .render import INITIAL_POSE, Renderer, RenderState, TrackBundle
from .scene import LAYER_IDS, SceneDescriptor, scene_hash

LOG_FORMAT = "proxmix-session"
LOG_VERSION = 1

AUDIO_MODES = ("pcm", "gains")


class SessionLogError(ValueError):
    """A session log that cannot be replayed against the given scene."""


@dataclass(frozen=True)
class SessionState:
    """Complete externally visible session state, for snapshots and replay."""

    session_id: str
    scheme: Scheme
    mixer: MixerState
    pose: Pose
    proximity: ProximityState
    render_state: RenderState
    clock_samples: int

    def clock_seconds(self, sample_rate: int) -> float:
        return self.clock_samples / sample_rate


def _hull_outline_xz(triangles: np.ndarray) -> list[list[float]]:
    """Ordered convex outline of the mesh footprint on the floor plane."""
    pts = np.unique(triangles.reshape(-1, 3)[:, [0, 2]], axis=0)
    try:
        from scipy.spatial import ConvexHull

        hull = ConvexHull(pts)
        ordered = pts[hull.vertices]
    except Exception:
        # Degenerate footprint (e.g. a single vertical triangle): fall back
        # to the axis-aligned bounding rectangle.
        x0, z0 = pts.min(axis=0)
        x1, z1 = pts.max(axis=0)
        ordered = np.array([[x0, z0], [x1, z0], [x1, z1], [x0, z1]])
    return [[float(x), float(z)] for x, z in ordered]


def scene_summary(scene: SceneDescriptor) -> dict:
    """What a UI needs to draw the floor plan, in world coordinates."""
    consts = scene.constants
    return {
        "scene_hash": scene_hash(scene),
        "sample_rate": consts.sample_rate,
        "block_frames": consts.block_frames,
        "layers": list(LAYER_IDS),
        "constants": {
            "glow_on": consts.glow_on,
            "glow_off": consts.glow_off,
            "r_inner": consts.r_inner,
            "r_outer": consts.r_outer,
            "touch_eps": consts.touch_eps,
        },
        "hologram_outline": _hull_outline_xz(scene.world_triangles),
        "panels": [
            {
                "layer": p.source,
                "center": [float(scene.panel_world[p.source][0]),
                           float(scene.panel_world[p.source][2])],
                "side": p.side,
            }
            for p in scene.panels
        ],
        "sources": {
            scheme: [[float(v) for v in row]
                     for row in scene.source_world[scheme]]
            for scheme in ("A", "B")
        },
        "mixer": [scene.mixer_world.x, scene.mixer_world.z],
        "floor_bounds": list(scene.floor_bounds),
        "tracks": {layer: f"/tracks/{layer}" for layer in LAYER_IDS},
    }


def _require_number(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {value!r}")
    return float(value)


_ALLOWED_KEYS = {
    "hello": {"type", "audio_mode"},
    "pose": {"type", "x", "y", "z", "yaw"},
    "slider": {"type", "layer", "value"},
    "scheme": {"type", "value"},
    "bye": {"type"},
}


class Session:
    """One user's live session: state machine plus audio chunk producer."""

    def __init__(
        self,
        scene: SceneDescriptor,
        session_id: str | None = None,
        tracks: TrackBundle | None = None,
        audio_mode: str = "pcm",
        log_path: str | Path | None = None,
    ):
        if audio_mode not in AUDIO_MODES:
            raise ValueError(f"audio_mode must be one of {AUDIO_MODES}")
        self.scene = scene
        self.session_id = session_id or uuid.uuid4().hex[:12]
        self.audio_mode = audio_mode
        self.scheme = Scheme.A
        self.mixer = MixerState()
        self.pose = INITIAL_POSE
        self.proximity = ProximityState()
        self.renderer = Renderer(
            scene,
            tracks=tracks if tracks is not None
            else (TrackBundle.from_scene(scene) if audio_mode == "pcm"
                  else TrackBundle.silent(scene)),
        )
        self.seq = 0
        self.drops = 0
        self.closed = False
        self.hello_received = False
        self._log: IO[str] | None = None
        if log_path is not None:
            self._log = open(log_path, "w", encoding="utf-8")
            self._write_log_line({
                "log": LOG_FORMAT,
                "version": LOG_VERSION,
                "session": self.session_id,
                "scene_hash": scene_hash(scene),
                "audio_mode": self.audio_mode,
            })

    # -- clock ------------------------------------------------------------

    @property
    def clock_samples(self) -> int:
        return self.renderer.state.sample_clock

    @property
    def clock_seconds(self) -> float:
        return self.clock_samples / self.scene.constants.sample_rate

    # -- logging ----------------------------------------------------------

    def _write_log_line(self, record: dict) -> None:
        if self._log is not None:
            self._log.write(json.dumps(record) + "\n")
            self._log.flush()

    def _log_message(self, msg: dict) -> None:
        self._write_log_line({"t_samples": self.clock_samples, "msg": msg})

    def close(self) -> None:
        if self._log is not None:
            self._write_log_line({"close": True, "t_samples": self.clock_samples})
            self._log.close()
            self._log = None
        self.closed = True

    # -- message handling -------------------------------------------------

    def handle(self, msg) -> list[dict]:
        """Process one inbound message; returns the response messages."""
        if self.closed:
            return [self._error("closed", "session already closed")]
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            return [self._error("malformed", "messages are objects with a 'type'")]
        kind = msg["type"]
        if kind not in _ALLOWED_KEYS:
            return [self._error("unknown_type", f"unknown message type {kind!r}")]
        extra = set(msg) - _ALLOWED_KEYS[kind]
        if extra:
            return [self._error(
                "malformed", f"unexpected fields for {kind}: {sorted(extra)}"
            )]
        try:
            if kind == "hello":
                return self._on_hello(msg)
            if kind == "pose":
                return self._on_pose(msg)
            if kind == "slider":
                return self._on_slider(msg)
            if kind == "scheme":
                return self._on_scheme(msg)
            return self._on_bye(msg)
        except ValueError as exc:
            return [self._error("malformed", str(exc))]

    def _on_hello(self, msg: dict) -> list[dict]:
        mode = msg.get("audio_mode", self.audio_mode)
        if mode not in AUDIO_MODES:
            raise ValueError(f"audio_mode must be one of {AUDIO_MODES}")
        self.audio_mode = mode
        self.hello_received = True
        self._log_message({"type": "hello", "audio_mode": mode})
        welcome = {
            "type": "welcome",
            "clock": self.clock_seconds,
            "session": self.session_id,
            "audio_mode": self.audio_mode,
            "scene": scene_summary(self.scene),
        }
        return [welcome, self.telemetry()]

    def _on_pose(self, msg: dict) -> list[dict]:
        x = _require_number(msg.get("x"))
        y = _require_number(msg.get("y"))
        z = _require_number(msg.get("z"))
        yaw = normalize_yaw(_require_number(msg.get("yaw")))
        pose = Pose(position=Vec3(x, y, z), yaw=yaw)
        self._log_message({"type": "pose", "x": x, "y": y, "z": z, "yaw": yaw})
        self.pose = pose
        self.proximity, events = step_proximity(
            self.proximity, pose, self.scene, self.clock_seconds
        )
        self._sync_renderer()
        return [self.telemetry(events)]

    def _on_slider(self, msg: dict) -> list[dict]:
        layer = msg.get("layer")
        if layer not in LAYER_IDS:
            raise ValueError(f"layer must be one of {LAYER_IDS}, got {layer!r}")
        value = _require_number(msg.get("value"))
        self._log_message({"type": "slider", "layer": layer, "value": value})
        clamped = min(1.0, max(0.0, value))
        self.mixer = self.mixer.with_slider(layer, clamped)
        self._sync_renderer()
        return [self.telemetry()]

    def _on_scheme(self, msg: dict) -> list[dict]:
        value = msg.get("value")
        if value not in ("A", "B"):
            raise ValueError(f"scheme must be 'A' or 'B', got {value!r}")
        self._log_message({"type": "scheme", "value": value})
        self.scheme, self.mixer = select_scheme(
            self.scheme, Scheme(value), self.mixer
        )
        self._sync_renderer()
        return [self.telemetry()]

    def _on_bye(self, msg: dict) -> list[dict]:
        self.close()
        return []

    def _sync_renderer(self) -> None:
        self.renderer.set_control(self.pose, self.scheme, self.mixer)

    def _error(self, code: str, message: str) -> dict:
        return {
            "type": "error",
            "clock": self.clock_seconds,
            "code": code,
            "message": message,
        }

    # -- outbound ---------------------------------------------------------

    def telemetry(self, events: list[InteractionEvent] | None = None) -> dict:
        """Authoritative state report; gains recomputed, never cached."""
        gains = active_gains(self.scheme, self.mixer, self.pose, self.scene)
        msg = {
            "type": "telemetry",
            "clock": self.clock_seconds,
            "scheme": self.scheme.value,
            "sliders": {layer: getattr(self.mixer, layer) for layer in LAYER_IDS},
            "gains": {layer: getattr(gains, layer) for layer in LAYER_IDS},
            "glow": {layer: self.proximity.is_near(layer) for layer in LAYER_IDS},
            "touch": self.proximity.touching,
        }
        if events:
            msg["events"] = [
                {"kind": ev.kind.value, "target": ev.target, "time": ev.time}
                for ev in events
            ]
        return msg

    def render_chunk(self) -> dict:
        """Render one block and wrap it as a sequenced PCM audio message."""
        block = self.renderer.render_block()
        pcm = base64.b64encode(block.interleaved_int16().tobytes()).decode("ascii")
        msg = {
            "type": "audio",
            "clock": self.clock_seconds,
            "seq": self.seq,
            "frames": block.frames,
            "drops": self.drops,
            "pcm": pcm,
        }
        self.seq += 1
        return msg

    def advance_to(self, t_samples: int) -> None:
        """Render (and discard) blocks until the clock reaches t_samples."""
        block = self.scene.constants.block_frames
        while self.clock_samples < t_samples:
            n = min(block, t_samples - self.clock_samples)
            self.renderer.render_block(n)

    def snapshot(self) -> SessionState:
        return SessionState(
            session_id=self.session_id,
            scheme=self.scheme,
            mixer=self.mixer,
            pose=self.pose,
            proximity=self.proximity,
            render_state=self.renderer.state.copy(),
            clock_samples=self.clock_samples,
        )


def replay_log(
    scene: SceneDescriptor,
    log_path: str | Path,
    tracks: TrackBundle | None = None,
) -> SessionState:
    """Reprocess a session log, reproducing the final live state exactly."""
    try:
        text = Path(log_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SessionLogError(f"cannot read log {log_path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SessionLogError("empty log file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SessionLogError(f"corrupt header line: {exc}") from exc
    if not isinstance(header, dict) or header.get("log") != LOG_FORMAT:
        raise SessionLogError("not a session log (bad header)")
    if header.get("scene_hash") != scene_hash(scene):
        raise SessionLogError(
            "scene hash mismatch: log was recorded against a different scene"
        )
    audio_mode = header.get("audio_mode", "pcm")
    if audio_mode not in AUDIO_MODES:
        raise SessionLogError(f"bad audio_mode in header: {audio_mode!r}")
    session = Session(
        scene,
        session_id=header.get("session"),
        tracks=tracks if tracks is not None
        else (TrackBundle.from_scene(scene) if audio_mode == "pcm"
              else TrackBundle.silent(scene)),
        audio_mode=audio_mode,
    )
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SessionLogError(f"corrupt record at line {lineno}: {exc}") from exc
        if not isinstance(rec, dict):
            raise SessionLogError(f"corrupt record at line {lineno}")
        t = rec.get("t_samples")
        if isinstance(t, bool) or not isinstance(t, int) or t < 0:
            raise SessionLogError(f"bad t_samples at line {lineno}: {t!r}")
        session.advance_to(t)
        if rec.get("close"):
            break
        msg = rec.get("msg")
        if not isinstance(msg, dict):
            raise SessionLogError(f"record without message at line {lineno}")
        responses = session.handle(msg)
        for resp in responses:
            if resp.get("type") == "error":
                raise SessionLogError(
                    f"logged message rejected on replay at line {lineno}: "
                    f"{resp.get('message')}"
                )
    return session.snapshot()
