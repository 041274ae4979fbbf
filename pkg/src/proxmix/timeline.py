"""Scripted control timelines for offline rendering.

A timeline is an ordered list of timestamped control events — pose moves,
slider sets, scheme switches — plus a total duration. On disk it is
JSON-lines, one event per line:

    {"t": 1.25, "type": "pose", "x": 0.0, "y": 1.6, "z": 2.0, "yaw": 90.0}
    {"t": 2.0,  "type": "slider", "layer": "natural", "value": 0.5}
    {"t": 3.5,  "type": "scheme", "value": "B"}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .geometry import Pose, Vec3
from .scene import LAYER_IDS


class TimelineError(ValueError):
    """A malformed timeline document."""


@dataclass(frozen=True)
class PoseUpdate:
    pose: Pose


@dataclass(frozen=True)
class SliderSet:
    layer: str
    value: float

    def __post_init__(self):
        if self.layer not in LAYER_IDS:
            raise TimelineError(f"unknown layer {self.layer!r}")
        if not math.isfinite(self.value):
            raise TimelineError(f"slider value must be finite: {self.value!r}")


@dataclass(frozen=True)
class SchemeSelect:
    value: str

    def __post_init__(self):
        if self.value not in ("A", "B"):
            raise TimelineError(f"scheme must be 'A' or 'B', got {self.value!r}")


Payload = PoseUpdate | SliderSet | SchemeSelect


@dataclass(frozen=True)
class TimelineEvent:
    t: float
    payload: Payload


@dataclass(frozen=True)
class Timeline:
    events: tuple[TimelineEvent, ...]
    duration: float

    def __post_init__(self):
        if not math.isfinite(self.duration) or self.duration < 0.0:
            raise TimelineError(f"duration must be non-negative: {self.duration}")
        last = 0.0
        for ev in self.events:
            if not math.isfinite(ev.t) or ev.t < 0.0:
                raise TimelineError(f"event time must be non-negative: {ev.t}")
            if ev.t < last:
                raise TimelineError(
                    f"event times must be non-decreasing: {ev.t} after {last}"
                )
            if ev.t > self.duration:
                raise TimelineError(
                    f"event at t={ev.t} beyond duration {self.duration}"
                )
            last = ev.t


def _event_from_record(rec: dict, lineno: int) -> TimelineEvent:
    where = f"line {lineno}"
    if not isinstance(rec, dict):
        raise TimelineError(f"{where}: expected an object")
    if "t" not in rec or "type" not in rec:
        raise TimelineError(f"{where}: events need 't' and 'type'")
    t = rec["t"]
    if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t):
        raise TimelineError(f"{where}: bad event time {t!r}")
    kind = rec["type"]
    keys = set(rec)
    if kind == "pose":
        if keys != {"t", "type", "x", "y", "z", "yaw"}:
            raise TimelineError(f"{where}: pose needs exactly x, y, z, yaw")
        try:
            pose = Pose(
                position=Vec3(rec["x"], rec["y"], rec["z"]),
                yaw=float(rec["yaw"]),
            )
        except (TypeError, ValueError) as exc:
            raise TimelineError(f"{where}: {exc}") from exc
        payload: Payload = PoseUpdate(pose=pose)
    elif kind == "slider":
        if keys != {"t", "type", "layer", "value"}:
            raise TimelineError(f"{where}: slider needs exactly layer, value")
        value = rec["value"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TimelineError(f"{where}: bad slider value {value!r}")
        payload = SliderSet(layer=rec["layer"], value=float(value))
    elif kind == "scheme":
        if keys != {"t", "type", "value"}:
            raise TimelineError(f"{where}: scheme needs exactly value")
        payload = SchemeSelect(value=rec["value"])
    else:
        raise TimelineError(f"{where}: unknown event type {kind!r}")
    return TimelineEvent(t=float(t), payload=payload)


def load_timeline(path: str | Path, duration: float | None = None) -> Timeline:
    """Read a JSON-lines timeline; duration defaults to the last event time."""
    events: list[TimelineEvent] = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TimelineError(f"cannot read timeline {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TimelineError(f"line {lineno}: invalid JSON: {exc}") from exc
        events.append(_event_from_record(rec, lineno))
    if duration is None:
        duration = events[-1].t if events else 0.0
    return Timeline(events=tuple(events), duration=float(duration))


def dump_timeline(timeline: Timeline, path: str | Path) -> None:
    """Write a timeline in the JSON-lines wire format."""
    lines = []
    for ev in timeline.events:
        p = ev.payload
        if isinstance(p, PoseUpdate):
            rec = {
                "t": ev.t, "type": "pose",
                "x": p.pose.position.x, "y": p.pose.position.y,
                "z": p.pose.position.z, "yaw": p.pose.yaw,
            }
        elif isinstance(p, SliderSet):
            rec = {"t": ev.t, "type": "slider", "layer": p.layer, "value": p.value}
        else:
            rec = {"t": ev.t, "type": "scheme", "value": p.value}
        lines.append(json.dumps(rec))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""),
                          encoding="utf-8")
