"""Interaction logic: mixer sliders, proximity mixing, glow and touch events.

Two ways of shaping the three-layer mix:

* Scheme A — explicit sliders on a virtual mixer. Layer gains follow the
  slider values directly (optionally squared for a finer low end).
* Scheme B — walking. Each layer hangs at a fixed point in the room and
  its gain falls off linearly with the listener's distance to that point,
  flat inside ``r_inner`` and silent beyond ``r_outer``.

Glow and touch detection use strict-inequality thresholds with hysteresis
so standing exactly on a boundary never flaps. A panel's glow distance is
measured to its audio source (which floats above the floor square), and
touch distance to the nearest point of the sculpture stand-in mesh. All
distances are full 3-D.

Everything here is pure: state in, state out. Callers keep the state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import Pose
from .kernels import mesh_distance
from .scene import LAYER_IDS, SceneDescriptor

TOUCH_TARGET = "hologram"


class Scheme(str, enum.Enum):
    A = "A"
    B = "B"


class EventKind(str, enum.Enum):
    GLOW_ON = "glow_on"
    GLOW_OFF = "glow_off"
    TOUCH_START = "touch_start"
    TOUCH_END = "touch_end"


@dataclass(frozen=True)
class InteractionEvent:
    kind: EventKind
    target: str  # layer id for glow events, "hologram" for touch events
    time: float  # seconds


@dataclass(frozen=True)
class MixerState:
    """Slider positions in [0, 1], one per layer. Starts all at the bottom."""

    natural: float = 0.0
    human: float = 0.0
    radio: float = 0.0

    def __post_init__(self):
        for layer in LAYER_IDS:
            v = getattr(self, layer)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise TypeError(f"slider {layer} must be a number, got {v!r}")
            if not math.isfinite(v) or not (0.0 <= v <= 1.0):
                raise ValueError(f"slider {layer} out of range [0, 1]: {v}")

    def with_slider(self, layer: str, value: float) -> "MixerState":
        if layer not in LAYER_IDS:
            raise ValueError(f"unknown layer {layer!r}")
        return replace(self, **{layer: float(value)})

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.natural, self.human, self.radio)


@dataclass(frozen=True)
class LayerGains:
    """Per-layer linear amplitudes in [0, 1], order (natural, human, radio)."""

    natural: float
    human: float
    radio: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.natural, self.human, self.radio)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=np.float64)


@dataclass(frozen=True)
class ProximityState:
    """Which panels currently glow, and whether the sculpture is touched."""

    near: frozenset[str] = frozenset()
    touching: bool = False

    def is_near(self, panel: str) -> bool:
        return panel in self.near


def scheme_a_gains(mixer: MixerState, curve: str = "linear") -> LayerGains:
    """Slider positions map straight onto layer gains (identity law)."""
    values = mixer.as_tuple()
    if curve == "squared":
        values = tuple(v * v for v in values)
    elif curve != "linear":
        raise ValueError(f"unknown slider curve {curve!r}")
    return LayerGains(*values)


def proximity_gain(distance: float, r_inner: float, r_outer: float) -> float:
    """Linear rolloff: 1 inside r_inner, 0 beyond r_outer, linear between."""
    if distance <= r_inner:
        return 1.0
    if distance >= r_outer:
        return 0.0
    return (r_outer - distance) / (r_outer - r_inner)


def scheme_b_gains(
    listener: np.ndarray,
    sources: np.ndarray,
    r_inner: float,
    r_outer: float,
) -> LayerGains:
    """Walking mix: each layer's gain from 3-D distance to its source.

    ``sources`` is (3, 3) in layer order (natural, human, radio).
    """
    d = np.linalg.norm(sources - np.asarray(listener, dtype=np.float64), axis=1)
    return LayerGains(*(proximity_gain(float(di), r_inner, r_outer) for di in d))


def nearest_source(listener: np.ndarray, sources: np.ndarray) -> int:
    """Index of the closest source; ties go to the lowest layer index."""
    d = np.linalg.norm(sources - np.asarray(listener, dtype=np.float64), axis=1)
    return int(np.argmin(d))


def active_gains(
    scheme: Scheme,
    mixer: MixerState,
    pose: Pose,
    scene: SceneDescriptor,
) -> LayerGains:
    """Layer gains for the active scheme at the given pose."""
    if scheme == Scheme.A:
        return scheme_a_gains(mixer, scene.constants.slider_curve)
    return scheme_b_gains(
        pose.position.to_array(),
        scene.source_world["B"],
        scene.constants.r_inner,
        scene.constants.r_outer,
    )


def select_scheme(
    current: Scheme, requested: Scheme, mixer: MixerState
) -> tuple[Scheme, MixerState]:
    """Switch schemes; every switch resets the sliders to the bottom."""
    if requested == current:
        return current, mixer
    return requested, MixerState()


def update_proximity(
    state: ProximityState,
    panel: str,
    d: float,
    glow_on: float,
    glow_off: float,
    t: float,
) -> tuple[ProximityState, list[InteractionEvent]]:
    """Advance one panel's glow flag for an observed distance.

    Far→Near (GlowOn) strictly below ``glow_on``; Near→Far (GlowOff)
    strictly above ``glow_off``; anywhere in between the flag holds.
    """
    if state.is_near(panel):
        if d > glow_off:
            new = ProximityState(near=state.near - {panel}, touching=state.touching)
            return new, [InteractionEvent(EventKind.GLOW_OFF, panel, t)]
    else:
        if d < glow_on:
            new = ProximityState(near=state.near | {panel}, touching=state.touching)
            return new, [InteractionEvent(EventKind.GLOW_ON, panel, t)]
    return state, []


def update_touch(
    state: ProximityState,
    d_mesh: float,
    touch_eps: float,
    t: float,
) -> tuple[ProximityState, list[InteractionEvent]]:
    """Advance the sculpture touch flag for an observed surface distance."""
    if not state.touching:
        if d_mesh < touch_eps:
            new = ProximityState(near=state.near, touching=True)
            return new, [InteractionEvent(EventKind.TOUCH_START, TOUCH_TARGET, t)]
    else:
        if d_mesh >= touch_eps:
            new = ProximityState(near=state.near, touching=False)
            return new, [InteractionEvent(EventKind.TOUCH_END, TOUCH_TARGET, t)]
    return state, []


def step_proximity(
    state: ProximityState,
    pose: Pose,
    scene: SceneDescriptor,
    t: float,
) -> tuple[ProximityState, list[InteractionEvent]]:
    """Advance all glow flags and the touch flag for one pose sample.

    Panel glow distances are measured to the scheme-B source above each
    floor square; touch distance to the nearest point of the hologram.
    """
    consts = scene.constants
    p = pose.position.to_array()
    events: list[InteractionEvent] = []
    sources = scene.source_world["B"]
    for i, layer in enumerate(LAYER_IDS):
        d = float(np.linalg.norm(p - sources[i]))
        state, evs = update_proximity(
            state, layer, d, consts.glow_on, consts.glow_off, t
        )
        events.extend(evs)
    d_mesh = mesh_distance(p, scene.world_triangles)
    state, evs = update_touch(state, d_mesh, consts.touch_eps, t)
    events.extend(evs)
    return state, events
