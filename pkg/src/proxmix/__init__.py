"""proxmix: a proximity-mixed AR sound-installation engine.

Pure-software recreation of a walk-around sonic sculpture: an invisible
stand-in mesh for the sculpture, three looping sound layers mixed either
with virtual sliders or by where the listener stands, panned to stereo,
served live over WebSocket or rendered offline to WAV.
"""

from .geometry import AnchorFrame, Pose, Vec3, anchor_to_world, normalize_yaw
from .interaction import (
    EventKind,
    InteractionEvent,
    LayerGains,
    MixerState,
    ProximityState,
    Scheme,
    active_gains,
    nearest_source,
    proximity_gain,
    scheme_a_gains,
    scheme_b_gains,
    select_scheme,
    step_proximity,
    update_proximity,
    update_touch,
)
from .render import (
    AudioBlock,
    Renderer,
    RenderState,
    TrackBundle,
    distance_attenuation,
    pan_gains,
    render_timeline,
    render_timeline_float,
    source_azimuth,
)
from .scene import (
    LAYER_IDS,
    AudioLayer,
    FloorPanel,
    InvisibleHologram,
    SceneConstants,
    SceneDescriptor,
    SceneError,
    SourceNode,
    load_scene,
    loads_scene,
    parse_scene,
    point_mesh_distance,
    scene_hash,
    serialize_scene,
)
from .session import Session, SessionLogError, SessionState, replay_log, scene_summary
from .timeline import (
    PoseUpdate,
    SchemeSelect,
    SliderSet,
    Timeline,
    TimelineError,
    TimelineEvent,
    load_timeline,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorFrame", "Pose", "Vec3", "anchor_to_world", "normalize_yaw",
    "EventKind", "InteractionEvent", "LayerGains", "MixerState",
    "ProximityState", "Scheme", "active_gains", "nearest_source",
    "proximity_gain", "scheme_a_gains", "scheme_b_gains", "select_scheme",
    "step_proximity", "update_proximity", "update_touch",
    "AudioBlock", "Renderer", "RenderState", "TrackBundle",
    "distance_attenuation", "pan_gains", "render_timeline",
    "render_timeline_float", "source_azimuth",
    "LAYER_IDS", "AudioLayer", "FloorPanel", "InvisibleHologram",
    "SceneConstants", "SceneDescriptor", "SceneError", "SourceNode",
    "load_scene", "loads_scene", "parse_scene", "point_mesh_distance",
    "scene_hash", "serialize_scene",
    "Session", "SessionLogError", "SessionState", "replay_log",
    "scene_summary",
    "PoseUpdate", "SchemeSelect", "SliderSet", "Timeline", "TimelineError",
    "TimelineEvent", "load_timeline",
    "__version__",
]
