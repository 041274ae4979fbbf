"""Installation scenes: the sculpture, its anchor, layers, sources, panels.

A scene file is a UTF-8 JSON document with top-level keys `anchor`,
`hologram`, `layers`, `sources`, `panels`, `constants` and (optionally)
`mixer`. The hologram is either an inline triangle list or a `mesh_path`
pointing at a Wavefront-OBJ-subset file (`v` and triangular `f` records
only). Unknown keys are rejected everywhere so typos fail loudly.

A loaded SceneDescriptor is immutable and safe to share between sessions.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .geometry import AnchorFrame, Vec3, transform_points, triangle_area
from .kernels import mesh_distance

LAYER_IDS = ("natural", "human", "radio")
SCHEMES = ("A", "B")

# Triangles below this area are degenerate: under float noise, above a

# genuinely collapsed face.
MIN_TRIANGLE_AREA = 1e-9

_CONSTANT_DEFAULTS = {
    "glow_on": 1.5,
    "glow_off": 1.65,
    "r_inner": 0.75,
    "r_outer": 3.0,
    "touch_eps": 0.1,
    "d_ref": 1.0,
    "ramp_ms": 20.0,
    "sample_rate": 48000,
    "block_frames": 128,
    "slider_curve": "linear",
}


class SceneError(ValueError):
    """A malformed scene document, reported with the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.detail = message
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class AudioLayer:
    id: str
    media: str
    duration: float


@dataclass(frozen=True)
class SourceNode:
    layer: str
    scheme: str
    position_local: Vec3


@dataclass(frozen=True)
class FloorPanel:
    center: Vec3
    side: float
    source: str


@dataclass(frozen=True)
class SceneConstants:
    glow_on: float = 1.5
    glow_off: float = 1.65
    r_inner: float = 0.75
    r_outer: float = 3.0
    touch_eps: float = 0.1
    d_ref: float = 1.0
    ramp_ms: float = 20.0
    sample_rate: int = 48000
    block_frames: int = 128
    slider_curve: str = "linear"

    @property
    def ramp_samples(self) -> int:
        return max(1, int(round(self.ramp_ms / 1000.0 * self.sample_rate)))


@dataclass(frozen=True, eq=False)
class InvisibleHologram:
    """Unrendered stand-in mesh for the physical sculpture, anchor-local."""

    triangles: np.ndarray  # (n, 3, 3)
    visible: bool = False


@dataclass(frozen=True, eq=False)
class SceneDescriptor:
    anchor: AnchorFrame
    hologram: InvisibleHologram
    layers: tuple[AudioLayer, ...]
    sources: tuple[SourceNode, ...]
    panels: tuple[FloorPanel, ...]
    constants: SceneConstants
    mixer_local: Vec3 | None = None

    @cached_property
    def world_triangles(self) -> np.ndarray:
        """Hologram triangles in world coordinates, (n, 3, 3)."""
        return transform_points(self.anchor, self.hologram.triangles)

    @cached_property
    def source_world(self) -> dict[str, np.ndarray]:
        """Per scheme, (3, 3) array of world source positions in layer order."""
        out = {}
        for scheme in SCHEMES:
            rows = []
            for layer in LAYER_IDS:
                node = next(
                    s for s in self.sources
                    if s.scheme == scheme and s.layer == layer
                )
                rows.append(node.position_local.to_array())
            out[scheme] = transform_points(self.anchor, np.array(rows))
        return out

    @cached_property
    def panel_world(self) -> dict[str, np.ndarray]:
        """World-space panel centers keyed by the layer they mark."""
        out = {}
        for panel in self.panels:
            out[panel.source] = transform_points(
                self.anchor, panel.center.to_array()[None, :]
            )[0]
        return out

    @cached_property
    def mixer_world(self) -> Vec3:
        """World position of the UI mixer frame (plan-view cosmetics only)."""
        if self.mixer_local is not None:
            local = self.mixer_local.to_array()
        else:
            centroid = self.hologram.triangles.reshape(-1, 3).mean(axis=0)
            local = np.array([centroid[0], 0.0, centroid[2] - 1.5])
        return Vec3.from_array(transform_points(self.anchor, local[None, :])[0])

    @cached_property
    def floor_bounds(self) -> tuple[float, float, float, float]:
        """(min_x, min_z, max_x, max_z) covering everything, with margin."""
        pts = [self.world_triangles.reshape(-1, 3)[:, [0, 2]]]
        for scheme in SCHEMES:
            pts.append(self.source_world[scheme][:, [0, 2]])
        for panel in self.panels:
            c = self.panel_world[panel.source]
            half = panel.side / 2.0
            pts.append(np.array([[c[0] - half, c[2] - half],
                                 [c[0] + half, c[2] + half]]))
        m = self.mixer_world
        pts.append(np.array([[m.x, m.z]]))
        allpts = np.vstack(pts)
        margin = self.constants.r_outer * 0.5
        return (
            float(allpts[:, 0].min() - margin),
            float(allpts[:, 1].min() - margin),
            float(allpts[:, 0].max() + margin),
            float(allpts[:, 1].max() + margin),
        )

    def layer_by_id(self, layer_id: str) -> AudioLayer:
        return next(l for l in self.layers if l.id == layer_id)


# ---------------------------------------------------------------------------
# Parsing and validation
# ---------------------------------------------------------------------------

def _check_keys(obj: dict, allowed: set[str], required: set[str], path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise SceneError(f"{path}.{key}" if path else key, "unknown key")
    for key in required:
        if key not in obj:
            raise SceneError(f"{path}.{key}" if path else key, "missing key")


def _num(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise SceneError(path, f"expected a finite number, got {value!r}")
    return float(value)


def _vec3(value, path: str) -> Vec3:
    if not isinstance(value, list) or len(value) != 3:
        raise SceneError(path, "expected [x, y, z]")
    return Vec3(*(_num(v, f"{path}[{i}]") for i, v in enumerate(value)))


def _yaw(value, path: str) -> float:
    yaw = _num(value, path)
    if not (-180.0 <= yaw < 180.0):
        raise SceneError(path, f"yaw must be in [-180, 180), got {yaw}")
    return yaw


def load_obj_mesh(path: Path) -> np.ndarray:
    """Read a Wavefront OBJ subset: `v` records and triangular `f` records."""
    vertices: list[list[float]] = []
    faces: list[tuple[int, int, int]] = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SceneError("hologram.mesh_path", f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        where = f"hologram.mesh_path:{lineno}"
        if parts[0] == "v":
            if len(parts) != 4:
                raise SceneError(where, f"vertex record needs 3 coordinates: {raw!r}")
            try:
                vertices.append([float(p) for p in parts[1:]])
            except ValueError as exc:
                raise SceneError(where, f"bad vertex coordinate: {raw!r}") from exc
        elif parts[0] == "f":
            if len(parts) != 4:
                raise SceneError(where, f"only triangular faces are supported: {raw!r}")
            try:
                idx = tuple(int(p.split("/")[0]) for p in parts[1:])
            except ValueError as exc:
                raise SceneError(where, f"bad face index: {raw!r}") from exc
            if any(i < 1 or i > len(vertices) for i in idx):
                raise SceneError(where, f"face index out of range: {raw!r}")
            faces.append((idx[0] - 1, idx[1] - 1, idx[2] - 1))
        else:
            raise SceneError(where, f"unsupported record {parts[0]!r}")
    if not faces:
        raise SceneError("hologram.mesh_path", "mesh has no faces")
    varr = np.array(vertices, dtype=np.float64)
    return varr[np.array(faces, dtype=np.intp)]


def _parse_hologram(obj, base_dir: Path | None, path: str) -> InvisibleHologram:
    if not isinstance(obj, dict):
        raise SceneError(path, "expected an object")
    _check_keys(obj, {"triangles", "mesh_path", "visible"}, set(), path)
    if ("triangles" in obj) == ("mesh_path" in obj):
        raise SceneError(path, "provide exactly one of `triangles` or `mesh_path`")
    if "mesh_path" in obj:
        mesh_path = Path(obj["mesh_path"])
        if not mesh_path.is_absolute() and base_dir is not None:
            mesh_path = base_dir / mesh_path
        tris = load_obj_mesh(mesh_path)
    else:
        raw = obj["triangles"]
        if not isinstance(raw, list) or not raw:
            raise SceneError(f"{path}.triangles", "expected a non-empty list")
        tris = np.empty((len(raw), 3, 3), dtype=np.float64)
        for i, tri in enumerate(raw):
            if not isinstance(tri, list) or len(tri) != 3:
                raise SceneError(f"{path}.triangles[{i}]", "expected 3 vertices")
            for j, vert in enumerate(tri):
                v = _vec3(vert, f"{path}.triangles[{i}][{j}]")
                tris[i, j] = v.to_array()
    visible = obj.get("visible", False)
    if not isinstance(visible, bool):
        raise SceneError(f"{path}.visible", "expected a boolean")
    if visible:
        raise SceneError(f"{path}.visible", "visible holograms are not supported")
    for i in range(tris.shape[0]):
        if not np.all(np.isfinite(tris[i])):
            raise SceneError(f"{path}.triangles[{i}]", "non-finite vertex")
        if triangle_area(tris[i]) <= MIN_TRIANGLE_AREA:
            raise SceneError(f"{path}.triangles[{i}]", "degenerate triangle")
    return InvisibleHologram(triangles=tris, visible=False)


def _parse_layers(obj, base_dir: Path | None, path: str) -> tuple[AudioLayer, ...]:
    if not isinstance(obj, list):
        raise SceneError(path, "expected a list")
    if len(obj) != 3:
        raise SceneError(path, f"exactly three layers required, got {len(obj)}")
    layers = []
    seen = set()
    for i, raw in enumerate(obj):
        where = f"{path}[{i}]"
        if not isinstance(raw, dict):
            raise SceneError(where, "expected an object")
        _check_keys(raw, {"id", "media", "duration"}, {"id", "media", "duration"}, where)
        layer_id = raw["id"]
        if layer_id not in LAYER_IDS:
            raise SceneError(f"{where}.id", f"layer id must be one of {LAYER_IDS}")
        if layer_id in seen:
            raise SceneError(f"{where}.id", f"duplicate layer id {layer_id!r}")
        seen.add(layer_id)
        media = raw["media"]
        if not isinstance(media, str) or not media:
            raise SceneError(f"{where}.media", "expected a file path")
        media_path = Path(media)
        if not media_path.is_absolute() and base_dir is not None:
            media_path = base_dir / media_path
        duration = _num(raw["duration"], f"{where}.duration")
        if duration <= 0.0:
            raise SceneError(f"{where}.duration", "duration must be positive")
        layers.append(AudioLayer(id=layer_id, media=str(media_path), duration=duration))
    return tuple(layers)


def _parse_sources(obj, path: str) -> tuple[SourceNode, ...]:
    if not isinstance(obj, list):
        raise SceneError(path, "expected a list")
    sources = []
    for i, raw in enumerate(obj):
        where = f"{path}[{i}]"
        if not isinstance(raw, dict):
            raise SceneError(where, "expected an object")
        _check_keys(raw, {"layer", "scheme", "position"},
                    {"layer", "scheme", "position"}, where)
        if raw["layer"] not in LAYER_IDS:
            raise SceneError(f"{where}.layer", f"layer must be one of {LAYER_IDS}")
        if raw["scheme"] not in SCHEMES:
            raise SceneError(f"{where}.scheme", "scheme must be 'A' or 'B'")
        pos = _vec3(raw["position"], f"{where}.position")
        sources.append(SourceNode(layer=raw["layer"], scheme=raw["scheme"],
                                  position_local=pos))
    for scheme in SCHEMES:
        per = [s for s in sources if s.scheme == scheme]
        have = sorted(s.layer for s in per)
        if have != sorted(LAYER_IDS):
            raise SceneError(path, f"scheme {scheme} needs one source per layer, got {have}")
    a_positions = {(s.position_local.x, s.position_local.y, s.position_local.z)
                   for s in sources if s.scheme == "A"}
    if len(a_positions) != 1:
        raise SceneError(path, "scheme A sources must share one position")
    b_tri = np.array([
        next(s for s in sources if s.scheme == "B" and s.layer == layer)
        .position_local.to_array()
        for layer in LAYER_IDS
    ])
    if triangle_area(b_tri) <= MIN_TRIANGLE_AREA:
        raise SceneError(path, "scheme B sources form a degenerate triangle")
    return tuple(sources)


def _parse_panels(obj, sources: tuple[SourceNode, ...], path: str) -> tuple[FloorPanel, ...]:
    if not isinstance(obj, list):
        raise SceneError(path, "expected a list")
    if len(obj) != 3:
        raise SceneError(path, f"exactly three panels required, got {len(obj)}")
    panels = []
    seen = set()
    for i, raw in enumerate(obj):
        where = f"{path}[{i}]"
        if not isinstance(raw, dict):
            raise SceneError(where, "expected an object")
        _check_keys(raw, {"center", "side", "source"},
                    {"center", "side", "source"}, where)
        center = _vec3(raw["center"], f"{where}.center")
        if center.y != 0.0:
            raise SceneError(f"{where}.center", "panel center must have y = 0")
        side = _num(raw["side"], f"{where}.side")
        if side <= 0.0:
            raise SceneError(f"{where}.side", "side must be positive")
        source_layer = raw["source"]
        if source_layer not in LAYER_IDS:
            raise SceneError(f"{where}.source", f"source must be one of {LAYER_IDS}")
        if source_layer in seen:
            raise SceneError(f"{where}.source", f"duplicate panel for {source_layer!r}")
        seen.add(source_layer)
        node = next(s for s in sources if s.scheme == "B" and s.layer == source_layer)
        if (abs(center.x - node.position_local.x) > 1e-9
                or abs(center.z - node.position_local.z) > 1e-9):
            raise SceneError(f"{where}.center",
                             "panel must sit directly below its source (same x, z)")
        panels.append(FloorPanel(center=center, side=side, source=source_layer))
    return tuple(panels)


def _parse_constants(obj, path: str) -> SceneConstants:
    if not isinstance(obj, dict):
        raise SceneError(path, "expected an object")
    _check_keys(obj, set(_CONSTANT_DEFAULTS), set(), path)
    values = dict(_CONSTANT_DEFAULTS)
    for key, raw in obj.items():
        where = f"{path}.{key}"
        if key == "slider_curve":
            if raw not in ("linear", "squared"):
                raise SceneError(where, "slider_curve must be 'linear' or 'squared'")
            values[key] = raw
        elif key in ("sample_rate", "block_frames"):
            if isinstance(raw, bool) or not isinstance(raw, int):
                raise SceneError(where, f"expected an integer, got {raw!r}")
            if raw <= 0:
                raise SceneError(where, "must be positive")
            values[key] = raw
        else:
            v = _num(raw, where)
            if v <= 0.0:
                raise SceneError(where, "must be positive")
            values[key] = v
    if not (values["glow_off"] > values["glow_on"] > 0.0):
        raise SceneError(f"{path}.glow_off",
                         "constants must satisfy glow_off > glow_on > 0")
    if not (values["r_outer"] > values["r_inner"] > 0.0):
        raise SceneError(f"{path}.r_outer",
                         "constants must satisfy r_outer > r_inner > 0")
    return SceneConstants(**values)


def parse_scene(doc: dict, base_dir: Path | None = None) -> SceneDescriptor:
    """Validate a decoded scene document and build the descriptor."""
    if not isinstance(doc, dict):
        raise SceneError("", "scene document must be a JSON object")
    _check_keys(
        doc,
        {"anchor", "hologram", "layers", "sources", "panels", "constants", "mixer"},
        {"anchor", "hologram", "layers", "sources", "panels"},
        "",
    )
    anchor_raw = doc["anchor"]
    if not isinstance(anchor_raw, dict):
        raise SceneError("anchor", "expected an object")
    _check_keys(anchor_raw, {"origin", "yaw"}, {"origin", "yaw"}, "anchor")
    anchor = AnchorFrame(
        origin=_vec3(anchor_raw["origin"], "anchor.origin"),
        yaw=_yaw(anchor_raw["yaw"], "anchor.yaw"),
    )
    hologram = _parse_hologram(doc["hologram"], base_dir, "hologram")
    layers = _parse_layers(doc["layers"], base_dir, "layers")
    sources = _parse_sources(doc["sources"], "sources")
    panels = _parse_panels(doc["panels"], sources, "panels")
    constants = _parse_constants(doc.get("constants", {}), "constants")
    mixer = _vec3(doc["mixer"], "mixer") if "mixer" in doc else None
    return SceneDescriptor(
        anchor=anchor,
        hologram=hologram,
        layers=layers,
        sources=sources,
        panels=panels,
        constants=constants,
        mixer_local=mixer,
    )


def load_scene(path: str | Path) -> SceneDescriptor:
    """Load and validate a scene file; relative paths resolve beside it."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SceneError("", f"cannot read scene file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError("", f"invalid JSON: {exc}") from exc
    return parse_scene(doc, base_dir=path.resolve().parent)


def loads_scene(text: str, base_dir: Path | None = None) -> SceneDescriptor:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError("", f"invalid JSON: {exc}") from exc
    return parse_scene(doc, base_dir=base_dir)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_scene(scene: SceneDescriptor) -> dict:
    """Canonical document form; triangles are inlined, defaults made explicit."""
    doc = {
        "anchor": {
            "origin": [scene.anchor.origin.x, scene.anchor.origin.y,
                       scene.anchor.origin.z],
            "yaw": scene.anchor.yaw,
        },
        "hologram": {
            "triangles": scene.hologram.triangles.tolist(),
            "visible": scene.hologram.visible,
        },
        "layers": [
            {"id": l.id, "media": l.media, "duration": l.duration}
            for l in scene.layers
        ],
        "sources": [
            {
                "layer": s.layer,
                "scheme": s.scheme,
                "position": [s.position_local.x, s.position_local.y,
                             s.position_local.z],
            }
            for s in scene.sources
        ],
        "panels": [
            {
                "center": [p.center.x, p.center.y, p.center.z],
                "side": p.side,
                "source": p.source,
            }
            for p in scene.panels
        ],
        "constants": {
            "glow_on": scene.constants.glow_on,
            "glow_off": scene.constants.glow_off,
            "r_inner": scene.constants.r_inner,
            "r_outer": scene.constants.r_outer,
            "touch_eps": scene.constants.touch_eps,
            "d_ref": scene.constants.d_ref,
            "ramp_ms": scene.constants.ramp_ms,
            "sample_rate": scene.constants.sample_rate,
            "block_frames": scene.constants.block_frames,
            "slider_curve": scene.constants.slider_curve,
        },
    }
    if scene.mixer_local is not None:
        doc["mixer"] = [scene.mixer_local.x, scene.mixer_local.y,
                        scene.mixer_local.z]
    return doc


def scene_hash(scene: SceneDescriptor) -> str:
    """Content digest of the canonicalized scene document."""
    canonical = json.dumps(serialize_scene(scene), sort_keys=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def point_mesh_distance(
    p: Vec3, hologram: InvisibleHologram, anchor: AnchorFrame
) -> float:
    """Minimum distance from a world-space point to the hologram surface."""
    world = transform_points(anchor, hologram.triangles)
    return mesh_distance(p.to_array(), world)
