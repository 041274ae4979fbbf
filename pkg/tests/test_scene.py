"""Scene file parsing, validation, serialization, hashing."""

from __future__ import annotations

import copy
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proxmix.scene import (
    SceneError,
    load_obj_mesh,
    load_scene,
    parse_scene,
    scene_hash,
    serialize_scene,
)

TRI_R = 4.0 / math.sqrt(3.0)


def minimal_doc() -> dict:
    return {
        "anchor": {"origin": [0.0, 0.0, 0.0], "yaw": 0.0},
        "hologram": {
            "triangles": [
                [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            ],
        },
        "layers": [
            {"id": "natural", "media": "tracks/natural.wav", "duration": 360.0},
            {"id": "human", "media": "tracks/human.wav", "duration": 360.0},
            {"id": "radio", "media": "tracks/radio.wav", "duration": 360.0},
        ],
        "sources": [
            {"layer": "natural", "scheme": "A", "position": [0.0, 1.0, 0.0]},
            {"layer": "human", "scheme": "A", "position": [0.0, 1.0, 0.0]},
            {"layer": "radio", "scheme": "A", "position": [0.0, 1.0, 0.0]},
            {"layer": "natural", "scheme": "B", "position": [0.0, 1.2, -TRI_R]},
            {"layer": "human", "scheme": "B", "position": [2.0, 1.2, TRI_R / 2]},
            {"layer": "radio", "scheme": "B", "position": [-2.0, 1.2, TRI_R / 2]},
        ],
        "panels": [
            {"center": [0.0, 0.0, -TRI_R], "side": 1.0, "source": "natural"},
            {"center": [2.0, 0.0, TRI_R / 2], "side": 1.0, "source": "human"},
            {"center": [-2.0, 0.0, TRI_R / 2], "side": 1.0, "source": "radio"},
        ],
    }


class TestDefaults:
    def test_minimal_document_gets_shipped_defaults(self):
        scene = parse_scene(minimal_doc())
        c = scene.constants
        assert c.glow_on == 1.5
        assert c.glow_off == 1.65
        assert c.r_inner == 0.75
        assert c.r_outer == 3.0
        assert c.touch_eps == 0.1
        assert c.d_ref == 1.0
        assert c.ramp_ms == 20.0
        assert c.sample_rate == 48000
        assert c.block_frames == 128
        assert c.slider_curve == "linear"
        assert c.ramp_samples == 960

    def test_constants_override(self):
        doc = minimal_doc()
        doc["constants"] = {"glow_on": 1.0, "glow_off": 1.2, "sample_rate": 44100}
        c = parse_scene(doc).constants
        assert (c.glow_on, c.glow_off, c.sample_rate) == (1.0, 1.2, 44100)


class TestValidation:
    def test_duplicate_layer_id(self):
        doc = minimal_doc()
        doc["layers"][1]["id"] = "natural"
        with pytest.raises(SceneError, match="duplicate|needs one source"):
            parse_scene(doc)

    def test_constant_ordering_glow(self):
        doc = minimal_doc()
        doc["constants"] = {"glow_off": 1.4}  # default glow_on = 1.5
        with pytest.raises(SceneError, match="glow_off.*glow_on"):
            parse_scene(doc)

    def test_constant_ordering_rolloff(self):
        doc = minimal_doc()
        doc["constants"] = {"r_inner": 3.5}
        with pytest.raises(SceneError, match="r_outer.*r_inner"):
            parse_scene(doc)

    def test_unknown_top_level_key(self):
        doc = minimal_doc()
        doc["sculptor"] = "unknown"
        with pytest.raises(SceneError, match="sculptor.*unknown key"):
            parse_scene(doc)

    def test_unknown_nested_key_reports_path(self):
        doc = minimal_doc()
        doc["layers"][0]["loop"] = True
        with pytest.raises(SceneError, match=r"layers\[0\]\.loop"):
            parse_scene(doc)

    def test_unknown_constant_rejected(self):
        doc = minimal_doc()
        doc["constants"] = {"glow_onn": 1.5}
        with pytest.raises(SceneError, match="glow_onn"):
            parse_scene(doc)

    def test_degenerate_hologram_triangle(self):
        doc = minimal_doc()
        doc["hologram"]["triangles"] = [
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
        ]
        with pytest.raises(SceneError, match="degenerate"):
            parse_scene(doc)

    def test_scheme_a_sources_must_be_colocated(self):
        doc = minimal_doc()
        doc["sources"][1]["position"] = [0.5, 1.0, 0.0]
        with pytest.raises(SceneError, match="share one position"):
            parse_scene(doc)

    def test_scheme_b_degenerate_triangle(self):
        doc = minimal_doc()
        for i, src in enumerate(doc["sources"]):
            if src["scheme"] == "B":
                src["position"] = [float(i), 1.2, 0.0]
        with pytest.raises(SceneError, match="degenerate"):
            parse_scene(doc)

    def test_panel_must_sit_below_source(self):
        doc = minimal_doc()
        doc["panels"][0]["center"] = [0.1, 0.0, -TRI_R]
        with pytest.raises(SceneError, match="below its source"):
            parse_scene(doc)

    def test_panel_center_off_floor(self):
        doc = minimal_doc()
        doc["panels"][0]["center"] = [0.0, 0.2, -TRI_R]
        with pytest.raises(SceneError, match="y = 0"):
            parse_scene(doc)

    def test_missing_panel(self):
        doc = minimal_doc()
        doc["panels"] = doc["panels"][:2]
        with pytest.raises(SceneError, match="exactly three panels"):
            parse_scene(doc)

    def test_yaw_out_of_range(self):
        doc = minimal_doc()
        doc["anchor"]["yaw"] = 180.0
        with pytest.raises(SceneError, match="yaw"):
            parse_scene(doc)

    def test_non_finite_coordinate(self):
        doc = minimal_doc()
        doc["sources"][0]["position"] = [float("nan"), 1.0, 0.0]
        with pytest.raises(SceneError, match="finite"):
            parse_scene(doc)

    def test_negative_duration(self):
        doc = minimal_doc()
        doc["layers"][0]["duration"] = -1.0
        with pytest.raises(SceneError, match="duration"):
            parse_scene(doc)

    def test_visible_hologram_rejected(self):
        doc = minimal_doc()
        doc["hologram"]["visible"] = True
        with pytest.raises(SceneError, match="visible"):
            parse_scene(doc)

    def test_triangles_and_mesh_path_exclusive(self):
        doc = minimal_doc()
        doc["hologram"]["mesh_path"] = "cones.obj"
        with pytest.raises(SceneError, match="exactly one"):
            parse_scene(doc)

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_random_corruptions_rejected(self, data):
        """Property form of the validation contract: any of these mutation
        families must be rejected with a SceneError."""
        doc = copy.deepcopy(minimal_doc())
        mutation = data.draw(st.sampled_from([
            "drop_key", "rename_key", "bad_type", "extra_key",
            "bad_layer_count", "bad_scheme",
        ]))
        if mutation == "drop_key":
            key = data.draw(st.sampled_from(sorted(doc)))
            del doc[key]
        elif mutation == "rename_key":
            key = data.draw(st.sampled_from(sorted(doc)))
            doc[key + "_x"] = doc.pop(key)
        elif mutation == "bad_type":
            key = data.draw(st.sampled_from(sorted(doc)))
            doc[key] = data.draw(st.sampled_from([42, "nope", None, True]))
        elif mutation == "extra_key":
            where = data.draw(st.sampled_from(["anchor", "hologram"]))
            doc[where]["bogus"] = 1
        elif mutation == "bad_layer_count":
            doc["layers"] = doc["layers"][:data.draw(st.integers(0, 2))]
        elif mutation == "bad_scheme":
            idx = data.draw(st.integers(0, 5))
            doc["sources"][idx]["scheme"] = data.draw(
                st.sampled_from(["C", "a", "", "AB"]))
        with pytest.raises(SceneError):
            parse_scene(doc)


class TestRoundTrip:
    def test_serialize_load_fixed_point(self, scene):
        doc1 = serialize_scene(scene)
        scene2 = parse_scene(doc1)
        doc2 = serialize_scene(scene2)
        assert doc1 == doc2
        assert scene_hash(scene) == scene_hash(scene2)

    def test_serialized_doc_inlines_mesh(self, scene):
        doc = serialize_scene(scene)
        assert "mesh_path" not in doc["hologram"]
        assert len(doc["hologram"]["triangles"]) == 32

    def test_hash_changes_with_content(self):
        a = parse_scene(minimal_doc())
        doc = minimal_doc()
        doc["anchor"]["yaw"] = 10.0
        b = parse_scene(doc)
        assert scene_hash(a) != scene_hash(b)

    def test_hash_stable_across_loads(self, demo_dir):
        h1 = scene_hash(load_scene(demo_dir / "scene.json"))
        h2 = scene_hash(load_scene(demo_dir / "scene.json"))
        assert h1 == h2


class TestObjLoader:
    def test_loads_demo_mesh(self, demo_dir):
        tris = load_obj_mesh(demo_dir / "cones.obj")
        assert tris.shape == (32, 3, 3)

    def test_face_indices_with_slashes(self, tmp_path):
        p = tmp_path / "m.obj"
        p.write_text(
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3\n")
        assert load_obj_mesh(p).shape == (1, 3, 3)

    def test_comments_and_blanks_allowed(self, tmp_path):
        p = tmp_path / "m.obj"
        p.write_text(
            "# header\n\nv 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 3\n")
        assert load_obj_mesh(p).shape == (1, 3, 3)

    def test_quad_face_rejected(self, tmp_path):
        p = tmp_path / "m.obj"
        p.write_text(
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
        with pytest.raises(SceneError, match="triangular"):
            load_obj_mesh(p)

    def test_unsupported_record_rejected(self, tmp_path):
        p = tmp_path / "m.obj"
        p.write_text("v 0 0 0\nvn 0 0 1\n")
        with pytest.raises(SceneError, match="unsupported record"):
            load_obj_mesh(p)

    def test_out_of_range_index(self, tmp_path):
        p = tmp_path / "m.obj"
        p.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n")
        with pytest.raises(SceneError, match="out of range"):
            load_obj_mesh(p)


class TestDerivedGeometry:
    def test_world_positions_in_layer_order(self, scene):
        b = scene.source_world["B"]
        assert b.shape == (3, 3)
        # Equilateral: all pairwise distances 4 m, preserved by the anchor.
        for i in range(3):
            d = np.linalg.norm(b[i] - b[(i + 1) % 3])
            assert d == pytest.approx(4.0, abs=1e-9)

    def test_scheme_a_colocated_world(self, scene):
        a = scene.source_world["A"]
        assert np.allclose(a[0], a[1]) and np.allclose(a[1], a[2])

    def test_panels_below_sources(self, scene):
        for layer in ("natural", "human", "radio"):
            panel = scene.panel_world[layer]
            idx = ("natural", "human", "radio").index(layer)
            src = scene.source_world["B"][idx]
            assert panel[1] == pytest.approx(0.0, abs=1e-12)
            assert panel[0] == pytest.approx(src[0], abs=1e-9)
            assert panel[2] == pytest.approx(src[2], abs=1e-9)

    def test_floor_bounds_contain_everything(self, scene):
        x0, z0, x1, z1 = scene.floor_bounds
        for pts in (scene.world_triangles.reshape(-1, 3),
                    scene.source_world["A"], scene.source_world["B"]):
            assert np.all(pts[:, 0] >= x0) and np.all(pts[:, 0] <= x1)
            assert np.all(pts[:, 2] >= z0) and np.all(pts[:, 2] <= z1)

    def test_mixer_default_is_derived(self):
        doc = minimal_doc()
        scene = parse_scene(doc)
        assert scene.mixer_local is None
        m = scene.mixer_world  # derived fallback must exist
        assert math.isfinite(m.x) and math.isfinite(m.z)
