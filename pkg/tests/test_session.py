"""Session protocol handling, logging, replay, streaming."""

from __future__ import annotations

import base64
import json

import numpy as np
import pytest

from proxmix.geometry import Pose, Vec3
from proxmix.interaction import MixerState, Scheme, active_gains
from proxmix.render import render_timeline
from proxmix.session import Session, SessionLogError, replay_log, scene_summary
from proxmix.timeline import (
    PoseUpdate,
    SchemeSelect,
    SliderSet,
    Timeline,
    TimelineEvent,
)


def make_session(scene, tracks, tmp_path=None, **kw) -> Session:
    log = None if tmp_path is None else tmp_path / "session.jsonl"
    return Session(scene, session_id="t1", tracks=tracks, log_path=log, **kw)


class TestHandleMessage:
    def test_hello_returns_welcome_and_telemetry(self, scene, tracks):
        s = make_session(scene, tracks)
        out = s.handle({"type": "hello"})
        assert [m["type"] for m in out] == ["welcome", "telemetry"]
        summary = out[0]["scene"]
        assert summary["layers"] == ["natural", "human", "radio"]
        assert len(summary["hologram_outline"]) >= 3
        assert len(summary["panels"]) == 3
        assert out[1]["gains"] == {"natural": 0.0, "human": 0.0, "radio": 0.0}

    def test_slider_in_scheme_a(self, scene, tracks):
        s = make_session(scene, tracks)
        out = s.handle({"type": "slider", "layer": "radio", "value": 0.7})
        assert out[0]["type"] == "telemetry"
        assert out[0]["gains"] == {"natural": 0.0, "human": 0.0, "radio": 0.7}

    def test_slider_clamped(self, scene, tracks):
        s = make_session(scene, tracks)
        out = s.handle({"type": "slider", "layer": "radio", "value": 1.4})
        assert out[0]["sliders"]["radio"] == 1.0
        out = s.handle({"type": "slider", "layer": "radio", "value": -2.0})
        assert out[0]["sliders"]["radio"] == 0.0

    def test_pose_on_panel_triggers_glow(self, scene, tracks):
        s = make_session(scene, tracks)
        s.handle({"type": "scheme", "value": "B"})
        c = scene.panel_world["natural"]
        # Standing on the panel: the source is 1.2 m overhead, within 1.5.
        out = s.handle({"type": "pose", "x": float(c[0]), "y": 0.0,
                        "z": float(c[2]), "yaw": 0.0})
        t = out[0]
        assert t["glow"]["natural"] is True
        assert t["glow"]["human"] is False and t["glow"]["radio"] is False
        assert t["events"][0]["kind"] == "glow_on"
        # Gains follow scheme B at that pose: natural dominates.
        assert t["gains"]["natural"] == pytest.approx(1.0 - 1.2 / 2.25 + 0.2,
                                                      abs=0.25)

    def test_scheme_switch_resets_sliders(self, scene, tracks):
        s = make_session(scene, tracks)
        s.handle({"type": "slider", "layer": "human", "value": 0.9})
        out = s.handle({"type": "scheme", "value": "B"})
        assert out[0]["scheme"] == "B"
        assert out[0]["sliders"] == {"natural": 0.0, "human": 0.0, "radio": 0.0}

    def test_unknown_type(self, scene, tracks):
        s = make_session(scene, tracks)
        before = s.snapshot()
        out = s.handle({"type": "teleport"})
        assert out[0]["type"] == "error" and out[0]["code"] == "unknown_type"
        assert s.snapshot() == before

    @pytest.mark.parametrize("msg", [
        "not a dict",
        {},
        {"type": 42},
        {"type": "pose", "x": 1.0},
        {"type": "pose", "x": float("nan"), "y": 0, "z": 0, "yaw": 0},
        {"type": "pose", "x": 0, "y": 0, "z": 0, "yaw": 0, "roll": 1},
        {"type": "slider", "layer": "weather", "value": 0.5},
        {"type": "slider", "layer": "radio", "value": "high"},
        {"type": "scheme", "value": "C"},
        {"type": "hello", "audio_mode": "telepathy"},
    ])
    def test_malformed_leaves_state_unchanged(self, scene, tracks, msg):
        s = make_session(scene, tracks)
        s.handle({"type": "slider", "layer": "natural", "value": 0.5})
        before = s.snapshot()
        out = s.handle(msg)
        assert out[0]["type"] == "error"
        assert out[0]["code"] in ("malformed", "unknown_type")
        assert s.snapshot() == before

    def test_pose_yaw_normalized(self, scene, tracks):
        s = make_session(scene, tracks)
        out = s.handle({"type": "pose", "x": 0, "y": 1.6, "z": 0, "yaw": 270.0})
        assert out[0]["type"] == "telemetry"
        assert s.pose.yaw == -90.0

    def test_closed_session_rejects(self, scene, tracks):
        s = make_session(scene, tracks)
        assert s.handle({"type": "bye"}) == []
        out = s.handle({"type": "pose", "x": 0, "y": 0, "z": 0, "yaw": 0})
        assert out[0]["code"] == "closed"

    def test_telemetry_gains_never_stale(self, scene, tracks):
        # After every message, telemetry gains equal active_gains recomputed
        # from scratch.
        s = make_session(scene, tracks)
        msgs = [
            {"type": "slider", "layer": "natural", "value": 0.3},
            {"type": "pose", "x": 3.65, "y": 1.2, "z": -3.5, "yaw": 10.0},
            {"type": "scheme", "value": "B"},
            {"type": "pose", "x": 1.0, "y": 1.2, "z": -1.0, "yaw": -90.0},
            {"type": "slider", "layer": "human", "value": 0.8},
            {"type": "scheme", "value": "A"},
        ]
        for msg in msgs:
            out = s.handle(msg)
            expected = active_gains(s.scheme, s.mixer, s.pose, scene)
            telemetry = [m for m in out if m["type"] == "telemetry"][0]
            assert telemetry["gains"] == {
                "natural": expected.natural,
                "human": expected.human,
                "radio": expected.radio,
            }


class TestStreaming:
    def test_one_second_is_375_chunks(self, scene, tracks):
        s = make_session(scene, tracks)
        chunks = []
        while s.clock_samples < 48000:
            chunks.append(s.render_chunk())
        assert len(chunks) == 375
        assert [c["seq"] for c in chunks] == list(range(375))
        assert s.clock_seconds == 1.0

    def test_silent_state_streams_zeros(self, scene, tracks):
        s = make_session(scene, tracks)
        chunk = s.render_chunk()
        pcm = np.frombuffer(base64.b64decode(chunk["pcm"]), dtype=np.int16)
        assert pcm.size == 256 and not np.any(pcm)

    def test_chunks_match_offline_render(self, scene, tracks, tmp_path):
        """Concatenated live chunks equal the offline render of the log."""
        s = make_session(scene, tracks, tmp_path)
        rate = scene.constants.sample_rate
        script = [
            (5, {"type": "slider", "layer": "natural", "value": 0.8}),
            (20, {"type": "pose", "x": 3.0, "y": 1.6, "z": -2.0, "yaw": 45.0}),
            (40, {"type": "scheme", "value": "B"}),
            (60, {"type": "pose", "x": 3.65, "y": 1.4, "z": -3.4, "yaw": 0.0}),
        ]
        pcm_parts = []
        rendered = 0
        for upto, msg in script:
            while rendered < upto:
                c = s.render_chunk()
                pcm_parts.append(base64.b64decode(c["pcm"]))
                rendered += 1
            s.handle(msg)
        for _ in range(40):
            pcm_parts.append(base64.b64decode(s.render_chunk()["pcm"]))
            rendered += 1
        live = np.frombuffer(b"".join(pcm_parts), dtype=np.int16)

        block = scene.constants.block_frames
        events = []
        for upto, msg in script:
            t = upto * block / rate
            if msg["type"] == "pose":
                events.append(TimelineEvent(t, PoseUpdate(Pose(
                    Vec3(msg["x"], msg["y"], msg["z"]), yaw=msg["yaw"]))))
            elif msg["type"] == "slider":
                events.append(TimelineEvent(
                    t, SliderSet(msg["layer"], msg["value"])))
            else:
                events.append(TimelineEvent(t, SchemeSelect(msg["value"])))
        tl = Timeline(events=tuple(events), duration=rendered * block / rate)
        offline = render_timeline(scene, tl, Scheme.A, tracks=tracks)
        assert np.array_equal(live, offline)


class TestReplay:
    def test_empty_log_gives_initial_state(self, scene, tracks, tmp_path):
        s = make_session(scene, tracks, tmp_path)
        s.close()
        state = replay_log(scene, tmp_path / "session.jsonl", tracks=tracks)
        assert state.scheme == Scheme.A
        assert state.mixer == MixerState()
        assert state.clock_samples == 0

    def test_replay_reproduces_live_state(self, scene, tracks, tmp_path):
        s = make_session(scene, tracks, tmp_path)
        s.handle({"type": "hello"})
        s.handle({"type": "slider", "layer": "natural", "value": 0.6})
        for _ in range(10):
            s.render_chunk()
        s.handle({"type": "pose", "x": 3.65, "y": 1.2, "z": -3.5, "yaw": 0.0})
        s.handle({"type": "scheme", "value": "B"})
        for _ in range(7):
            s.render_chunk()
        s.handle({"type": "slider", "layer": "radio", "value": 0.2})
        live = s.snapshot()
        s.close()
        replayed = replay_log(scene, tmp_path / "session.jsonl", tracks=tracks)
        assert replayed == live

    def test_hash_mismatch_rejected(self, scene, tracks, tmp_path):
        log = tmp_path / "bad.jsonl"
        log.write_text(json.dumps({
            "log": "proxmix-session", "version": 1, "session": "x",
            "scene_hash": "0" * 64, "audio_mode": "pcm",
        }) + "\n")
        with pytest.raises(SessionLogError, match="hash mismatch"):
            replay_log(scene, log, tracks=tracks)

    def test_corrupt_record_rejected(self, scene, tracks, tmp_path):
        s = make_session(scene, tracks, tmp_path)
        s.close()
        log = tmp_path / "session.jsonl"
        lines = log.read_text().splitlines()
        log.write_text(lines[0] + "\n{broken\n")
        with pytest.raises(SessionLogError, match="corrupt record"):
            replay_log(scene, log, tracks=tracks)

    def test_fuzz_live_vs_replay(self, scene, tracks, tmp_path):
        rng = np.random.default_rng(11)
        for trial in range(10):
            log = tmp_path / f"fuzz{trial}.jsonl"
            s = Session(scene, session_id=f"f{trial}", tracks=tracks,
                        log_path=log)
            for _ in range(rng.integers(3, 25)):
                kind = rng.choice(["pose", "slider", "scheme", "chunk"])
                if kind == "pose":
                    s.handle({
                        "type": "pose",
                        "x": float(rng.uniform(-2, 7)),
                        "y": float(rng.uniform(0, 2.5)),
                        "z": float(rng.uniform(-6, 3)),
                        "yaw": float(rng.uniform(-180, 179.9)),
                    })
                elif kind == "slider":
                    s.handle({
                        "type": "slider",
                        "layer": str(rng.choice(["natural", "human", "radio"])),
                        "value": float(rng.uniform(-0.2, 1.4)),
                    })
                elif kind == "scheme":
                    s.handle({"type": "scheme",
                              "value": str(rng.choice(["A", "B"]))})
                else:
                    for _ in range(int(rng.integers(1, 6))):
                        s.render_chunk()
            live = s.snapshot()
            s.close()
            assert replay_log(scene, log, tracks=tracks) == live


class TestIsolation:
    def test_sessions_never_share_state(self, scene, tracks):
        a = Session(scene, session_id="a", tracks=tracks)
        b = Session(scene, session_id="b", tracks=tracks)
        a.handle({"type": "slider", "layer": "natural", "value": 0.9})
        out_b = b.handle({"type": "slider", "layer": "radio", "value": 0.1})
        assert out_b[0]["gains"] == {"natural": 0.0, "human": 0.0, "radio": 0.1}
        a.render_chunk()
        a.handle({"type": "scheme", "value": "B"})
        assert b.scheme == Scheme.A
        assert b.clock_samples == 0
        assert a.mixer.as_tuple() == (0.0, 0.0, 0.0)
        assert b.mixer.as_tuple() == (0.0, 0.0, 0.1)

    def test_gains_mode_never_advances_clock(self, scene):
        s = Session(scene, audio_mode="gains")
        s.handle({"type": "hello"})
        s.handle({"type": "slider", "layer": "human", "value": 0.5})
        assert s.clock_samples == 0


class TestSceneSummary:
    def test_outline_is_convex_and_closed(self, scene):
        outline = scene_summary(scene)["hologram_outline"]
        pts = np.array(outline)
        assert pts.shape[1] == 2 and len(pts) >= 3
        # Every mesh footprint point lies inside the outline's bounds.
        foot = scene.world_triangles.reshape(-1, 3)[:, [0, 2]]
        assert foot[:, 0].min() >= pts[:, 0].min() - 1e-9
        assert foot[:, 0].max() <= pts[:, 0].max() + 1e-9

    def test_track_urls(self, scene):
        urls = scene_summary(scene)["tracks"]
        assert urls == {"natural": "/tracks/natural",
                        "human": "/tracks/human",
                        "radio": "/tracks/radio"}
