"""WebSocket service hosting live sessions.

One WebSocket per user at ``/ws``. Three tasks serve each connection —
message receiver, 10 Hz telemetry heartbeat, and a real-time-paced audio
streamer — all funnelled through one bounded outbound queue. When the
client cannot keep up, the oldest queued message is dropped; dropped
audio chunks are counted and the count rides along in every audio
message. Sessions never share mutable state; the scene descriptor and
the decoded track samples are shared read-only.
"""

from __future__ import annotations

import asyncio
import json
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles

from .render import TrackBundle
from .scene import LAYER_IDS, SceneDescriptor
from .session import Session, scene_summary

HEARTBEAT_SECONDS = 0.1
OUTBOUND_QUEUE_SIZE = 64


def create_app(
    scene: SceneDescriptor,
    audio_mode: str = "pcm",
    log_dir: str | Path | None = None,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="proxmix")
    tracks = (TrackBundle.from_scene(scene) if audio_mode == "pcm"
              else TrackBundle.silent(scene))
    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)

    @app.get("/scene")
    def get_scene():
        return scene_summary(scene)

    @app.get("/tracks/{layer}")
    def get_track(layer: str):
        if layer not in LAYER_IDS:
            raise HTTPException(status_code=404, detail=f"no such layer {layer!r}")
        media = Path(scene.layer_by_id(layer).media)
        if not media.is_file():
            raise HTTPException(status_code=404, detail="track media missing")
        return FileResponse(media, media_type="audio/wav")

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket):
        await ws.accept()
        sid = uuid.uuid4().hex[:12]
        session = Session(
            scene,
            session_id=sid,
            tracks=tracks,
            audio_mode=audio_mode,
            log_path=None if log_dir is None else log_dir / f"{sid}.jsonl",
        )
        queue: asyncio.Queue[dict] = asyncio.Queue(maxsize=OUTBOUND_QUEUE_SIZE)

        def enqueue(msg: dict) -> None:
            while True:
                try:
                    queue.put_nowait(msg)
                    return
                except asyncio.QueueFull:
                    try:
                        dropped = queue.get_nowait()
                    except asyncio.QueueEmpty:
                        continue
                    if dropped.get("type") == "audio":
                        session.drops += 1

        async def sender() -> None:
            while True:
                msg = await queue.get()
                await ws.send_text(json.dumps(msg))

        async def heartbeat() -> None:
            while True:
                await asyncio.sleep(HEARTBEAT_SECONDS)
                if session.hello_received and not session.closed:
                    enqueue(session.telemetry())

        async def streamer() -> None:
            # Streaming starts at the hello handshake, paced so rendered
            # samples track wall-clock time.
            start: float | None = None
            rate = scene.constants.sample_rate
            while True:
                if session.closed:
                    return
                if session.hello_received and session.audio_mode == "pcm":
                    if start is None:
                        start = time.monotonic()
                    enqueue(session.render_chunk())
                    deadline = start + session.clock_samples / rate
                    delay = deadline - time.monotonic()
                    if delay > 0:
                        await asyncio.sleep(delay)
                else:
                    await asyncio.sleep(HEARTBEAT_SECONDS)

        tasks = [
            asyncio.create_task(sender()),
            asyncio.create_task(heartbeat()),
            asyncio.create_task(streamer()),
        ]
        try:
            while True:
                text = await ws.receive_text()
                try:
                    msg = json.loads(text)
                except json.JSONDecodeError:
                    enqueue(session._error("malformed", "invalid JSON"))
                    continue
                for response in session.handle(msg):
                    enqueue(response)
                if session.closed:
                    # Flush queued responses before closing.
                    while not queue.empty():
                        await asyncio.sleep(0.01)
                    break
        except WebSocketDisconnect:
            pass
        finally:
            for task in tasks:
                task.cancel()
            session.close()
            try:
                await ws.close()
            except Exception:
                pass

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True),
                  name="frontend")

    return app
