"""Command-line entry point: serve, render, validate, demo-assets."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .scene import SceneError, load_scene
from .timeline import TimelineError, load_timeline


def _add_scene_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scene", required=True, help="scene JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxmix",
        description="Proximity-mixed AR sound installation engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the WebSocket session service")
    _add_scene_arg(serve)
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--audio-mode", choices=("pcm", "gains"), default="pcm",
                       help="stream rendered PCM chunks, or gains-only "
                            "telemetry for client-side mixing")
    serve.add_argument("--log-dir", default=os.environ.get("PROXMIX_LOG_DIR"),
                       help="session log directory "
                            "(default: $PROXMIX_LOG_DIR, or no logging)")
    serve.add_argument("--frontend", default=None,
                       help="directory of built UI files to serve at /")

    render = sub.add_parser("render", help="render a timeline to a WAV file")
    _add_scene_arg(render)
    render.add_argument("--timeline", required=True, help="JSON-lines timeline")
    render.add_argument("--scheme", choices=("A", "B"), default="A",
                        help="interaction scheme active at t=0")
    render.add_argument("--out", required=True, help="output WAV path")
    render.add_argument("--duration", type=float, default=None,
                        help="seconds to render (default: last event time)")
    render.add_argument("--block-frames", type=int, default=None,
                        help="override the scene's render block size")

    validate = sub.add_parser("validate", help="check a scene file")
    _add_scene_arg(validate)

    demo = sub.add_parser("demo-assets",
                          help="write a ready-to-serve demo scene with "
                               "mesh and synthesized tracks")
    demo.add_argument("--out", default="demo", help="output directory")
    return parser


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    try:
        scene = load_scene(args.scene)
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    frontend = args.frontend
    if frontend is None:
        default_front = Path("frontend") / "dist"
        if default_front.is_dir():
            frontend = default_front
    app = create_app(scene, audio_mode=args.audio_mode,
                     log_dir=args.log_dir, frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_render(args) -> int:
    from .interaction import Scheme
    from .render import TrackError, render_timeline

    try:
        scene = load_scene(args.scene)
        timeline = load_timeline(args.timeline, duration=args.duration)
        render_timeline(scene, timeline, Scheme(args.scheme),
                        out_path=args.out, block_frames=args.block_frames)
    except (SceneError, TimelineError, TrackError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    n = round(timeline.duration * scene.constants.sample_rate)
    print(f"wrote {args.out}: {timeline.duration} s "
          f"({n} frames at {scene.constants.sample_rate} Hz)")
    return 0


def cmd_validate(args) -> int:
    try:
        scene = load_scene(args.scene)
    except SceneError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    from .scene import scene_hash

    print(f"ok: {args.scene} ({scene.hologram.triangles.shape[0]} triangles, "
          f"hash {scene_hash(scene)[:12]})")
    return 0


def cmd_demo_assets(args) -> int:
    from .demo import write_demo

    scene_path = write_demo(args.out)
    print(f"wrote {scene_path}")
    print(f"try: proxmix serve --scene {scene_path} --port 8000")
    return 0


_COMMANDS = {
    "serve": cmd_serve,
    "render": cmd_render,
    "validate": cmd_validate,
    "demo-assets": cmd_demo_assets,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
