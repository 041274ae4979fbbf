/**
 * Plan-view floor map: a uniform, invertible world<->screen mapping plus
 * the canvas drawing for sculpture outline, panels, mixer, sources and
 * the listener avatar.
 *
 * World axes: x east, z south-ish (the scene's -z is "up" on screen, so
 * an avatar with yaw 0 points up). Pixels: y down, as usual.
 */

import type { SceneSummary, LayerId, PerLayer, SchemeId } from "./protocol.js";

export interface AvatarState {
  x: number;
  z: number;
  yawDeg: number;
}

export class PlanView {
  private readonly scale: number; // px per meter, uniform
  private readonly cx: number;
  private readonly cy: number;
  private readonly midX: number;
  private readonly midZ: number;

  constructor(
    readonly bounds: [number, number, number, number],
    readonly widthPx: number,
    readonly heightPx: number,
    marginPx = 24,
  ) {
    const [minX, minZ, maxX, maxZ] = bounds;
    const spanX = Math.max(maxX - minX, 1e-6);
    const spanZ = Math.max(maxZ - minZ, 1e-6);
    this.scale = Math.min(
      (widthPx - 2 * marginPx) / spanX,
      (heightPx - 2 * marginPx) / spanZ,
    );
    this.midX = (minX + maxX) / 2;
    this.midZ = (minZ + maxZ) / 2;
    this.cx = widthPx / 2;
    this.cy = heightPx / 2;
  }

  get pxPerMeter(): number {
    return this.scale;
  }

  toScreen(x: number, z: number): [number, number] {
    return [
      this.cx + (x - this.midX) * this.scale,
      this.cy + (z - this.midZ) * this.scale,
    ];
  }

  toWorld(px: number, py: number): [number, number] {
    return [
      this.midX + (px - this.cx) / this.scale,
      this.midZ + (py - this.cy) / this.scale,
    ];
  }
}

const GLOW_FILL = "rgba(255, 214, 90, 0.55)";
const PANEL_FILL = "rgba(120, 130, 150, 0.25)";
const LAYER_COLORS: PerLayer<string> = {
  natural: "#4caf7d",
  human: "#e2a04a",
  radio: "#b06ae0",
};

export interface DrawState {
  scheme: SchemeId;
  glow: PerLayer<boolean>;
  gains: PerLayer<number>;
  touch: boolean;
}

export function drawPlan(
  ctx: CanvasRenderingContext2D,
  view: PlanView,
  scene: SceneSummary,
  avatar: AvatarState,
  state: DrawState,
): void {
  ctx.clearRect(0, 0, view.widthPx, view.heightPx);

  // Sculpture footprint
  const outline = scene.hologram_outline;
  if (outline.length >= 3) {
    ctx.beginPath();
    outline.forEach(([x, z], i) => {
      const [px, py] = view.toScreen(x, z);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.closePath();
    ctx.fillStyle = state.touch ? "rgba(240, 90, 90, 0.4)" : "rgba(90, 120, 240, 0.18)";
    ctx.fill();
    ctx.strokeStyle = "#8fa3ff";
    ctx.setLineDash([6, 4]); // it is invisible in the room, dash it here too
    ctx.stroke();
    ctx.setLineDash([]);
  }

  // Floor panels, glowing per telemetry
  for (const panel of scene.panels) {
    const half = panel.side / 2;
    const [x0, y0] = view.toScreen(panel.center[0] - half, panel.center[1] - half);
    const side = panel.side * view.pxPerMeter;
    ctx.fillStyle = state.glow[panel.layer] ? GLOW_FILL : PANEL_FILL;
    ctx.fillRect(x0, y0, side, side);
    ctx.strokeStyle = LAYER_COLORS[panel.layer];
    ctx.strokeRect(x0, y0, side, side);
    ctx.fillStyle = "#cfd6e4";
    ctx.font = "11px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(panel.layer, x0 + side / 2, y0 + side + 12);
  }

  // Scheme-B sources with their gain as a ring
  const bSources = scene.sources.B;
  scene.layers.forEach((layer: LayerId, i: number) => {
    const src = bSources[i];
    if (!src) return;
    const [px, py] = view.toScreen(src[0]!, src[2]!);
    ctx.beginPath();
    ctx.arc(px, py, 5, 0, 2 * Math.PI);
    ctx.fillStyle = LAYER_COLORS[layer];
    ctx.fill();
    const gain = state.gains[layer];
    if (state.scheme === "B" && gain > 0) {
      ctx.beginPath();
      ctx.arc(px, py, 5 + 10 * gain, 0, 2 * Math.PI);
      ctx.strokeStyle = LAYER_COLORS[layer];
      ctx.stroke();
    }
  });

  // Mixer desk
  const [mx, my] = view.toScreen(scene.mixer[0], scene.mixer[1]);
  ctx.fillStyle = state.scheme === "A" ? "#dfe6f5" : "#6b7486";
  ctx.fillRect(mx - 7, my - 5, 14, 10);
  ctx.fillStyle = "#cfd6e4";
  ctx.fillText("mixer", mx, my + 20);

  // Avatar with heading arrow (yaw 0 faces -z = screen up)
  const [ax, ay] = view.toScreen(avatar.x, avatar.z);
  const yaw = (avatar.yawDeg * Math.PI) / 180;
  ctx.beginPath();
  ctx.arc(ax, ay, 8, 0, 2 * Math.PI);
  ctx.fillStyle = "#f2f5fb";
  ctx.fill();
  ctx.beginPath();
  ctx.moveTo(ax, ay);
  ctx.lineTo(ax + 16 * Math.sin(yaw), ay - 16 * Math.cos(yaw));
  ctx.strokeStyle = "#f2f5fb";
  ctx.lineWidth = 2;
  ctx.stroke();
  ctx.lineWidth = 1;
}
