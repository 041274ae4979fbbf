/**
 * Wire protocol types and parsing (mirrors the server's docs/protocol.md).
 *
 * Everything arriving on the socket goes through `parseServerMessage`,
 * which returns null for anything that does not match the protocol —
 * the UI never acts on half-valid data.
 */

export type LayerId = "natural" | "human" | "radio";
export const LAYERS: readonly LayerId[] = ["natural", "human", "radio"];

export type SchemeId = "A" | "B";
export type AudioMode = "pcm" | "gains";

export type PerLayer<T> = Record<LayerId, T>;

export interface PanelSummary {
  layer: LayerId;
  center: [number, number];
  side: number;
}

export interface SceneSummary {
  scene_hash: string;
  sample_rate: number;
  block_frames: number;
  layers: LayerId[];
  constants: {
    glow_on: number;
    glow_off: number;
    r_inner: number;
    r_outer: number;
    touch_eps: number;
  };
  hologram_outline: [number, number][];
  panels: PanelSummary[];
  sources: { A: number[][]; B: number[][] };
  mixer: [number, number];
  /** [min_x, min_z, max_x, max_z] in world meters. */
  floor_bounds: [number, number, number, number];
  tracks: PerLayer<string>;
}

export interface WelcomeMessage {
  type: "welcome";
  clock: number;
  session: string;
  audio_mode: AudioMode;
  scene: SceneSummary;
}

export interface InteractionEventWire {
  kind: "glow_on" | "glow_off" | "touch_start" | "touch_end";
  target: string;
  time: number;
}

export interface TelemetryMessage {
  type: "telemetry";
  clock: number;
  scheme: SchemeId;
  sliders: PerLayer<number>;
  gains: PerLayer<number>;
  glow: PerLayer<boolean>;
  touch: boolean;
  events?: InteractionEventWire[];
}

export interface AudioMessage {
  type: "audio";
  clock: number;
  seq: number;
  frames: number;
  drops: number;
  pcm: string;
}

export interface ErrorMessage {
  type: "error";
  clock: number;
  code: string;
  message: string;
}

export type ServerMessage =
  | WelcomeMessage
  | TelemetryMessage
  | AudioMessage
  | ErrorMessage;

export interface HelloMessage {
  type: "hello";
  audio_mode?: AudioMode;
}

export interface PoseMessage {
  type: "pose";
  x: number;
  y: number;
  z: number;
  yaw: number;
}

export interface SliderMessage {
  type: "slider";
  layer: LayerId;
  value: number;
}

export interface SchemeMessage {
  type: "scheme";
  value: SchemeId;
}

export interface ByeMessage {
  type: "bye";
}

export type ClientMessage =
  | HelloMessage
  | PoseMessage
  | SliderMessage
  | SchemeMessage
  | ByeMessage;

// --- Parsing ---------------------------------------------------------------

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isPerLayerOf(
  v: unknown,
  check: (x: unknown) => boolean,
): boolean {
  return isRecord(v) && LAYERS.every((layer) => check(v[layer]));
}

function isSceneSummary(v: unknown): v is SceneSummary {
  if (!isRecord(v)) return false;
  return (
    typeof v.scene_hash === "string" &&
    isFiniteNumber(v.sample_rate) &&
    isFiniteNumber(v.block_frames) &&
    Array.isArray(v.layers) &&
    isRecord(v.constants) &&
    Array.isArray(v.hologram_outline) &&
    Array.isArray(v.panels) &&
    isRecord(v.sources) &&
    Array.isArray(v.mixer) &&
    Array.isArray(v.floor_bounds) &&
    v.floor_bounds.length === 4 &&
    v.floor_bounds.every(isFiniteNumber) &&
    isRecord(v.tracks)
  );
}

/** Parse one socket frame; null means "not a protocol message, ignore". */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (!isRecord(data) || !isFiniteNumber(data.clock)) return null;

  switch (data.type) {
    case "welcome":
      if (
        typeof data.session === "string" &&
        (data.audio_mode === "pcm" || data.audio_mode === "gains") &&
        isSceneSummary(data.scene)
      ) {
        return data as unknown as WelcomeMessage;
      }
      return null;
    case "telemetry":
      if (
        (data.scheme === "A" || data.scheme === "B") &&
        isPerLayerOf(data.sliders, isFiniteNumber) &&
        isPerLayerOf(data.gains, isFiniteNumber) &&
        isPerLayerOf(data.glow, (x) => typeof x === "boolean") &&
        typeof data.touch === "boolean"
      ) {
        return data as unknown as TelemetryMessage;
      }
      return null;
    case "audio":
      if (
        isFiniteNumber(data.seq) &&
        isFiniteNumber(data.frames) &&
        isFiniteNumber(data.drops) &&
        typeof data.pcm === "string"
      ) {
        return data as unknown as AudioMessage;
      }
      return null;
    case "error":
      if (typeof data.code === "string" && typeof data.message === "string") {
        return data as unknown as ErrorMessage;
      }
      return null;
    default:
      return null;
  }
}

// --- Builders --------------------------------------------------------------

export const AVATAR_HEIGHT_M = 1.6;

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

/**
 * Build a pose message from a floor position, clamped into the scene's
 * floor bounds. The avatar always stands at eye height.
 */
export function buildPose(
  x: number,
  z: number,
  yawDeg: number,
  bounds: [number, number, number, number],
): PoseMessage {
  const [minX, minZ, maxX, maxZ] = bounds;
  return {
    type: "pose",
    x: clamp(x, minX, maxX),
    y: AVATAR_HEIGHT_M,
    z: clamp(z, minZ, maxZ),
    yaw: normalizeYaw(yawDeg),
  };
}

export function buildSlider(layer: LayerId, value: number): SliderMessage {
  return { type: "slider", layer, value: clamp(value, 0, 1) };
}

/** Wrap any finite angle into [-180, 180). */
export function normalizeYaw(deg: number): number {
  let y = ((deg + 180) % 360 + 360) % 360 - 180;
  if (y === 180) y = -180;
  return y;
}

// --- PCM decoding ----------------------------------------------------------

// Node's Buffer, used only when running under vitest (no DOM atob).
declare const Buffer: {
  from(data: string, encoding: string): Uint8Array;
};

/** Decode a base64 audio payload into interleaved stereo int16 samples. */
export function decodePcm(b64: string): Int16Array {
  let bytes: Uint8Array;
  if (typeof atob === "function") {
    const bin = atob(b64);
    bytes = new Uint8Array(bin.length);
    for (let i = 0; i < bin.length; i++) bytes[i] = bin.charCodeAt(i);
  } else {
    // Node (tests)
    bytes = new Uint8Array(Buffer.from(b64, "base64"));
  }
  return new Int16Array(bytes.buffer, bytes.byteOffset, bytes.byteLength / 2);
}

/**
 * Int16 samples to float in [-1, 1]. The server quantizes with
 * round(x * 32767), so dividing by 32767 inverts it exactly.
 */
export function pcmToFloat(pcm: Int16Array): Float32Array {
  const out = new Float32Array(pcm.length);
  for (let i = 0; i < pcm.length; i++) out[i] = pcm[i]! / 32767;
  return out;
}
