/**
 * Server-authoritative UI state.
 *
 * The reducer folds server messages into the state the widgets render.
 * Sliders, gains, glow and touch only ever come from telemetry — there
 * is deliberately no way to write them locally, so the UI cannot show a
 * value the server never confirmed.
 */

import type {
  AudioMode,
  PerLayer,
  SceneSummary,
  SchemeId,
  ServerMessage,
} from "./protocol.js";

export type ConnectionState = "connecting" | "connected" | "disconnected";

export interface UiState {
  connection: ConnectionState;
  session: string | null;
  audioMode: AudioMode | null;
  scene: SceneSummary | null;
  clock: number;
  scheme: SchemeId;
  sliders: PerLayer<number>;
  gains: PerLayer<number>;
  glow: PerLayer<boolean>;
  touch: boolean;
  drops: number;
  lastError: string | null;
}

const ZEROS: PerLayer<number> = { natural: 0, human: 0, radio: 0 };
const OFF: PerLayer<boolean> = { natural: false, human: false, radio: false };

export function initialState(): UiState {
  return {
    connection: "connecting",
    session: null,
    audioMode: null,
    scene: null,
    clock: 0,
    scheme: "A",
    sliders: { ...ZEROS },
    gains: { ...ZEROS },
    glow: { ...OFF },
    touch: false,
    drops: 0,
    lastError: null,
  };
}

export function applyServer(state: UiState, msg: ServerMessage): UiState {
  switch (msg.type) {
    case "welcome":
      return {
        ...state,
        connection: "connected",
        session: msg.session,
        audioMode: msg.audio_mode,
        scene: msg.scene,
        clock: msg.clock,
        lastError: null,
      };
    case "telemetry":
      return {
        ...state,
        // Telemetry replies and audio pushes interleave; never rewind the
        // displayed clock within a session (welcome resets it on reconnect).
        clock: Math.max(state.clock, msg.clock),
        scheme: msg.scheme,
        sliders: { ...msg.sliders },
        gains: { ...msg.gains },
        glow: { ...msg.glow },
        touch: msg.touch,
      };
    case "audio":
      return {
        ...state,
        clock: Math.max(state.clock, msg.clock),
        drops: msg.drops,
      };
    case "error":
      return { ...state, lastError: `${msg.code}: ${msg.message}` };
  }
}

export function setConnection(state: UiState, c: ConnectionState): UiState {
  return { ...state, connection: c };
}

/** Sliders are the scheme-A control; scheme B greys them out. */
export function slidersEnabled(state: UiState): boolean {
  return state.connection === "connected" && state.scheme === "A";
}

export function canSendPose(state: UiState): boolean {
  return state.connection === "connected" && state.scene !== null;
}
