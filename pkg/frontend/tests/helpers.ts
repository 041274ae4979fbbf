import type { SceneSummary, TelemetryMessage } from "../src/protocol.js";

export function fakeScene(): SceneSummary {
  return {
    scene_hash: "ab".repeat(32),
    sample_rate: 48000,
    block_frames: 128,
    layers: ["natural", "human", "radio"],
    constants: {
      glow_on: 1.5,
      glow_off: 1.65,
      r_inner: 0.75,
      r_outer: 3.0,
      touch_eps: 0.1,
    },
    hologram_outline: [
      [2.0, -2.0],
      [3.0, -2.0],
      [2.5, -1.0],
    ],
    panels: [
      { layer: "natural", center: [3.65, -3.5], side: 1.0 },
      { layer: "human", center: [4.5, -0.5], side: 1.0 },
      { layer: "radio", center: [1.0, 0.2], side: 1.0 },
    ],
    sources: {
      A: [
        [2.5, 1.0, -1.5],
        [2.5, 1.0, -1.5],
        [2.5, 1.0, -1.5],
      ],
      B: [
        [3.65, 1.2, -3.5],
        [4.5, 1.2, -0.5],
        [1.0, 1.2, 0.2],
      ],
    },
    mixer: [3.1, -2.54],
    floor_bounds: [-1.81, -5.5, 5.65, 2.5],
    tracks: {
      natural: "/tracks/natural",
      human: "/tracks/human",
      radio: "/tracks/radio",
    },
  };
}

export function fakeTelemetry(
  overrides: Partial<TelemetryMessage> = {},
): TelemetryMessage {
  return {
    type: "telemetry",
    clock: 0.5,
    scheme: "A",
    sliders: { natural: 0.1, human: 0.2, radio: 0.3 },
    gains: { natural: 0.1, human: 0.2, radio: 0.3 },
    glow: { natural: false, human: false, radio: false },
    touch: false,
    ...overrides,
  };
}
