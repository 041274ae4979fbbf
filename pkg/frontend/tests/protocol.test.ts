import { describe, expect, it } from "vitest";

import {
  AVATAR_HEIGHT_M,
  buildPose,
  buildSlider,
  decodePcm,
  normalizeYaw,
  parseServerMessage,
  pcmToFloat,
} from "../src/protocol.js";
import { fakeScene, fakeTelemetry } from "./helpers.js";

function encodePcm(samples: Int16Array): string {
  return Buffer.from(samples.buffer, samples.byteOffset, samples.byteLength).toString(
    "base64",
  );
}

describe("parseServerMessage", () => {
  it("accepts a welcome message", () => {
    const raw = JSON.stringify({
      type: "welcome",
      clock: 0.0,
      session: "s-1",
      audio_mode: "pcm",
      scene: fakeScene(),
    });
    const msg = parseServerMessage(raw);
    expect(msg).not.toBeNull();
    if (msg === null || msg.type !== "welcome") throw new Error("wrong type");
    expect(msg.session).toBe("s-1");
    expect(msg.scene.sample_rate).toBe(48000);
    expect(msg.scene.floor_bounds).toHaveLength(4);
  });

  it("accepts telemetry with events", () => {
    const raw = JSON.stringify({
      ...fakeTelemetry(),
      events: [{ kind: "glow_on", target: "human", time: 1.25 }],
    });
    const msg = parseServerMessage(raw);
    expect(msg).not.toBeNull();
    if (msg === null || msg.type !== "telemetry") throw new Error("wrong type");
    expect(msg.gains.human).toBe(0.2);
    expect(msg.events?.[0]?.kind).toBe("glow_on");
  });

  it("accepts audio and error messages", () => {
    const audio = parseServerMessage(
      JSON.stringify({
        type: "audio",
        clock: 1.0,
        seq: 7,
        frames: 2,
        pcm: encodePcm(new Int16Array([1, 2, 3, 4])),
        drops: 0,
      }),
    );
    expect(audio?.type).toBe("audio");
    const error = parseServerMessage(
      JSON.stringify({ type: "error", clock: 0.25, code: "malformed", message: "x" }),
    );
    expect(error?.type).toBe("error");
  });

  it("rejects junk", () => {
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage("42")).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: "mystery", clock: 0 }))).toBeNull();
  });

  it("rejects messages without a finite clock", () => {
    const base = fakeTelemetry() as unknown as Record<string, unknown>;
    delete base["clock"];
    expect(parseServerMessage(JSON.stringify(base))).toBeNull();
    expect(
      parseServerMessage(JSON.stringify({ ...fakeTelemetry(), clock: "soon" })),
    ).toBeNull();
  });

  it("rejects telemetry with a missing layer or wrong value type", () => {
    const noLayer = fakeTelemetry();
    delete (noLayer.gains as unknown as Record<string, unknown>)["radio"];
    expect(parseServerMessage(JSON.stringify(noLayer))).toBeNull();

    const badGlow = fakeTelemetry();
    (badGlow.glow as unknown as Record<string, unknown>)["human"] = "yes";
    expect(parseServerMessage(JSON.stringify(badGlow))).toBeNull();
  });

  it("rejects audio without pcm and welcome with bad bounds", () => {
    expect(
      parseServerMessage(
        JSON.stringify({ type: "audio", clock: 0, seq: 0, frames: 2, drops: 0 }),
      ),
    ).toBeNull();
    const scene = fakeScene() as unknown as { floor_bounds: number[] };
    scene.floor_bounds = [0, 1, 2];
    expect(
      parseServerMessage(
        JSON.stringify({
          type: "welcome",
          clock: 0,
          session: "s",
          audio_mode: "pcm",
          scene,
        }),
      ),
    ).toBeNull();
  });
});

describe("buildPose", () => {
  const bounds: [number, number, number, number] = [-1.81, -5.5, 5.65, 2.5];

  it("keeps the avatar at standing height inside the floor", () => {
    const pose = buildPose(100, -100, 0, bounds);
    expect(pose.x).toBe(5.65);
    expect(pose.y).toBe(AVATAR_HEIGHT_M);
    expect(pose.z).toBe(-5.5);
  });

  it("normalizes yaw into [-180, 180)", () => {
    expect(buildPose(0, 0, 270, bounds).yaw).toBe(-90);
    expect(buildPose(0, 0, 180, bounds).yaw).toBe(-180);
    expect(buildPose(0, 0, -45, bounds).yaw).toBe(-45);
  });
});

describe("normalizeYaw", () => {
  it("maps representative angles", () => {
    expect(normalizeYaw(0)).toBe(0);
    expect(normalizeYaw(90)).toBe(90);
    expect(normalizeYaw(540)).toBe(-180);
    expect(normalizeYaw(-180)).toBe(-180);
    expect(normalizeYaw(-190)).toBe(170);
  });
});

describe("buildSlider", () => {
  it("clamps values to [0, 1]", () => {
    expect(buildSlider("natural", 1.4).value).toBe(1);
    expect(buildSlider("human", -0.2).value).toBe(0);
    expect(buildSlider("radio", 0.7).value).toBe(0.7);
  });
});

describe("pcm decoding", () => {
  it("round-trips int16 samples through base64", () => {
    const samples = new Int16Array([0, 1, -1, 32767, -32767, 12345]);
    const decoded = decodePcm(encodePcm(samples));
    expect(Array.from(decoded)).toEqual(Array.from(samples));
  });

  it("maps full-scale int16 to unit floats", () => {
    const floats = pcmToFloat(new Int16Array([32767, -32767, 0]));
    expect(floats[0]).toBe(1);
    expect(floats[1]).toBe(-1);
    expect(floats[2]).toBe(0);
  });
});
