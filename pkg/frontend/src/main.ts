/**
 * Entry point: wires the socket, plan view, sliders, scheme switch and
 * audio together. All displayed mix state comes from telemetry; the only
 * local state is the avatar the user is dragging.
 */

import { GainsMixer, PcmScheduler, WebAudioChunkSink, WebAudioGainSink } from "./audio.js";
import { drawPlan, PlanView, type AvatarState } from "./planview.js";
import {
  buildPose,
  buildSlider,
  LAYERS,
  type LayerId,
  type PerLayer,
  type SceneSummary,
  type ServerMessage,
} from "./protocol.js";
import { SessionSocket } from "./socket.js";
import { Throttle } from "./throttle.js";
import {
  applyServer,
  canSendPose,
  initialState,
  setConnection,
  slidersEnabled,
  type UiState,
} from "./uistate.js";

const canvas = document.getElementById("plan") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const clockEl = document.getElementById("clock")!;
const dropsEl = document.getElementById("drops")!;
const touchEl = document.getElementById("touch")!;
const audioButton = document.getElementById("audio-toggle") as HTMLButtonElement;
const schemeButtons = {
  A: document.getElementById("scheme-a") as HTMLButtonElement,
  B: document.getElementById("scheme-b") as HTMLButtonElement,
};

let state: UiState = initialState();
let view: PlanView | null = null;
const avatar: AvatarState = { x: 0, z: 0, yawDeg: 0 };

let gainsMixer: GainsMixer | null = null;
let pcmScheduler: PcmScheduler | null = null;

const socket = new SessionSocket({
  url: (location.protocol === "https:" ? "wss:" : "ws:") + "//" + location.host + "/ws",
  onMessage: handleServer,
  onStateChange: (connected) => {
    state = setConnection(state, connected ? "connected" : "disconnected");
    if (!connected) poseThrottle.clear();
    render();
  },
});

const poseThrottle = new Throttle<[number, number, number]>(([x, z, yaw]) => {
  if (!canSendPose(state) || !state.scene) return;
  socket.send(buildPose(x, z, yaw, state.scene.floor_bounds));
}, 30);

function handleServer(msg: ServerMessage): void {
  state = applyServer(state, msg);
  if (msg.type === "welcome") {
    setupScene(msg.scene);
  } else if (msg.type === "telemetry") {
    gainsMixer?.apply(msg.gains);
  } else if (msg.type === "audio") {
    pcmScheduler?.push(msg);
  }
  render();
}

function setupScene(scene: SceneSummary): void {
  view = new PlanView(scene.floor_bounds, canvas.width, canvas.height);
  // Start the avatar at the mixer desk, facing the sculpture.
  if (avatar.x === 0 && avatar.z === 0) {
    avatar.x = scene.mixer[0];
    avatar.z = scene.mixer[1] + 1.0;
  }
  sendPose();
}

function sendPose(): void {
  poseThrottle.submit([avatar.x, avatar.z, avatar.yawDeg]);
}

// --- Canvas interaction ----------------------------------------------------

let dragging = false;

canvas.addEventListener("pointerdown", (ev) => {
  if (!view) return;
  dragging = true;
  canvas.setPointerCapture(ev.pointerId);
  moveAvatar(ev);
});
canvas.addEventListener("pointermove", (ev) => {
  if (dragging) moveAvatar(ev);
});
canvas.addEventListener("pointerup", () => {
  dragging = false;
});
canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  avatar.yawDeg += ev.deltaY > 0 ? 10 : -10;
  sendPose();
  render();
}, { passive: false });

function moveAvatar(ev: PointerEvent): void {
  if (!view) return;
  const rect = canvas.getBoundingClientRect();
  const [x, z] = view.toWorld(ev.clientX - rect.left, ev.clientY - rect.top);
  avatar.x = x;
  avatar.z = z;
  sendPose();
  render();
}

// --- Sliders and scheme ----------------------------------------------------

const sliderEls = {} as PerLayer<HTMLInputElement>;
const meterEls = {} as PerLayer<HTMLElement>;
for (const layer of LAYERS) {
  sliderEls[layer] = document.getElementById(`slider-${layer}`) as HTMLInputElement;
  meterEls[layer] = document.getElementById(`meter-${layer}`)!;
  sliderEls[layer].addEventListener("input", () => {
    if (!slidersEnabled(state)) return;
    socket.send(buildSlider(layer, Number(sliderEls[layer].value)));
  });
}

for (const scheme of ["A", "B"] as const) {
  schemeButtons[scheme].addEventListener("click", () => {
    socket.send({ type: "scheme", value: scheme });
  });
}

// --- Audio unlock (needs a user gesture) -----------------------------------

audioButton.addEventListener("click", async () => {
  if (!state.scene || gainsMixer || pcmScheduler) return;
  const audioCtx = new AudioContext();
  await audioCtx.resume();
  if (state.audioMode === "gains") {
    const buffers = {} as PerLayer<AudioBuffer>;
    for (const layer of LAYERS) {
      const resp = await fetch(state.scene.tracks[layer]);
      buffers[layer] = await audioCtx.decodeAudioData(await resp.arrayBuffer());
    }
    gainsMixer = new GainsMixer(new WebAudioGainSink(audioCtx, buffers));
    gainsMixer.apply(state.gains);
  } else {
    pcmScheduler = new PcmScheduler(
      new WebAudioChunkSink(audioCtx, state.scene.sample_rate),
      state.scene.sample_rate,
    );
  }
  audioButton.textContent = "audio on";
  audioButton.disabled = true;
});

// --- Rendering -------------------------------------------------------------

function render(): void {
  banner.textContent =
    state.connection === "connected"
      ? state.lastError ?? ""
      : "disconnected — poses are not sent";
  banner.classList.toggle("visible",
    state.connection !== "connected" || state.lastError !== null);

  clockEl.textContent = state.clock.toFixed(2) + " s";
  dropsEl.textContent = String(state.drops + (pcmScheduler?.gaps ?? 0));
  touchEl.classList.toggle("active", state.touch);

  const enabled = slidersEnabled(state);
  for (const layer of LAYERS) {
    // Positions and meters come from telemetry, never from local input.
    sliderEls[layer].value = String(state.sliders[layer]);
    sliderEls[layer].disabled = !enabled;
    meterEls[layer].style.width = (state.gains[layer] * 100).toFixed(1) + "%";
  }
  schemeButtons.A.classList.toggle("active", state.scheme === "A");
  schemeButtons.B.classList.toggle("active", state.scheme === "B");

  if (view && state.scene) {
    drawPlan(ctx, view, state.scene, avatar, {
      scheme: state.scheme,
      glow: state.glow,
      gains: state.gains,
      touch: state.touch,
    });
  }
}

socket.connect();
render();
