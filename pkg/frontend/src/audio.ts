/**
 * Audio playback for both modes, behind small injectable interfaces so
 * the scheduling/smoothing logic is testable without a real
 * AudioContext.
 *
 * pcm mode: the server renders; chunks arrive sequenced and are
 * scheduled gaplessly against the audio clock. A sequence gap (the
 * server dropped chunks under backpressure) produces a short dip
 * instead of a click, and the playhead resyncs.
 *
 * gains mode: the three layer files loop locally in sync; telemetry
 * gains are applied with a short linear ramp (never more than 50 ms) so
 * gain steps cannot zipper.
 */

import type { AudioMessage, LayerId, PerLayer } from "./protocol.js";
import { LAYERS, decodePcm, pcmToFloat } from "./protocol.js";

// --- Gains mode ------------------------------------------------------------

export const MAX_GAIN_RAMP_S = 0.05;

export interface GainSink {
  setLayerGain(layer: LayerId, value: number, rampSeconds: number): void;
}

export class GainsMixer {
  constructor(private readonly sink: GainSink) {}

  /** Apply one telemetry gain set, smoothed. */
  apply(gains: PerLayer<number>): void {
    for (const layer of LAYERS) {
      this.sink.setLayerGain(layer, gains[layer], MAX_GAIN_RAMP_S);
    }
  }
}

// --- PCM mode --------------------------------------------------------------

export interface StereoChunk {
  left: Float32Array;
  right: Float32Array;
  /** Audio-clock time (seconds) at which to start this chunk. */
  when: number;
}

export interface ChunkSink {
  /** Current audio-clock time in seconds. */
  now(): number;
  play(chunk: StereoChunk): void;
  /** Brief fade-out/fade-in around a stream discontinuity. */
  dip(atTime: number): void;
}

export function deinterleave(pcm: Int16Array): [Float32Array, Float32Array] {
  const frames = pcm.length / 2;
  const all = pcmToFloat(pcm);
  const left = new Float32Array(frames);
  const right = new Float32Array(frames);
  for (let i = 0; i < frames; i++) {
    left[i] = all[2 * i]!;
    right[i] = all[2 * i + 1]!;
  }
  return [left, right];
}

export class PcmScheduler {
  private playhead = 0;
  private nextSeq: number | null = null;
  private _gaps = 0;

  constructor(
    private readonly sink: ChunkSink,
    private readonly sampleRate: number,
    /** Scheduling safety margin ahead of the audio clock. */
    private readonly leadSeconds = 0.06,
  ) {}

  /** Chunks lost to gaps seen so far (distinct from the server's drops). */
  get gaps(): number {
    return this._gaps;
  }

  push(msg: AudioMessage): void {
    const now = this.sink.now();
    if (this.nextSeq !== null && msg.seq !== this.nextSeq) {
      // The server dropped chunks; fade around the seam and resync.
      this._gaps += 1;
      this.sink.dip(Math.max(this.playhead, now));
      this.playhead = 0;
    }
    this.nextSeq = msg.seq + 1;

    if (this.playhead < now + this.leadSeconds) {
      this.playhead = now + this.leadSeconds;
    }
    const [left, right] = deinterleave(decodePcm(msg.pcm));
    this.sink.play({ left, right, when: this.playhead });
    this.playhead += msg.frames / this.sampleRate;
  }
}

// --- WebAudio adapters (browser only) --------------------------------------

export class WebAudioGainSink implements GainSink {
  private readonly nodes: PerLayer<GainNode>;

  constructor(
    private readonly ctx: AudioContext,
    buffers: PerLayer<AudioBuffer>,
  ) {
    this.nodes = {} as PerLayer<GainNode>;
    for (const layer of LAYERS) {
      const gain = ctx.createGain();
      gain.gain.value = 0;
      gain.connect(ctx.destination);
      const src = ctx.createBufferSource();
      src.buffer = buffers[layer];
      src.loop = true;
      src.connect(gain);
      src.start(); // all three start together: loops stay phase-locked
      this.nodes[layer] = gain;
    }
  }

  setLayerGain(layer: LayerId, value: number, rampSeconds: number): void {
    const param = this.nodes[layer].gain;
    const t = this.ctx.currentTime;
    param.cancelScheduledValues(t);
    param.setValueAtTime(param.value, t);
    param.linearRampToValueAtTime(value, t + rampSeconds);
  }
}

export class WebAudioChunkSink implements ChunkSink {
  private readonly master: GainNode;

  constructor(
    private readonly ctx: AudioContext,
    /** The server's stream rate; the context resamples on playback. */
    private readonly streamRate: number,
  ) {
    this.master = ctx.createGain();
    this.master.connect(ctx.destination);
  }

  now(): number {
    return this.ctx.currentTime;
  }

  play(chunk: StereoChunk): void {
    const buffer = this.ctx.createBuffer(2, chunk.left.length, this.streamRate);
    buffer.getChannelData(0).set(chunk.left);
    buffer.getChannelData(1).set(chunk.right);
    const src = this.ctx.createBufferSource();
    src.buffer = buffer;
    src.connect(this.master);
    src.start(chunk.when);
  }

  dip(atTime: number): void {
    const g = this.master.gain;
    g.cancelScheduledValues(atTime);
    g.setValueAtTime(1, atTime);
    g.linearRampToValueAtTime(0, atTime + 0.01);
    g.linearRampToValueAtTime(1, atTime + 0.03);
  }
}
