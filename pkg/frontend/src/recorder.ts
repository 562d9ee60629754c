/**
 * Recording pipeline state: accumulate capture-rate chunks, drive the
 * live speech indicator, and on stop emit a 16 kHz mono PCM16 WAV.
 * Microphone plumbing stays in the page layer; this module is pure so
 * the contract (decimation formula, VAD rule, WAV layout) is testable.
 */

import { decimate } from "./resample.js";
import { DEFAULT_VAD, VadSettings, isSpeech } from "./vad.js";
import { encodeWav } from "./wav.js";

export const TARGET_RATE = 16000;

export class RecorderState {
  readonly captureRateHz: number;
  private chunks: Float64Array[] = [];
  private totalSamples = 0;
  speaking = false;

  constructor(
    captureRateHz: number,
    private readonly vad: VadSettings = DEFAULT_VAD,
  ) {
    if (!Number.isInteger(captureRateHz) || captureRateHz < TARGET_RATE) {
      throw new Error(`capture rate must be an integer >= ${TARGET_RATE} Hz`);
    }
    this.captureRateHz = captureRateHz;
  }

  get durationS(): number {
    return this.totalSamples / this.captureRateHz;
  }

  /** Feed one capture buffer; returns the live indicator for that chunk. */
  push(chunk: ArrayLike<number>): boolean {
    const copy = new Float64Array(chunk.length);
    for (let i = 0; i < chunk.length; i++) copy[i] = chunk[i];
    this.chunks.push(copy);
    this.totalSamples += copy.length;
    // scale the indicator window from the 16 kHz contract to capture rate
    const windowSamples = Math.max(
      1,
      Math.round((this.vad.windowSamples * this.captureRateHz) / TARGET_RATE),
    );
    const tail = copy.length >= windowSamples ? copy.subarray(copy.length - windowSamples) : copy;
    this.speaking = isSpeech(tail, { ...this.vad, windowSamples: tail.length });
    return this.speaking;
  }

  /** All captured audio downsampled to the wire rate. */
  samplesAt16k(): Float64Array {
    const joined = new Float64Array(this.totalSamples);
    let at = 0;
    for (const chunk of this.chunks) {
      joined.set(chunk, at);
      at += chunk.length;
    }
    return decimate(joined, this.captureRateHz, TARGET_RATE);
  }

  /** Finished WAV payload: always 16000 Hz mono PCM16. */
  buildWav(): Uint8Array {
    return encodeWav(this.samplesAt16k(), TARGET_RATE);
  }

  reset(): void {
    this.chunks = [];
    this.totalSamples = 0;
    this.speaking = false;
  }
}
