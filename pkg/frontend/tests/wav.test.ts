import { describe, expect, it } from "vitest";

import { encodeWav, quantize, readWavHeader, roundHalfEven } from "../src/wav.js";
import cases from "./fixtures/wav.json";

interface WavCase {
  sample_rate: number;
  samples: number[];
  wav_base64: string;
}

describe("roundHalfEven", () => {
  it("matches banker's rounding on ties", () => {
    expect(roundHalfEven(0.5)).toBe(0);
    expect(roundHalfEven(1.5)).toBe(2);
    expect(roundHalfEven(2.5)).toBe(2);
    expect(roundHalfEven(3.5)).toBe(4);
    expect(roundHalfEven(-0.5)).toBe(0);
    expect(roundHalfEven(-1.5)).toBe(-2);
    expect(roundHalfEven(-2.5)).toBe(-2);
    expect(roundHalfEven(-3.5)).toBe(-4);
  });

  it("rounds non-ties to nearest", () => {
    expect(roundHalfEven(2.4999)).toBe(2);
    expect(roundHalfEven(2.5001)).toBe(3);
    expect(roundHalfEven(-2.4999)).toBe(-2);
    expect(roundHalfEven(-2.5001)).toBe(-3);
  });
});

describe("quantize", () => {
  it("clamps to the int16 rails", () => {
    expect(quantize(1.0)).toBe(32767);
    expect(quantize(1.5)).toBe(32767);
    expect(quantize(-1.0)).toBe(-32768);
    expect(quantize(-1.5)).toBe(-32768);
    expect(quantize(0)).toBe(0);
  });
});

describe("encodeWav", () => {
  it("reproduces every shared golden file byte for byte", () => {
    for (const c of cases as WavCase[]) {
      const got = encodeWav(c.samples, c.sample_rate);
      const want = Uint8Array.from(atob(c.wav_base64), (ch) => ch.charCodeAt(0));
      expect(got).toEqual(want);
    }
  });

  it("writes a mono PCM16 header readable by readWavHeader", () => {
    const wav = encodeWav([0, 0.5, -0.5], 16000);
    expect(readWavHeader(wav)).toEqual({
      sampleRateHz: 16000,
      channels: 1,
      bitsPerSample: 16,
      numSamples: 3,
    });
    expect(wav.length).toBe(44 + 6);
  });

  it("rejects byte soup in the header reader", () => {
    expect(() => readWavHeader(encodeWav([1], 8000).map((b) => b ^ 0xff))).toThrow(/bad WAV/);
  });
});
