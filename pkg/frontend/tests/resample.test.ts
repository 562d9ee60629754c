import { describe, expect, it } from "vitest";

import { decimate } from "../src/resample.js";
import cases from "./fixtures/decimation.json";

interface DecimationCase {
  src_rate: number;
  dst_rate: number;
  input: number[];
  expected: number[];
}

describe("decimate", () => {
  it("reproduces every shared fixture bit-exactly", () => {
    for (const c of cases as DecimationCase[]) {
      const out = decimate(c.input, c.src_rate, c.dst_rate);
      expect(Array.from(out)).toEqual(c.expected);
    }
  });

  it("follows the floor length law", () => {
    const input = new Float64Array(1000).fill(0.5);
    expect(decimate(input, 44100, 16000).length).toBe(Math.floor((1000 * 16000) / 44100));
    expect(decimate(input, 16000, 16000).length).toBe(1000);
  });

  it("picks floor-index source samples", () => {
    const input = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];
    // 10 samples at 16 kHz down to 8 kHz: every second sample
    expect(Array.from(decimate(input, 16000, 8000))).toEqual([0, 2, 4, 6, 8]);
  });

  it("rejects raising the rate", () => {
    expect(() => decimate([1, 2, 3], 16000, 48000)).toThrow(/cannot decimate/);
  });

  it("rejects non-integer rates", () => {
    expect(() => decimate([1], 16000.5, 8000)).toThrow(/positive integers/);
    expect(() => decimate([1], 16000, 0)).toThrow(/positive integers/);
  });

  it("handles empty input", () => {
    expect(decimate([], 48000, 16000).length).toBe(0);
  });
});
