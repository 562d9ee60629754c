/**
 * PCM16 mono WAV assembly, bit-exact with the server's writer:
 * quantization is roundHalfEven(sample * 32768) clamped to the int16
 * range, inside a minimal RIFF/fmt/data layout.
 */

const PCM_SCALE = 32768;

/** Banker's rounding; ties go to the even integer like numpy's round. */
export function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  const diff = x - floor;
  if (diff < 0.5) return floor;
  if (diff > 0.5) return floor + 1;
  return floor % 2 === 0 ? floor : floor + 1;
}

export function quantize(sample: number): number {
  const v = roundHalfEven(sample * PCM_SCALE);
  return Math.min(32767, Math.max(-32768, v));
}

/** Encode mono float samples into a complete WAV file. */
export function encodeWav(samples: ArrayLike<number>, sampleRateHz: number): Uint8Array {
  const numSamples = samples.length;
  const dataBytes = numSamples * 2;
  const buf = new ArrayBuffer(44 + dataBytes);
  const view = new DataView(buf);

  const ascii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };

  ascii(0, "RIFF");
  view.setUint32(4, 36 + dataBytes, true);
  ascii(8, "WAVE");
  ascii(12, "fmt ");
  view.setUint32(16, 16, true); // PCM fmt chunk size
  view.setUint16(20, 1, true); // audio format: integer PCM
  view.setUint16(22, 1, true); // channels
  view.setUint32(24, sampleRateHz, true);
  view.setUint32(28, sampleRateHz * 2, true); // byte rate
  view.setUint16(32, 2, true); // block align
  view.setUint16(34, 16, true); // bits per sample
  ascii(36, "data");
  view.setUint32(40, dataBytes, true);

  for (let i = 0; i < numSamples; i++) {
    view.setInt16(44 + 2 * i, quantize(samples[i]), true);
  }
  return new Uint8Array(buf);
}

export interface WavHeader {
  sampleRateHz: number;
  channels: number;
  bitsPerSample: number;
  numSamples: number;
}

/** Read just the fixed 44-byte header written by encodeWav. */
export function readWavHeader(bytes: Uint8Array): WavHeader {
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const tag = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) {
      if (view.getUint8(offset + i) !== text.charCodeAt(i)) {
        throw new Error(`bad WAV: expected ${text} at byte ${offset}`);
      }
    }
  };
  tag(0, "RIFF");
  tag(8, "WAVE");
  tag(12, "fmt ");
  tag(36, "data");
  const channels = view.getUint16(22, true);
  const bitsPerSample = view.getUint16(34, true);
  const dataBytes = view.getUint32(40, true);
  return {
    sampleRateHz: view.getUint32(24, true),
    channels,
    bitsPerSample,
    numSamples: dataBytes / (channels * (bitsPerSample / 8)),
  };
}
