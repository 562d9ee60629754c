/**
 * Client-side speech/silence decision, contract-identical to the
 * server's detector: a window is speech when its peak |amplitude|
 * strictly exceeds the threshold; flagged windows are extended by a
 * hangover and touching extensions merge into [start, end) sample
 * spans.  The live indicator uses the same per-window rule, so the
 * numbers shown while recording match what the server would keep.
 */

export interface VadSettings {
  windowSamples: number;
  threshold: number;
  hangoverWindows: number;
}

export const DEFAULT_VAD: VadSettings = {
  windowSamples: 400,
  threshold: 0.05,
  hangoverWindows: 4,
};

/** Peak |amplitude| of one capture window. */
export function windowPeak(samples: ArrayLike<number>): number {
  let peak = 0;
  for (let i = 0; i < samples.length; i++) {
    const a = Math.abs(samples[i]);
    if (a > peak) peak = a;
  }
  return peak;
}

/** The indicator rule: strictly above threshold means speech. */
export function isSpeech(samples: ArrayLike<number>, settings: VadSettings): boolean {
  return windowPeak(samples) > settings.threshold;
}

/** Full segmentation over a finished recording. */
export function detectSegments(
  samples: ArrayLike<number>,
  settings: VadSettings,
): Array<[number, number]> {
  const { windowSamples, threshold, hangoverWindows } = settings;
  const n = samples.length;
  const numWindows = Math.ceil(n / windowSamples);
  const painted = new Array<boolean>(numWindows).fill(false);
  for (let w = 0; w < numWindows; w++) {
    let peak = 0;
    const end = Math.min(n, (w + 1) * windowSamples);
    for (let i = w * windowSamples; i < end; i++) {
      const a = Math.abs(samples[i]);
      if (a > peak) peak = a;
    }
    if (peak > threshold) {
      const last = Math.min(w + hangoverWindows + 1, numWindows);
      for (let k = w; k < last; k++) painted[k] = true;
    }
  }
  const segments: Array<[number, number]> = [];
  let w = 0;
  while (w < numWindows) {
    if (painted[w]) {
      const start = w;
      while (w < numWindows && painted[w]) w++;
      segments.push([start * windowSamples, Math.min(w * windowSamples, n)]);
    } else {
      w++;
    }
  }
  return segments;
}
