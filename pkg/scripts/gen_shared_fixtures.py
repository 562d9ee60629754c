"""Regenerate the JSON test vectors shared with the browser client.

The client reimplements decimation, the VAD decision rule, and PCM16
WAV assembly; these fixtures pin all three to the server behavior.
Run from the repository root:

    python3 scripts/gen_shared_fixtures.py
"""

import base64
import json
from pathlib import Path

import numpy as np

from vaani.audio import AudioBuffer, resample_decimate, write_wav
from vaani.vad import VadConfig, detect_segments

OUT_DIR = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def decimation_cases():
    rng = np.random.default_rng(101)
    cases = []
    rate_pairs = [(48000, 16000), (44100, 16000), (16000, 8000),
                  (22050, 16000), (16000, 16000), (8000, 3000)]
    for src, dst in rate_pairs:
        n = int(rng.integers(0, 200))
        samples = rng.uniform(-1, 1, n)
        out = resample_decimate(AudioBuffer(samples, src), dst)
        cases.append({
            "src_rate": src,
            "dst_rate": dst,
            "input": samples.tolist(),
            "expected": out.samples.tolist(),
        })
    return cases


def vad_cases():
    rng = np.random.default_rng(102)
    cases = []
    settings = [(400, 0.05, 4), (160, 0.1, 2), (100, 0.3, 0), (64, 0.02, 6)]
    for window, threshold, hangover in settings:
        for _ in range(3):
            n = int(rng.integers(1, 4000))
            samples = rng.normal(0, 0.01, n)
            for _ in range(int(rng.integers(0, 3))):
                lo = int(rng.integers(0, n))
                hi = min(n, lo + int(rng.integers(1, 900)))
                samples[lo:hi] += rng.uniform(-0.9, 0.9, hi - lo)
            segments = detect_segments(AudioBuffer(samples, 16000),
                                       VadConfig(window, threshold, hangover))
            cases.append({
                "window": window,
                "threshold": threshold,
                "hangover": hangover,
                "samples": samples.tolist(),
                "segments": [[s.start_sample, s.end_sample] for s in segments],
            })
    return cases


def wav_cases():
    rng = np.random.default_rng(103)
    cases = []
    # ties at exact .5 quantization steps exercise round-half-even, the
    # clamp cases exercise both int16 rails
    crafted = [
        0.5 / 32768, 1.5 / 32768, 2.5 / 32768, 3.5 / 32768,
        -0.5 / 32768, -1.5 / 32768, -2.5 / 32768, -3.5 / 32768,
        1.0, -1.0, 1.5, -1.5, 32766.5 / 32768, -32766.5 / 32768,
        0.0, 0.25, -0.25,
    ]
    sample_sets = [np.array(crafted), rng.uniform(-1.2, 1.2, 64),
                   rng.uniform(-0.1, 0.1, 7)]
    for rate, samples in zip((16000, 48000, 8000), sample_sets):
        blob = write_wav(AudioBuffer(samples, rate))
        cases.append({
            "sample_rate": rate,
            "samples": samples.tolist(),
            "wav_base64": base64.b64encode(blob).decode("ascii"),
        })
    return cases


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name, cases in (("decimation", decimation_cases()),
                        ("vad", vad_cases()),
                        ("wav", wav_cases())):
        path = OUT_DIR / (name + ".json")
        path.write_text(json.dumps(cases), "utf-8")
        print("wrote %s (%d cases)" % (path, len(cases)))


if __name__ == "__main__":
    main()
