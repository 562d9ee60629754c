"""Voice activity detection by per-window peak amplitude.

The decision rule is purely time-domain: cut the signal into fixed-size
windows, take the highest absolute amplitude in each, and call the
window speech when that peak exceeds a threshold.  The threshold is an
experimental knob, not a truth; callers tune it per corpus.  A hangover
keeps a few trailing windows after each speech run so plosive tails and
weak word endings are not clipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer
from .errors import EmptyInput, SegmentOutOfRange

DEFAULT_WINDOW = 400  # 25 ms at 16 kHz
DEFAULT_THRESHOLD = 0.05
DEFAULT_HANGOVER = 4


@dataclass(frozen=True)
class VadConfig:
    window_size_samples: int = DEFAULT_WINDOW
    threshold: float = DEFAULT_THRESHOLD
    hangover_windows: int = DEFAULT_HANGOVER

    def __post_init__(self):
        if self.window_size_samples < 1:
            raise ValueError("window_size_samples must be >= 1")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.hangover_windows < 0:
            raise ValueError("hangover_windows must be >= 0")


@dataclass(frozen=True)
class SpeechSegment:
    """A [start_sample, end_sample) span judged to contain speech."""

    start_sample: int
    end_sample: int

    def __post_init__(self):
        if not 0 <= self.start_sample < self.end_sample:
            raise ValueError("segment must satisfy 0 <= start < end")

    @property
    def length(self) -> int:
        return self.end_sample - self.start_sample


def window_peaks(buffer: AudioBuffer, window_size: int) -> np.ndarray:
    """Max absolute amplitude per window; the final partial window counts."""
    if buffer.channels != 1:
        raise ValueError("window_peaks expects a mono buffer")
    if window_size < 1:
        raise ValueError("window_size must be >= 1")
    n = len(buffer.samples)
    if n == 0:
        raise EmptyInput("buffer has no samples")
    magnitude = np.abs(buffer.samples)
    num_windows = -(-n // window_size)
    peaks = np.empty(num_windows)
    for w in range(num_windows):
        peaks[w] = magnitude[w * window_size:(w + 1) * window_size].max()
    return peaks


def detect_segments(buffer: AudioBuffer, cfg: VadConfig = VadConfig()) -> list[SpeechSegment]:
    """Label windows speech/silence and merge speech runs into segments.

    A window is speech iff its peak exceeds ``cfg.threshold`` (strictly).
    Each run of speech windows is extended by ``hangover_windows``
    trailing windows, overlapping runs re-merge, and window indices map
    back to sample spans (the last span is clipped at the buffer end).
    """
    win = cfg.window_size_samples
    peaks = window_peaks(buffer, win)
    speech = peaks > cfg.threshold
    num_windows = len(peaks)
    n = len(buffer.samples)

    runs: list[list[int]] = []  # [start_window, end_window) pairs
    w = 0
    while w < num_windows:
        if speech[w]:
            start = w
            while w < num_windows and speech[w]:
                w += 1
            end = min(w + cfg.hangover_windows, num_windows)
            if runs and runs[-1][1] >= start:
                runs[-1][1] = max(runs[-1][1], end)
            else:
                runs.append([start, end])
        else:
            w += 1

    return [
        SpeechSegment(start * win, min(end * win, n))
        for start, end in runs
    ]


def gate_audio(buffer: AudioBuffer, segments: list[SpeechSegment]) -> AudioBuffer:
    """Concatenate segment spans, dropping everything between them."""
    if buffer.channels != 1:
        raise ValueError("gate_audio expects a mono buffer")
    n = len(buffer.samples)
    for seg in segments:
        if seg.end_sample > n:
            raise SegmentOutOfRange(
                "segment [%d, %d) exceeds buffer of %d samples"
                % (seg.start_sample, seg.end_sample, n)
            )
    if not segments:
        return AudioBuffer(np.zeros(0), buffer.sample_rate_hz, 1)
    kept = np.concatenate([buffer.samples[s.start_sample:s.end_sample] for s in segments])
    return AudioBuffer(kept, buffer.sample_rate_hz, 1)
