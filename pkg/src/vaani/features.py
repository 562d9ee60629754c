"""Log triangular-band energy features for acoustic modeling.

Each frame of ``window`` samples (shifted by ``shift``) is transformed
with a real DFT; the magnitude-squared spectrum is pooled into ``num_bands``
mel-spaced triangular bands and floored before the log so silence maps to
``log(log_floor)`` instead of -inf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioBuffer
from .errors import ShapeMismatch, TooShort

DEFAULT_WINDOW = 400
DEFAULT_SHIFT = 160
DEFAULT_NUM_BANDS = 24
DEFAULT_LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class FeatureConfig:
    window_samples: int = DEFAULT_WINDOW
    shift_samples: int = DEFAULT_SHIFT
    num_bands: int = DEFAULT_NUM_BANDS
    log_floor: float = DEFAULT_LOG_FLOOR

    def __post_init__(self):
        if self.window_samples <= 0 or self.shift_samples <= 0:
            raise ValueError("window and shift must be positive")
        if self.num_bands <= 0:
            raise ValueError("num_bands must be positive")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")


@dataclass(frozen=True)
class FeatureMatrix:
    frames: np.ndarray  # T x num_bands, log band energies
    frame_shift_samples: int
    window_samples: int

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def num_bands(self) -> int:
        return self.frames.shape[1]


def num_frames(num_samples: int, window: int, shift: int) -> int:
    """Frame count: 1 + floor((N - window) / shift), 0 when N < window."""
    if num_samples < window:
        return 0
    return 1 + (num_samples - window) // shift


def frame_signal(samples: np.ndarray, window: int, shift: int) -> np.ndarray:
    """Stack overlapping frames into a T x window matrix (copies)."""
    count = num_frames(len(samples), window, shift)
    frames = np.empty((count, window), dtype=np.float64)
    for t in range(count):
        frames[t] = samples[t * shift:t * shift + window]
    return frames


def mel_scale(freq_hz: np.ndarray | float) -> np.ndarray | float:
    return 2595.0 * np.log10(1.0 + np.asarray(freq_hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel: np.ndarray | float) -> np.ndarray | float:
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(num_bands: int, window: int, sample_rate_hz: int) -> np.ndarray:
    """Triangular mel filters as a num_bands x (window // 2 + 1) weight matrix.

    Band edges are num_bands + 2 points spaced uniformly on the mel scale
    between 0 Hz and Nyquist; band b rises over (edge[b], edge[b+1]) and
    falls over (edge[b+1], edge[b+2]).
    """
    nyquist = sample_rate_hz / 2.0
    edges_hz = mel_to_hz(np.linspace(mel_scale(0.0), mel_scale(nyquist), num_bands + 2))
    bin_hz = np.arange(window // 2 + 1) * (sample_rate_hz / window)
    weights = np.zeros((num_bands, len(bin_hz)))
    for b in range(num_bands):
        lo, center, hi = edges_hz[b], edges_hz[b + 1], edges_hz[b + 2]
        rising = (bin_hz - lo) / (center - lo)
        falling = (hi - bin_hz) / (hi - center)
        weights[b] = np.clip(np.minimum(rising, falling), 0.0, None)
    return weights


def band_energies(frames: np.ndarray, filterbank: np.ndarray) -> np.ndarray:
    """Pool per-frame power spectra (|DFT|^2) into filterbank bands."""
    if frames.shape[1] != 2 * (filterbank.shape[1] - 1):
        raise ShapeMismatch(
            "frame length %d does not match filterbank for window %d"
            % (frames.shape[1], 2 * (filterbank.shape[1] - 1))
        )
    spectra = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    return spectra @ filterbank.T


def extract_features(buffer: AudioBuffer, cfg: FeatureConfig | None = None) -> FeatureMatrix:
    """Log mel-band energies for a mono buffer.

    Raises TooShort when the buffer holds fewer samples than one window.
    """
    cfg = cfg or FeatureConfig()
    if buffer.channels != 1:
        raise ShapeMismatch("features require mono audio, got %d channels" % buffer.channels)
    if buffer.num_frames < cfg.window_samples:
        raise TooShort(
            "need at least %d samples, got %d" % (cfg.window_samples, buffer.num_frames)
        )
    frames = frame_signal(buffer.samples, cfg.window_samples, cfg.shift_samples)
    filterbank = mel_filterbank(cfg.num_bands, cfg.window_samples, buffer.sample_rate_hz)
    energies = band_energies(frames, filterbank)
    log_energies = np.log(np.maximum(energies, cfg.log_floor))
    return FeatureMatrix(log_energies, cfg.shift_samples, cfg.window_samples)
