import math

import numpy as np
import pytest

from vaani.audio import AudioBuffer
from vaani.errors import ShapeMismatch, TooShort
from vaani.features import (
    FeatureConfig,
    band_energies,
    extract_features,
    frame_signal,
    mel_filterbank,
    mel_scale,
    mel_to_hz,
    num_frames,
)


def naive_dft_power(frame):
    """O(n^2) real DFT power spectrum, written without numpy's FFT."""
    n = len(frame)
    bins = n // 2 + 1
    power = np.empty(bins)
    for k in range(bins):
        re = sum(frame[t] * math.cos(-2.0 * math.pi * k * t / n) for t in range(n))
        im = sum(frame[t] * math.sin(-2.0 * math.pi * k * t / n) for t in range(n))
        power[k] = re * re + im * im
    return power


class TestFraming:
    def test_frame_count_formula(self):
        assert num_frames(16000, 400, 160) == 98
        assert num_frames(400, 400, 160) == 1
        assert num_frames(399, 400, 160) == 0
        assert num_frames(560, 400, 160) == 2

    def test_frame_content(self):
        samples = np.arange(20, dtype=np.float64)
        frames = frame_signal(samples, 8, 4)
        assert frames.shape == (4, 8)
        for t in range(4):
            assert np.array_equal(frames[t], samples[4 * t:4 * t + 8])


class TestFilterbank:
    def test_mel_scale_round_trip(self):
        freqs = np.array([0.0, 100.0, 1000.0, 8000.0])
        assert np.allclose(mel_to_hz(mel_scale(freqs)), freqs)

    def test_shape_and_support(self):
        fb = mel_filterbank(24, 400, 16000)
        assert fb.shape == (24, 201)
        assert np.all(fb >= 0.0)
        # every band has support, and peaks at weight 1 somewhere near its center
        for b in range(24):
            assert fb[b].sum() > 0.0

    def test_bands_ordered_by_center(self):
        fb = mel_filterbank(24, 400, 16000)
        centers = [np.argmax(fb[b]) for b in range(24)]
        assert centers == sorted(centers)


class TestBandEnergies:
    def test_matches_naive_dft(self):
        rng = np.random.default_rng(7)
        frame = rng.normal(size=64)
        fb = mel_filterbank(6, 64, 16000)
        got = band_energies(frame[None, :], fb)[0]
        expected = fb @ naive_dft_power(frame)
        assert np.allclose(got, expected, rtol=1e-9, atol=1e-9)

    def test_rejects_mismatched_frame_length(self):
        fb = mel_filterbank(6, 64, 16000)
        with pytest.raises(ShapeMismatch):
            band_energies(np.zeros((1, 100)), fb)


class TestExtractFeatures:
    def test_zero_audio_hits_log_floor(self):
        buf = AudioBuffer(np.zeros(1600), 16000)
        feats = extract_features(buf)
        assert np.all(feats.frames == np.log(1e-10))

    def test_frame_count(self):
        buf = AudioBuffer(np.zeros(16000), 16000)
        feats = extract_features(buf)
        assert feats.num_frames == 98
        assert feats.num_bands == 24
        assert feats.window_samples == 400
        assert feats.frame_shift_samples == 160

    def test_1khz_sine_dominates_its_band(self):
        t = np.arange(16000) / 16000.0
        buf = AudioBuffer(0.5 * np.sin(2.0 * np.pi * 1000.0 * t), 16000)
        feats = extract_features(buf)
        # bands overlap, so 1 kHz may sit inside two triangles
        edges = mel_to_hz(np.linspace(mel_scale(0.0), mel_scale(8000.0), 26))
        containing = {
            b for b in range(24) if edges[b] < 1000.0 < edges[b + 2]
        }
        assert containing
        for row in feats.frames:
            assert int(np.argmax(row)) in containing

    def test_entries_respect_floor(self):
        rng = np.random.default_rng(3)
        buf = AudioBuffer(rng.uniform(-1, 1, 4000), 16000)
        feats = extract_features(buf)
        assert np.all(feats.frames >= np.log(1e-10) - 1e-12)

    def test_too_short(self):
        with pytest.raises(TooShort):
            extract_features(AudioBuffer(np.zeros(399), 16000))

    def test_rejects_stereo(self):
        stereo = AudioBuffer(np.zeros(800), 16000, channels=2)
        with pytest.raises(ShapeMismatch):
            extract_features(stereo)

    def test_custom_config(self):
        buf = AudioBuffer(np.zeros(1000), 16000)
        feats = extract_features(buf, FeatureConfig(200, 100, 10))
        assert feats.num_frames == 9
        assert feats.num_bands == 10

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FeatureConfig(window_samples=0)
        with pytest.raises(ValueError):
            FeatureConfig(log_floor=0.0)
