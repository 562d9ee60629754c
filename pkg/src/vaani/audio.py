"""PCM WAV audio: parsing, writing, mixdown, and decimation resampling.

Everything downstream (VAD, features, recognition) consumes 16 kHz mono
buffers produced here.  Samples are kept as float64 in [-1.0, 1.0];
quantization to disk is ``round(sample * 32768)`` clamped to the int16
range, and decode is ``value / 32768``, so any decoded buffer survives a
write/parse round trip sample-exact.

Resampling is deliberately plain sample omission (``output[j] =
input[floor(j * src / dst)]``) with no anti-alias filtering; content
above the target Nyquist will alias.  That is the accepted fidelity
caveat of this pipeline.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import MalformedContainer, UnsupportedEncoding, UpsampleUnsupported

PCM_SCALE = 32768  # decode divisor and encode multiplier

_FMT_PCM = 1


@dataclass(frozen=True)
class AudioBuffer:
    """A sampled waveform. ``samples`` is flat; channels interleave."""

    samples: np.ndarray
    sample_rate_hz: int
    channels: int = 1

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.channels < 1:
            raise ValueError("channels must be >= 1")
        if len(self.samples) % self.channels != 0:
            raise ValueError("sample count must be a multiple of channels")

    @property
    def num_frames(self) -> int:
        return len(self.samples) // self.channels

    @property
    def duration_s(self) -> float:
        return self.num_frames / self.sample_rate_hz


@dataclass(frozen=True)
class WavInfo:
    """Container metadata pulled from the RIFF header."""

    encoding: str  # only "pcm16" is accepted
    sample_rate_hz: int
    channels: int
    data_byte_length: int


def _read_chunks(data: bytes):
    """Yield (chunk_id, payload) for every top-level RIFF chunk."""
    pos = 12
    while pos < len(data):
        if pos + 8 > len(data):
            raise MalformedContainer("truncated chunk header at byte %d" % pos)
        cid = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8:pos + 8 + size]
        if len(body) < size:
            raise MalformedContainer(
                "chunk %r declares %d bytes but only %d remain" % (cid, size, len(body))
            )
        yield cid, body
        pos += 8 + size + (size & 1)  # chunks are word-aligned


def parse_wav_info(data: bytes) -> WavInfo:
    """Validate the container and return header metadata without decoding."""
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedContainer("not a RIFF/WAVE stream")
    fmt = None
    payload = None
    for cid, body in _read_chunks(data):
        if cid == b"fmt " and fmt is None:
            if len(body) < 16:
                raise MalformedContainer("fmt chunk shorter than 16 bytes")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data" and payload is None:
            payload = body
    if fmt is None:
        raise MalformedContainer("missing fmt chunk")
    if payload is None:
        raise MalformedContainer("missing data chunk")
    audio_format, channels, rate, _byte_rate, _block_align, bits = fmt
    if audio_format != _FMT_PCM or bits != 16:
        raise UnsupportedEncoding(
            "only 16-bit PCM is supported (format=%d, bits=%d)" % (audio_format, bits)
        )
    if channels < 1 or rate <= 0:
        raise MalformedContainer("fmt declares %d channels at %d Hz" % (channels, rate))
    if len(payload) % (2 * channels) != 0:
        raise MalformedContainer("data chunk does not hold whole frames")
    return WavInfo("pcm16", rate, channels, len(payload))


def parse_wav(data: bytes) -> AudioBuffer:
    """Decode a 16-bit PCM RIFF/WAVE byte stream.

    Raises MalformedContainer for structural problems and
    UnsupportedEncoding for non-PCM16 content.
    """
    info = parse_wav_info(data)
    # parse_wav_info validated structure; re-walk to grab the data body
    payload = next(body for cid, body in _read_chunks(data) if cid == b"data")
    samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / PCM_SCALE
    return AudioBuffer(samples, info.sample_rate_hz, info.channels)


def write_wav(buffer: AudioBuffer) -> bytes:
    """Encode a buffer as 16-bit PCM little-endian RIFF/WAVE."""
    quantized = np.clip(np.round(buffer.samples * PCM_SCALE), -32768, 32767)
    pcm = quantized.astype("<i2").tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(pcm),
        b"WAVE",
        b"fmt ",
        16,
        _FMT_PCM,
        buffer.channels,
        buffer.sample_rate_hz,
        buffer.sample_rate_hz * buffer.channels * 2,
        buffer.channels * 2,
        16,
        b"data",
        len(pcm),
    )
    return header + pcm


def mixdown(buffer: AudioBuffer) -> AudioBuffer:
    """Average interleaved channels into a mono buffer."""
    if buffer.channels == 1:
        return buffer
    frames = buffer.samples.reshape(-1, buffer.channels)
    return AudioBuffer(frames.mean(axis=1), buffer.sample_rate_hz, 1)


def resample_decimate(buffer: AudioBuffer, target_rate_hz: int) -> AudioBuffer:
    """Downsample by omitting samples: ``output[j] = input[j*src//dst]``.

    Output length is ``floor(len * dst / src)``.  Non-integer rate ratios
    (44100 -> 16000) are fine; upsampling is not.
    """
    if buffer.channels != 1:
        raise ValueError("resample_decimate expects a mono buffer")
    if target_rate_hz <= 0:
        raise ValueError("target_rate_hz must be positive")
    src = buffer.sample_rate_hz
    if target_rate_hz > src:
        raise UpsampleUnsupported(
            "cannot decimate %d Hz up to %d Hz" % (src, target_rate_hz)
        )
    if target_rate_hz == src:
        return buffer
    out_len = len(buffer.samples) * target_rate_hz // src
    indices = (np.arange(out_len, dtype=np.int64) * src) // target_rate_hz
    return AudioBuffer(buffer.samples[indices], target_rate_hz, 1)
