"""The recognize endpoint's audio-to-phones pipeline.

parse WAV -> mixdown -> resample to 16 kHz -> VAD gate -> features ->
network forward -> per-frame argmax state -> collapse runs to phone labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio import mixdown, parse_wav, resample_decimate
from ..errors import NoModelLoaded, TooShort
from ..features import extract_features
from ..modelio import ModelBundle
from ..net import forward
from ..vad import SpeechSegment, detect_segments, gate_audio

TARGET_RATE_HZ = 16000


@dataclass
class RecognitionOutput:
    segments: list[SpeechSegment]
    state_sequence: list[str]
    phone_sequence: list[str]


def state_to_phone(label: str) -> str | None:
    """Phone behind a state label; silence maps to None."""
    if label == "sil":
        return None
    return label.rsplit("_", 1)[0]


def collapse_states(labels: list[str]) -> tuple[list[str], list[str]]:
    """Collapse repeated states to runs, then runs to a phone sequence."""
    runs: list[str] = []
    for label in labels:
        if not runs or runs[-1] != label:
            runs.append(label)
    phones: list[str] = []
    for label in runs:
        phone = state_to_phone(label)
        if phone is not None and (not phones or phones[-1] != phone):
            phones.append(phone)
    return runs, phones


def run_recognition(bundle: ModelBundle | None, wav_bytes: bytes) -> RecognitionOutput:
    if bundle is None:
        raise NoModelLoaded("no acoustic model is loaded")
    buffer = mixdown(parse_wav(wav_bytes))
    if buffer.sample_rate_hz != TARGET_RATE_HZ:
        buffer = resample_decimate(buffer, TARGET_RATE_HZ)
    segments = detect_segments(buffer)
    if not segments:
        return RecognitionOutput([], [], [])
    speech = gate_audio(buffer, segments)
    try:
        features = extract_features(buffer=speech, cfg=bundle.feature_config)
    except TooShort:
        return RecognitionOutput(segments, [], [])
    posteriors = forward(bundle.net, features.frames).posteriors
    state_ids = np.argmax(posteriors, axis=1)
    if bundle.state_labels is not None:
        labels = [bundle.state_labels[s] for s in state_ids]
    else:
        labels = [str(int(s)) for s in state_ids]
    per_frame = list(labels)
    _, phones = collapse_states(per_frame)
    return RecognitionOutput(segments, per_frame, phones)
