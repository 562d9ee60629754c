"""Request and response bodies for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class LoginRequest(BaseModel):
    user_id: str
    password: str


class LoginResponse(BaseModel):
    token: str
    user_id: str
    language_id: str


class TranscriptSummary(BaseModel):
    doc_id: str
    audio_filename: str
    version: int


class TranscriptResponse(BaseModel):
    doc_id: str
    audio_filename: str
    text: str
    version: int
    language_id: str


class SaveRequest(BaseModel):
    text: str
    base_version: int = Field(ge=1)


class SaveResponse(BaseModel):
    new_version: int


class NormalizeRequest(BaseModel):
    text: str
    kind: Literal["numbers", "abbrev"]


class NormalizeResponse(BaseModel):
    text: str


class EditRecordResponse(BaseModel):
    record_id: str
    doc_id: str
    user_id: str
    timestamp: int
    before_text: str
    after_text: str
    resulting_version: int


class RecognizeRequest(BaseModel):
    wav_base64: str


class SegmentResponse(BaseModel):
    start_sample: int
    end_sample: int


class RecognizeResponse(BaseModel):
    segments: list[SegmentResponse]
    state_sequence: list[str]
    phone_sequence: list[str]
