"""FastAPI application wiring: routes, auth dependency, error mapping."""

from __future__ import annotations

import base64
import binascii
import os
from pathlib import Path

from fastapi import Depends, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse
from fastapi.security import HTTPAuthorizationCredentials, HTTPBearer
from fastapi.staticfiles import StaticFiles

from ..errors import (
    AuthFailed,
    EmptyInput,
    MalformedContainer,
    NoModelLoaded,
    NotFound,
    OutOfRange,
    UnsupportedEncoding,
    UpsampleUnsupported,
    VaaniError,
    VersionConflict,
)
from ..modelio import ModelBundle, load_model
from ..textnorm import load_abbrev_table, load_number_table, normalize_text
from . import schemas
from .auth import SessionManager
from .pipeline import run_recognition
from .store import CorpusStore, UserAccount

# domain error -> (HTTP status, stable error code)
ERROR_MAP: list[tuple[type, int, str]] = [
    (AuthFailed, 401, "auth_failed"),
    (VersionConflict, 409, "version_conflict"),
    (NotFound, 404, "not_found"),
    (NoModelLoaded, 503, "no_model"),
    (MalformedContainer, 400, "malformed_audio"),
    (UnsupportedEncoding, 400, "unsupported_encoding"),
    (UpsampleUnsupported, 400, "unsupported_rate"),
    (EmptyInput, 400, "empty_input"),
    (OutOfRange, 400, "out_of_range"),
    (VaaniError, 400, "bad_request"),
]


def create_app(data_dir: str | os.PathLike, model_path: str | os.PathLike | None = None,
               frontend_dir: str | os.PathLike | None = None,
               session_ttl_s: float | None = None) -> FastAPI:
    store = CorpusStore(data_dir)
    sessions = SessionManager(**({"ttl_s": session_ttl_s} if session_ttl_s else {}))
    bundle: ModelBundle | None = load_model(model_path) if model_path else None
    numbers = load_number_table()
    abbrevs = load_abbrev_table()

    app = FastAPI(title="vaani corpus service", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.sessions = sessions
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    bearer = HTTPBearer(auto_error=False)

    def current_user(
        credentials: HTTPAuthorizationCredentials | None = Depends(bearer),
    ) -> UserAccount:
        if credentials is None:
            raise AuthFailed("missing bearer token")
        return store.get_user(sessions.validate(credentials.credentials))

    for exc_type, status, code in ERROR_MAP:
        def handler(request: Request, exc: Exception, _status=status, _code=code):
            return JSONResponse({"error": _code}, status_code=_status)
        app.add_exception_handler(exc_type, handler)

    @app.exception_handler(RequestValidationError)
    def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse({"error": "invalid_request"}, status_code=400)

    @app.post("/api/login", response_model=schemas.LoginResponse)
    def login(body: schemas.LoginRequest):
        account = store.authenticate(body.user_id, body.password)
        return schemas.LoginResponse(
            token=sessions.create(account.user_id),
            user_id=account.user_id,
            language_id=account.language_id,
        )

    @app.get("/api/transcripts", response_model=list[schemas.TranscriptSummary])
    def list_transcripts(user: UserAccount = Depends(current_user)):
        return [
            schemas.TranscriptSummary(doc_id=d.doc_id, audio_filename=d.audio_filename,
                                      version=d.version)
            for d in store.list_docs(user.language_id)
        ]

    @app.get("/api/transcripts/{doc_id}", response_model=schemas.TranscriptResponse)
    def get_transcript(doc_id: str, user: UserAccount = Depends(current_user)):
        doc = store.get_doc(doc_id)
        if doc.language_id != user.language_id:
            raise NotFound("no transcript %r" % doc_id)
        return schemas.TranscriptResponse(**{
            "doc_id": doc.doc_id, "audio_filename": doc.audio_filename,
            "text": doc.text, "version": doc.version, "language_id": doc.language_id,
        })

    @app.put("/api/transcripts/{doc_id}", response_model=schemas.SaveResponse)
    def save_transcript(doc_id: str, body: schemas.SaveRequest,
                        user: UserAccount = Depends(current_user)):
        doc = store.get_doc(doc_id)
        if doc.language_id != user.language_id:
            raise NotFound("no transcript %r" % doc_id)
        new_version = store.save_transcript(doc_id, user.user_id, body.text,
                                            body.base_version)
        return schemas.SaveResponse(new_version=new_version)

    @app.post("/api/normalize", response_model=schemas.NormalizeResponse)
    def normalize(body: schemas.NormalizeRequest,
                  user: UserAccount = Depends(current_user)):
        if body.kind == "numbers":
            text = normalize_text(body.text, numbers=numbers)
        else:
            text = normalize_text(body.text, abbrevs=abbrevs)
        return schemas.NormalizeResponse(text=text)

    @app.get("/api/edits", response_model=list[schemas.EditRecordResponse])
    def edits(doc: str | None = None, user: str | None = None,
              account: UserAccount = Depends(current_user)):
        records = store.list_edits(doc_id=doc, user_id=user)
        return [schemas.EditRecordResponse(**r.__dict__) for r in records]

    @app.post("/api/recognize", response_model=schemas.RecognizeResponse)
    async def recognize(request: Request, user: UserAccount = Depends(current_user)):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("audio")
            if upload is None or isinstance(upload, str):
                raise MalformedContainer("multipart field 'audio' missing")
            wav_bytes = await upload.read()
        else:
            body = schemas.RecognizeRequest.model_validate(await request.json())
            try:
                wav_bytes = base64.b64decode(body.wav_base64, validate=True)
            except (binascii.Error, ValueError) as exc:
                raise MalformedContainer("invalid base64 audio") from exc
        result = run_recognition(bundle, wav_bytes)
        return schemas.RecognizeResponse(
            segments=[schemas.SegmentResponse(start_sample=s.start_sample,
                                              end_sample=s.end_sample)
                      for s in result.segments],
            state_sequence=result.state_sequence,
            phone_sequence=result.phone_sequence,
        )

    @app.get("/audio/{filename}")
    def audio_file(filename: str):
        # transcripts reference bare filenames; reject any path structure
        if "/" in filename or "\\" in filename or filename.startswith("."):
            raise NotFound("no audio %r" % filename)
        path = store.audio_dir / filename
        if not path.is_file():
            raise NotFound("no audio %r" % filename)
        return FileResponse(path)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
