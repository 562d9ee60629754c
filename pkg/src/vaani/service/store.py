"""Document-oriented on-disk corpus store.

Layout under the data directory:

- ``docs/{doc_id}.json``     one document per transcript
- ``exports/{doc_id}.txt``   plain-text export, rewritten on each save
- ``edits.jsonl``            append-only change log, fsynced per record
- ``users.json``             account table (salted password hashes)
- ``audio/``                 wav files referenced by transcripts

All mutations to one document serialize through a per-document lock; the
change-log append and the version bump happen under that lock so the
conservation law (records per doc == version - 1) holds even under
concurrent saves.  Saves fail with VersionConflict instead of merging.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from ..errors import AuthFailed, NotFound, VersionConflict
from . import auth


@dataclass(frozen=True)
class UserAccount:
    user_id: str
    salt: str
    password_hash: str
    language_id: str


@dataclass(frozen=True)
class TranscriptDoc:
    doc_id: str
    audio_filename: str
    text: str
    version: int
    language_id: str


@dataclass(frozen=True)
class EditRecord:
    record_id: str
    doc_id: str
    user_id: str
    timestamp: int  # UTC milliseconds
    before_text: str
    after_text: str
    resulting_version: int


def _fsync_write(path: Path, data: bytes) -> None:
    """Write then atomically replace, fsyncing file and directory."""
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    dir_fd = os.open(path.parent, os.O_RDONLY)
    try:
        os.fsync(dir_fd)
    finally:
        os.close(dir_fd)


def _doc_bytes(doc: TranscriptDoc) -> bytes:
    return (json.dumps(asdict(doc), ensure_ascii=False, sort_keys=True, indent=2)
            + "\n").encode("utf-8")


class CorpusStore:
    def __init__(self, data_dir: str | os.PathLike):
        self.data_dir = Path(data_dir)
        self.docs_dir = self.data_dir / "docs"
        self.exports_dir = self.data_dir / "exports"
        self.audio_dir = self.data_dir / "audio"
        self.edits_path = self.data_dir / "edits.jsonl"
        self.users_path = self.data_dir / "users.json"
        for d in (self.docs_dir, self.exports_dir, self.audio_dir):
            d.mkdir(parents=True, exist_ok=True)

        self._master_lock = threading.Lock()
        self._log_lock = threading.Lock()
        self._doc_locks: dict[str, threading.Lock] = {}
        self._docs: dict[str, TranscriptDoc] = {}
        self._edits: list[EditRecord] = []
        self._users: dict[str, UserAccount] = {}
        self._load()

    # -- loading ---------------------------------------------------------

    def _load(self) -> None:
        for path in sorted(self.docs_dir.glob("*.json")):
            doc = TranscriptDoc(**json.loads(path.read_text("utf-8")))
            self._docs[doc.doc_id] = doc
            self._doc_locks[doc.doc_id] = threading.Lock()
        if self.edits_path.exists():
            with open(self.edits_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._edits.append(EditRecord(**json.loads(line)))
        if self.users_path.exists():
            raw = json.loads(self.users_path.read_text("utf-8"))
            for user_id, entry in raw.items():
                self._users[user_id] = UserAccount(user_id=user_id, **entry)

    # -- users -----------------------------------------------------------

    def add_user(self, user_id: str, password: str, language_id: str) -> None:
        if not user_id or not password:
            raise ValueError("user id and password must be non-empty")
        with self._master_lock:
            if user_id in self._users:
                raise ValueError("user %r already exists" % user_id)
            salt, digest = auth.hash_password(password)
            self._users[user_id] = UserAccount(user_id, salt, digest, language_id)
            self._write_users()

    def _write_users(self) -> None:
        payload = {
            u.user_id: {"salt": u.salt, "password_hash": u.password_hash,
                        "language_id": u.language_id}
            for u in self._users.values()
        }
        _fsync_write(self.users_path,
                     (json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2)
                      + "\n").encode("utf-8"))

    def authenticate(self, user_id: str, password: str) -> UserAccount:
        """AuthFailed is identical for unknown users and wrong passwords."""
        account = self._users.get(user_id)
        if account is None or not auth.verify_password(
                password, account.salt, account.password_hash):
            raise AuthFailed("bad credentials")
        return account

    def get_user(self, user_id: str) -> UserAccount:
        account = self._users.get(user_id)
        if account is None:
            raise NotFound("no such user")
        return account

    # -- documents -------------------------------------------------------

    def _doc_lock(self, doc_id: str) -> threading.Lock:
        with self._master_lock:
            lock = self._doc_locks.get(doc_id)
            if lock is None:
                raise NotFound("no transcript %r" % doc_id)
            return lock

    def list_docs(self, language_id: str | None = None) -> list[TranscriptDoc]:
        with self._master_lock:
            docs = sorted(self._docs.values(), key=lambda d: d.doc_id)
        if language_id is None:
            return docs
        return [d for d in docs if d.language_id == language_id]

    def get_doc(self, doc_id: str) -> TranscriptDoc:
        with self._master_lock:
            doc = self._docs.get(doc_id)
        if doc is None:
            raise NotFound("no transcript %r" % doc_id)
        return doc

    def add_doc(self, doc_id: str, audio_filename: str, text: str,
                language_id: str) -> TranscriptDoc:
        doc = TranscriptDoc(doc_id, audio_filename, text, 1, language_id)
        with self._master_lock:
            if doc_id in self._docs:
                raise ValueError("doc %r already exists" % doc_id)
            self._docs[doc_id] = doc
            self._doc_locks[doc_id] = threading.Lock()
        self._write_doc(doc)
        self._export_txt(doc)
        return doc

    def _write_doc(self, doc: TranscriptDoc) -> None:
        _fsync_write(self.docs_dir / (doc.doc_id + ".json"), _doc_bytes(doc))

    def _export_txt(self, doc: TranscriptDoc) -> None:
        _fsync_write(self.exports_dir / (doc.doc_id + ".txt"),
                     doc.text.encode("utf-8"))

    # -- saves and the change log ----------------------------------------

    def save_transcript(self, doc_id: str, user_id: str, new_text: str,
                        base_version: int) -> int:
        """Optimistic save: returns the new version or raises VersionConflict."""
        lock = self._doc_lock(doc_id)
        with lock:
            doc = self._docs[doc_id]
            if base_version != doc.version:
                raise VersionConflict(
                    "base version %d is stale (current %d)" % (base_version, doc.version)
                )
            record = EditRecord(
                record_id=uuid.uuid4().hex,
                doc_id=doc_id,
                user_id=user_id,
                timestamp=int(time.time() * 1000),
                before_text=doc.text,
                after_text=new_text,
                resulting_version=doc.version + 1,
            )
            self._append_edit(record)
            updated = replace(doc, text=new_text, version=doc.version + 1)
            self._write_doc(updated)
            self._export_txt(updated)
            with self._master_lock:
                self._docs[doc_id] = updated
            return updated.version

    def _append_edit(self, record: EditRecord) -> None:
        line = json.dumps(asdict(record), ensure_ascii=False, sort_keys=True) + "\n"
        with self._log_lock:
            with open(self.edits_path, "ab") as fh:
                fh.write(line.encode("utf-8"))
                fh.flush()
                os.fsync(fh.fileno())
            self._edits.append(record)

    def list_edits(self, doc_id: str | None = None,
                   user_id: str | None = None) -> list[EditRecord]:
        with self._log_lock:
            records = list(self._edits)
        if doc_id is not None:
            records = [r for r in records if r.doc_id == doc_id]
        if user_id is not None:
            records = [r for r in records if r.user_id == user_id]
        return sorted(records, key=lambda r: (r.timestamp, r.resulting_version))

    # -- bulk import -----------------------------------------------------

    def import_manifest(self, manifest_path: str | os.PathLike,
                        language_id: str) -> tuple[int, int]:
        """TSV rows doc_id<TAB>audio_filename<TAB>transcript_path.

        Existing doc_ids are skipped, never overwritten.  Returns
        (imported, skipped).
        """
        manifest_path = Path(manifest_path)
        imported = skipped = 0
        for line_no, line in enumerate(
                manifest_path.read_text("utf-8").splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError("manifest line %d needs 3 tab-separated fields" % line_no)
            doc_id, audio_filename, transcript_path = parts
            text_file = Path(transcript_path)
            if not text_file.is_absolute():
                text_file = manifest_path.parent / text_file
            text = text_file.read_text("utf-8")
            try:
                self.add_doc(doc_id, audio_filename, text, language_id)
                imported += 1
            except ValueError:
                skipped += 1
        return imported, skipped
