"""Password hashing and in-memory session tokens.

Passwords are stored as salted PBKDF2 hashes.  Sessions live in process
memory only: a restart logs everyone out, which is acceptable for a
correction workbench and keeps the on-disk state limited to real data.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import threading
import time

from ..errors import AuthFailed

PBKDF2_ROUNDS = 100_000
DEFAULT_TTL_S = 8 * 3600.0


def hash_password(password: str, salt_hex: str | None = None) -> tuple[str, str]:
    """Salted PBKDF2-SHA256; returns (salt_hex, hash_hex)."""
    salt = bytes.fromhex(salt_hex) if salt_hex else secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, PBKDF2_ROUNDS)
    return salt.hex(), digest.hex()


def verify_password(password: str, salt_hex: str, hash_hex: str) -> bool:
    _, candidate = hash_password(password, salt_hex)
    return hmac.compare_digest(candidate, hash_hex)


class SessionManager:
    """Thread-safe token table; expired tokens fail validation."""

    def __init__(self, ttl_s: float = DEFAULT_TTL_S):
        self.ttl_s = ttl_s
        self._lock = threading.Lock()
        self._sessions: dict[str, tuple[str, float]] = {}  # token -> (user, expiry)

    def create(self, user_id: str) -> str:
        token = secrets.token_hex(16)
        with self._lock:
            self._sessions[token] = (user_id, time.time() + self.ttl_s)
        return token

    def validate(self, token: str) -> str:
        """User id for a live token; AuthFailed on unknown or expired."""
        with self._lock:
            entry = self._sessions.get(token)
            if entry is None:
                raise AuthFailed("invalid session token")
            user_id, expiry = entry
            if time.time() >= expiry:
                del self._sessions[token]
                raise AuthFailed("session expired")
            return user_id

    def revoke(self, token: str) -> None:
        with self._lock:
            self._sessions.pop(token, None)
