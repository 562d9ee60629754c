"""Collaborative transcript correction and recognition server."""

from .app import create_app
from .store import CorpusStore

__all__ = ["create_app", "CorpusStore"]
