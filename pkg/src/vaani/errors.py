"""Exception types shared across the workbench.

Every error raised by library code derives from :class:`VaaniError` so
callers (CLI, service) can catch data problems in one place without
swallowing programming errors.
"""


class VaaniError(Exception):
    """Base class for all workbench errors."""


# audio ---------------------------------------------------------------

class MalformedContainer(VaaniError):
    """The byte stream is not a well-formed RIFF/WAVE container."""


class UnsupportedEncoding(VaaniError):
    """The WAV container holds something other than 16-bit PCM."""


class UpsampleUnsupported(VaaniError):
    """Decimation cannot raise the sample rate."""


# vad -----------------------------------------------------------------

class EmptyInput(VaaniError):
    """An operation that needs at least one sample received none."""


class SegmentOutOfRange(VaaniError):
    """A speech segment points outside the buffer it was applied to."""


# textnorm ------------------------------------------------------------

class NotFound(VaaniError):
    """Lookup key absent from a table or store."""


class OutOfRange(VaaniError):
    """Number outside the range the word tables cover."""


# g2p -----------------------------------------------------------------

class NonDevanagariCodepoint(VaaniError):
    """A codepoint outside the supported Devanagari subset.

    Carries the offending index in ``index``.
    """

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class InvalidGraphemeSequence(VaaniError):
    """A combining mark appeared where the cluster grammar forbids it."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


# features / net / align ----------------------------------------------

class TooShort(VaaniError):
    """Audio shorter than one analysis window."""


class ShapeMismatch(VaaniError):
    """Array shapes inconsistent with the network or prior."""


class TooFewFrames(VaaniError):
    """Fewer frames than states in the forced-alignment chain."""


# service --------------------------------------------------------------

class AuthFailed(VaaniError):
    """Bad credentials, or a missing/expired session token."""


class VersionConflict(VaaniError):
    """Optimistic save lost: base_version is stale."""


class NoModelLoaded(VaaniError):
    """Recognition requested but the service has no model."""
