"""Typed errors shared across the toolkit.

Every failure surfaced to callers derives from TracepartError so the CLI can
map tool failures to exit code 1 and usage problems to exit code 2.
"""

from __future__ import annotations


class TracepartError(Exception):
    """Base class for all toolkit errors."""


class ManifestMissing(TracepartError):
    """The manifest file does not exist."""


class ManifestInvalid(TracepartError):
    """The manifest exists but violates the expected schema."""


class TraceFileMissing(TracepartError):
    """A trace file referenced by the manifest does not exist."""


class MalformedLine(TracepartError):
    """A non-blank trace line does not match the event grammar."""

    def __init__(self, text: str, file: str | None = None, line_no: int | None = None):
        self.text = text
        self.file = file
        self.line_no = line_no
        where = ""
        if file is not None:
            where = f"{file}:{line_no}: " if line_no is not None else f"{file}: "
        super().__init__(f"{where}malformed trace line: {text!r}")


class InvalidTarget(TracepartError):
    """A requested cluster count or sweep size is out of range."""


class PartitionFileInvalid(TracepartError):
    """An external partition file does not cover the observed classes exactly."""


class KnownClassListInvalid(TracepartError):
    """The known-class list contains duplicates."""
