"""Trace and manifest ingestion.

A trace file is UTF-8 text, one runtime event per line:

    <timestamp> "," "[" <thread-id> "]" "," <direction-word> <filler> <Class> "::" <method>

e.g. ``t3,[32],Entering ... Category::setCategoryId``.  Everything between
the direction word and the last whitespace-delimited ``Class::method`` token
is ignorable filler; it is kept out of the event and normalized to ``...``
when an event is serialized back to text.

A manifest is a JSON object ``{"use_cases": [{"label": ..., "trace_files":
[...]}, ...]}`` with trace paths resolved relative to the manifest's
directory.  The same trace file may be listed under several use cases; its
events are then read under each label.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    MalformedLine,
    ManifestInvalid,
    ManifestMissing,
    TraceFileMissing,
)

_LINE_RE = re.compile(
    r"^(?P<ts>[^,]+),\[(?P<tid>\d+)\],(?P<dir>Entering|Exiting)(?P<rest>\s.*)?$"
)


class Direction(enum.Enum):
    ENTER = "Entering"
    EXIT = "Exiting"


@dataclass(frozen=True, slots=True)
class TraceEvent:
    """One enter/exit record of a method call.

    ``seq`` is the ordinal of this event within its file (the 1-based line
    number, so values are strictly increasing).  ``timestamp`` is opaque and
    never interpreted.
    """

    seq: int
    timestamp: str
    thread_id: int
    direction: Direction
    class_name: str
    method_name: str


@dataclass(frozen=True)
class TraceCorpus:
    """All parsed events of a run, grouped by use case.

    ``use_cases`` preserves manifest order; ``streams`` maps each label to
    one event list per trace file (file order also preserved).
    """

    use_cases: tuple[str, ...]
    streams: dict[str, list[list[TraceEvent]]]


def parse_trace_line(line: str, seq: int, *, file: str | None = None) -> TraceEvent | None:
    """Parse one line into a TraceEvent, or None for a blank line.

    Raises MalformedLine for anything else that does not match the grammar.
    Class and method names must be non-empty and free of whitespace, commas
    and ``::``; commas are rejected because class names are echoed into the
    comma-separated path dump.
    """
    if not line.strip():
        return None
    m = _LINE_RE.match(line)
    if m is None:
        raise MalformedLine(line, file, seq)
    rest = m.group("rest") or ""
    tokens = rest.split()
    if not tokens:
        raise MalformedLine(line, file, seq)
    qualified = tokens[-1]
    parts = qualified.split("::")
    if len(parts) != 2 or not parts[0] or not parts[1] or "," in qualified:
        raise MalformedLine(line, file, seq)
    return TraceEvent(
        seq=seq,
        timestamp=m.group("ts"),
        thread_id=int(m.group("tid")),
        direction=Direction(m.group("dir")),
        class_name=parts[0],
        method_name=parts[1],
    )


def format_trace_line(event: TraceEvent) -> str:
    """Serialize an event back to the line grammar (filler becomes ``...``)."""
    return (
        f"{event.timestamp},[{event.thread_id}],{event.direction.value}"
        f" ... {event.class_name}::{event.method_name}"
    )


def parse_trace_file(path: Path) -> list[TraceEvent]:
    """Parse every non-blank line of one trace file, in order."""
    try:
        text = path.read_text(encoding="utf-8", errors="replace")
    except FileNotFoundError:
        raise TraceFileMissing(str(path)) from None
    events: list[TraceEvent] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        event = parse_trace_line(line, line_no, file=str(path))
        if event is not None:
            events.append(event)
    return events


def load_corpus(manifest_path: str | Path) -> TraceCorpus:
    """Load a manifest and parse every referenced trace file.

    Duplicate use-case labels and use cases without trace files are schema
    errors.  A missing trace file or a malformed line aborts the load with
    the corresponding typed error.
    """
    manifest_path = Path(manifest_path)
    try:
        raw = manifest_path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ManifestMissing(str(manifest_path)) from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ManifestInvalid(f"{manifest_path}: not valid JSON: {exc}") from None

    if not isinstance(doc, dict) or not isinstance(doc.get("use_cases"), list):
        raise ManifestInvalid(f"{manifest_path}: expected an object with a 'use_cases' list")
    entries = doc["use_cases"]
    if not entries:
        raise ManifestInvalid(f"{manifest_path}: 'use_cases' must not be empty")

    base = manifest_path.parent
    labels: list[str] = []
    streams: dict[str, list[list[TraceEvent]]] = {}
    cache: dict[Path, list[TraceEvent]] = {}
    for entry in entries:
        if not isinstance(entry, dict):
            raise ManifestInvalid(f"{manifest_path}: use-case entries must be objects")
        label = entry.get("label")
        files = entry.get("trace_files")
        if not isinstance(label, str) or not label:
            raise ManifestInvalid(f"{manifest_path}: every use case needs a non-empty label")
        if not isinstance(files, list) or not files or not all(isinstance(f, str) for f in files):
            raise ManifestInvalid(
                f"{manifest_path}: use case {label!r} needs a non-empty list of trace files"
            )
        if label in streams:
            raise ManifestInvalid(f"{manifest_path}: duplicate use-case label {label!r}")
        labels.append(label)
        file_events: list[list[TraceEvent]] = []
        for name in files:
            path = (base / name).resolve()
            if path not in cache:
                if not path.is_file():
                    raise TraceFileMissing(str(path))
                cache[path] = parse_trace_file(path)
            file_events.append(cache[path])
        streams[label] = file_events
    return TraceCorpus(use_cases=tuple(labels), streams=streams)
