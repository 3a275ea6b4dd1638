"""Refinement session state and the HTTP/JSON service.

A session wraps one analysis output directory: the base partitioning from a
report, the merge hierarchy for re-cuts, and the call graph plus occurrence
data needed to re-score after every edit.  Mutations are serialized through
a single lock and guarded by a monotonic revision counter: a client must
echo the revision it last saw, and a mismatch is rejected with 409 so no
edit is ever silently lost.  The edit log records every applied move;
replaying it over the base partitioning reproduces the current one.

Endpoints:

* ``GET  /api/state``        full board state
* ``GET  /api/metrics``      metrics for the current partitioning
* ``POST /api/move``         {"class": c, "to": partition id, "revision": r}
* ``POST /api/repartition``  {"n": k} re-cut, clears the edit log
* ``POST /api/reset``        back to the base partitioning

Anything outside ``/api/`` is served from the static assets directory.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Mapping, Sequence

from . import metrics as metrics_mod
from . import report as report_mod
from .cct import ROOT_LABEL, ReducedPath
from .clustering import MergeRecord, cut
from .errors import InvalidTarget, TracepartError

log = logging.getLogger(__name__)


class StaleRevision(TracepartError):
    """The client echoed a revision older than the current one."""


class InvalidMove(TracepartError):
    """Unknown class or target partition, or a no-op move."""


@dataclass
class SessionData:
    """Analysis artifacts reloaded from an output directory."""

    classes: tuple[str, ...]
    use_cases: tuple[str, ...]
    occurrence: Mapping[str, frozenset[str]]
    call_graph: metrics_mod.RuntimeCallGraph
    merges: list[MergeRecord]
    base_partitions: list[tuple[str, ...]]
    target_n: int
    corpus_digest: str


@dataclass
class _Edit:
    class_name: str
    from_id: int
    to_id: int


class Session:
    """Mutable refinement state over one SessionData."""

    def __init__(self, data: SessionData):
        self._data = data
        self._lock = threading.Lock()
        self._target_n = data.target_n
        self._base: list[list[str]] = [list(p) for p in data.base_partitions]
        self._current: list[list[str]] = [list(p) for p in data.base_partitions]
        self._edit_log: list[_Edit] = []
        self._revision = 0

    # -- queries ---------------------------------------------------------

    def state(self) -> dict:
        with self._lock:
            return self._state_locked()

    def metrics(self) -> dict:
        with self._lock:
            partitions = self._live_partitions()
            return self._metrics_locked([p for _, p in partitions])

    def edit_log(self) -> list[dict]:
        with self._lock:
            return [
                {"class": e.class_name, "from": e.from_id, "to": e.to_id}
                for e in self._edit_log
            ]

    def base_partitions(self) -> list[tuple[str, ...]]:
        with self._lock:
            return [tuple(p) for p in self._base]

    # -- mutations -------------------------------------------------------

    def move(self, class_name: str, to_id: int, revision: int) -> dict:
        with self._lock:
            if revision != self._revision:
                raise StaleRevision(
                    f"revision {revision} is stale, current is {self._revision}"
                )
            from_id = None
            for i, part in enumerate(self._current):
                if class_name in part:
                    from_id = i
                    break
            if from_id is None:
                raise InvalidMove(f"unknown class {class_name!r}")
            if not (0 <= to_id < len(self._current)) or not self._current[to_id]:
                raise InvalidMove(f"unknown partition {to_id}")
            if to_id == from_id:
                raise InvalidMove(f"class {class_name!r} is already in partition {to_id}")
            self._current[from_id].remove(class_name)
            self._current[to_id].append(class_name)
            self._edit_log.append(_Edit(class_name, from_id, to_id))
            self._revision += 1
            return self._state_locked()

    def repartition(self, n: int) -> dict:
        with self._lock:
            partitioning = cut(self._data.classes, self._data.merges, n)
            self._target_n = n
            self._base = [list(p) for p in partitioning.partitions]
            self._current = [list(p) for p in partitioning.partitions]
            self._edit_log.clear()
            self._revision += 1
            return self._state_locked()

    def reset(self) -> dict:
        with self._lock:
            self._current = [list(p) for p in self._base]
            self._edit_log.clear()
            self._revision += 1
            return self._state_locked()

    # -- internals -------------------------------------------------------

    def _live_partitions(self) -> list[tuple[int, tuple[str, ...]]]:
        return [
            (i, tuple(sorted(part))) for i, part in enumerate(self._current) if part
        ]

    def _metrics_locked(self, partitions: Sequence[tuple[str, ...]]) -> dict:
        data = self._data
        scored = metrics_mod.evaluate(partitions, data.call_graph, data.occurrence)
        explanation = report_mod.explain(partitions, data.occurrence, data.use_cases)
        interfaces = metrics_mod.interface_classes(partitions, data.call_graph)
        return report_mod.metrics_json_dict(scored, partitions, explanation, interfaces)

    def _state_locked(self) -> dict:
        data = self._data
        live = self._live_partitions()
        partitions = [p for _, p in live]
        explanation = report_mod.explain(partitions, data.occurrence, data.use_cases)
        interfaces = metrics_mod.interface_classes(partitions, data.call_graph)
        scored = metrics_mod.evaluate(partitions, data.call_graph, data.occurrence)
        return {
            "revision": self._revision,
            "corpus_digest": data.corpus_digest,
            "target_n": self._target_n,
            "edit_count": len(self._edit_log),
            "metrics": {
                "sm": scored.sm,
                "icp": scored.icp,
                "bcp": scored.bcp,
                "ifn": scored.ifn,
                "ned": scored.ned,
            },
            "partitions": [
                {
                    "id": live[i][0],
                    "classes": list(partitions[i]),
                    "use_cases": list(explanation.per_partition[i].use_cases),
                    "interfaces": sorted(interfaces[i]),
                    "tuples": [
                        {"use_cases": list(ucs), "count": count}
                        for ucs, count in explanation.per_partition[i].tuples
                    ],
                }
                for i in range(len(live))
            ],
            "per_class": {
                cls: list(explanation.per_class[cls]) for cls in sorted(explanation.per_class)
            },
        }


def load_session_data(out_dir: str | Path, n: int | None = None) -> SessionData:
    """Rebuild session inputs from a partition run's output directory."""
    out = Path(out_dir)
    paths, use_cases = _read_paths(out / "paths.txt")
    graph = _read_graph(out / "graph.json")
    merges = _read_merges(out / "merges.json")
    report_path = _pick_report(out, n)
    doc = json.loads(report_path.read_text(encoding="utf-8"))
    occurrence: dict[str, set[str]] = {}
    for path in paths:
        for cls in path.classes:
            occurrence.setdefault(cls, set()).add(path.use_case)
    return SessionData(
        classes=tuple(sorted(occurrence)),
        use_cases=use_cases,
        occurrence={c: frozenset(s) for c, s in occurrence.items()},
        call_graph=graph,
        merges=merges,
        base_partitions=[tuple(p["classes"]) for p in doc["partitions"]],
        target_n=doc["target_n"],
        corpus_digest=doc.get("corpus_digest", ""),
    )


def _read_paths(path: Path) -> tuple[set[ReducedPath], tuple[str, ...]]:
    if not path.is_file():
        raise TracepartError(f"{path}: missing (not a partition output directory?)")
    marker = f", {ROOT_LABEL}, "
    paths: set[ReducedPath] = set()
    order: list[str] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        head, sep, tail = line.partition(marker)
        if not sep:
            raise TracepartError(f"{path}: unrecognized dump line: {line!r}")
        if head not in order:
            order.append(head)
        paths.add(ReducedPath(head, tuple(tail.split(", "))))
    return paths, tuple(order)


def _read_graph(path: Path) -> metrics_mod.RuntimeCallGraph:
    if not path.is_file():
        raise TracepartError(f"{path}: missing (not a partition output directory?)")
    doc = json.loads(path.read_text(encoding="utf-8"))
    edges = {
        (e["caller"], e["callee"]): int(e["count"]) for e in doc.get("edges", [])
    }
    return metrics_mod.RuntimeCallGraph(edges)


def _read_merges(path: Path) -> list[MergeRecord]:
    if not path.is_file():
        raise TracepartError(f"{path}: missing (not a partition output directory?)")
    doc = json.loads(path.read_text(encoding="utf-8"))
    return [
        MergeRecord(a=tuple(r["a"]), b=tuple(r["b"]), score=float(r["score"])) for r in doc
    ]


def _pick_report(out: Path, n: int | None) -> Path:
    if n is not None:
        path = out / f"report-n{n}.json"
        if not path.is_file():
            raise TracepartError(f"{path}: no report for n={n}")
        return path
    candidates = sorted(out.glob("report-n*.json"))
    if not candidates:
        raise TracepartError(f"{out}: no report-n<k>.json found")
    if len(candidates) > 1:
        names = ", ".join(c.name for c in candidates)
        raise TracepartError(f"{out}: several reports found ({names}); pass --n to choose")
    return candidates[0]


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".map": "application/json",
    ".ico": "image/x-icon",
}


class _Handler(BaseHTTPRequestHandler):
    server: "SessionServer"

    def log_message(self, fmt: str, *args) -> None:  # quiet by default
        log.debug("%s " + fmt, self.address_string(), *args)

    def _send_json(self, status: int, payload: dict) -> None:
        body = report_mod.dumps_fixed(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b"{}"
        try:
            doc = json.loads(raw.decode("utf-8") or "{}")
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise InvalidMove("request body is not valid JSON")
        if not isinstance(doc, dict):
            raise InvalidMove("request body must be a JSON object")
        return doc

    def do_GET(self) -> None:
        session = self.server.session
        if self.path == "/api/state":
            self._send_json(200, session.state())
        elif self.path == "/api/metrics":
            self._send_json(200, session.metrics())
        elif self.path.startswith("/api/"):
            self._send_json(404, {"error": f"unknown endpoint {self.path}"})
        else:
            self._serve_static()

    def do_POST(self) -> None:
        session = self.server.session
        try:
            if self.path == "/api/move":
                body = self._read_body()
                cls = body.get("class")
                to = body.get("to")
                revision = body.get("revision")
                if not isinstance(cls, str) or not isinstance(to, int) or not isinstance(revision, int):
                    raise InvalidMove("move needs string 'class', integer 'to' and 'revision'")
                self._send_json(200, session.move(cls, to, revision))
            elif self.path == "/api/repartition":
                body = self._read_body()
                n = body.get("n")
                if not isinstance(n, int):
                    raise InvalidMove("repartition needs an integer 'n'")
                self._send_json(200, session.repartition(n))
            elif self.path == "/api/reset":
                self._send_json(200, session.reset())
            else:
                self._send_json(404, {"error": f"unknown endpoint {self.path}"})
        except StaleRevision as exc:
            self._send_json(409, {"error": str(exc), "revision": session.state()["revision"]})
        except (InvalidMove, InvalidTarget) as exc:
            self._send_json(400, {"error": str(exc)})

    def _serve_static(self) -> None:
        assets = self.server.assets_dir
        if assets is None:
            self._send_json(404, {"error": "no static assets configured; API lives under /api/"})
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (assets / rel).resolve()
        if not target.is_relative_to(assets.resolve()) or not target.is_file():
            self._send_json(404, {"error": f"no such asset: {rel}"})
            return
        body = target.read_bytes()
        self.send_response(200)
        self.send_header(
            "Content-Type", _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        )
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class SessionServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, session: Session, port: int, assets_dir: Path | None = None):
        self.session = session
        self.assets_dir = assets_dir
        super().__init__(("127.0.0.1", port), _Handler)


def serve(
    out_dir: str | Path,
    port: int,
    *,
    n: int | None = None,
    assets_dir: str | Path | None = None,
) -> SessionServer:
    """Build a server for an output directory; caller runs serve_forever()."""
    data = load_session_data(out_dir, n)
    session = Session(data)
    assets = Path(assets_dir) if assets_dir is not None else None
    return SessionServer(session, port, assets)
