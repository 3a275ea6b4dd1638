"""Synthetic corpora for benchmarks and end-to-end exercises.

Generates block-structured path sets: classes are split into per-use-case
pools with a little overlap between neighbouring pools, so clustering has
real structure to find.  Paths can be replayed as balanced enter/exit event
streams or written out as trace files plus a manifest.
"""

from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Mapping, Sequence

from .ingest import Direction, TraceEvent


def path_events(
    classes: Sequence[str],
    *,
    thread_id: int = 0,
    first_seq: int = 1,
    method: str = "run",
) -> list[TraceEvent]:
    """Balanced event stream that reduces back to exactly this path."""
    events = []
    seq = first_seq
    for cls in classes:
        events.append(TraceEvent(seq, f"t{seq}", thread_id, Direction.ENTER, cls, method))
        seq += 1
    for cls in reversed(classes):
        events.append(TraceEvent(seq, f"t{seq}", thread_id, Direction.EXIT, cls, method))
        seq += 1
    return events


def trace_lines(paths: Sequence[Sequence[str]], *, thread_id: int = 0) -> list[str]:
    """Render one trace (a sequence of interactions) as grammar lines."""
    lines: list[str] = []
    seq = 1
    for path in paths:
        for cls in path:
            lines.append(f"t{seq},[{thread_id}],Entering ... {cls}::run")
            seq += 1
        for cls in reversed(path):
            lines.append(f"t{seq},[{thread_id}],Exiting ... {cls}::run")
            seq += 1
    return lines


def write_corpus(
    directory: str | Path,
    paths_by_use_case: Mapping[str, Sequence[Sequence[str]]],
) -> Path:
    """Write one trace file per use case plus a manifest; returns manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for label, paths in paths_by_use_case.items():
        name = f"{label}.trace"
        (directory / name).write_text("\n".join(trace_lines(paths)) + "\n", encoding="utf-8")
        entries.append({"label": label, "trace_files": [name]})
    manifest = directory / "manifest.json"
    manifest.write_text(json.dumps({"use_cases": entries}, indent=2) + "\n", encoding="utf-8")
    return manifest


def distinct_path_edges(paths_by_use_case: Mapping[str, Sequence[Sequence[str]]]) -> int:
    edges = set()
    for paths in paths_by_use_case.values():
        for path in paths:
            for i in range(len(path) - 1):
                edges.add((path[i], path[i + 1]))
    return len(edges)


def block_corpus(
    *,
    num_classes: int,
    num_use_cases: int,
    walks_per_use_case: int,
    walk_length: tuple[int, int] = (4, 9),
    overlap: int = 15,
    seed: int = 7,
) -> dict[str, list[tuple[str, ...]]]:
    """Random-walk paths over overlapping class pools, one pool per use case.

    Every class is also covered by deterministic chain paths through its
    home pool, so the whole class range is observed regardless of how the
    random walks land.
    """
    rng = random.Random(seed)
    classes = [f"C{i:04d}" for i in range(num_classes)]
    paths_by_uc: dict[str, list[tuple[str, ...]]] = {}
    block = max(1, num_classes // num_use_cases)
    for u in range(num_use_cases):
        label = f"uc{u:02d}"
        home_lo = u * block
        home_hi = num_classes if u == num_use_cases - 1 else min(num_classes, (u + 1) * block)
        pool_lo = max(0, home_lo - overlap)
        pool_hi = min(num_classes, home_hi + overlap)
        pool = classes[pool_lo:pool_hi]
        home = classes[home_lo:home_hi]
        paths: list[tuple[str, ...]] = []
        for start in range(0, len(home), 8):
            chain = home[start : start + 8]
            if len(chain) == 1 and paths:
                paths[-1] = paths[-1] + tuple(chain)
            else:
                paths.append(tuple(chain))
        controllers = pool[: max(2, len(pool) // 20)]
        for _ in range(walks_per_use_case):
            length = rng.randint(*walk_length)
            walk = [rng.choice(controllers)]
            while len(walk) < length:
                step = rng.choice(pool)
                if step != walk[-1]:
                    walk.append(step)
            paths.append(tuple(walk))
        paths_by_uc[label] = paths
    return paths_by_uc


def performance_corpus(seed: int = 7) -> dict[str, list[tuple[str, ...]]]:
    """The 1300-class / 21-use-case benchmark corpus (~12k distinct edges)."""
    return block_corpus(
        num_classes=1300,
        num_use_cases=21,
        walks_per_use_case=104,
        seed=seed,
    )
