"""Class-level calling context trees and reduced paths.

Each thread of a trace becomes one tree rooted at the virtual label
``Root``.  Method-level enter/exit pairs are simulated on a stack, but nodes
are created per *class* context:

* an entered class equal to the class on top of the stack reuses the current
  node (consecutive same-class calls collapse, so no node ever repeats its
  parent's label);
* an entered class already present as a child of the current node reuses
  that child and increments the edge call count (calling-context merge);
* anything else becomes a new child with call count 1.

Unbalanced traces are repaired instead of rejected: an Exiting event whose
(class, method) matches no open frame is dropped, an Exiting that matches a
deeper frame implicitly closes everything above it, and frames still open at
end of file are implicitly closed.  Counts of these repairs are accumulated
in ReductionStats.

A reduced path is one root-to-leaf class sequence with Root removed.  Paths
are deduplicated per use case across threads and files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import TracepartError
from .ingest import Direction, TraceEvent

ROOT_LABEL = "Root"


@dataclass
class CctNode:
    label: str
    call_count: int = 0
    children: dict[str, "CctNode"] = field(default_factory=dict)


@dataclass
class ClassCct:
    thread_id: int
    root: CctNode


@dataclass
class ReductionStats:
    """Repair counters for unbalanced traces."""

    dropped_exits: int = 0
    implicitly_closed: int = 0
    open_at_eof: int = 0

    def merge(self, other: "ReductionStats") -> None:
        self.dropped_exits += other.dropped_exits
        self.implicitly_closed += other.implicitly_closed
        self.open_at_eof += other.open_at_eof


@dataclass(frozen=True, order=True)
class ReducedPath:
    use_case: str
    classes: tuple[str, ...]


@dataclass
class _Frame:
    class_name: str
    method_name: str
    node: CctNode


def build_ccts(events: Sequence[TraceEvent], stats: ReductionStats | None = None) -> list[ClassCct]:
    """Build one class-level tree per thread from one trace's events.

    Trees are returned in ascending thread-id order.
    """
    if stats is None:
        stats = ReductionStats()
    by_thread: dict[int, list[TraceEvent]] = {}
    for event in events:
        by_thread.setdefault(event.thread_id, []).append(event)
    trees: list[ClassCct] = []
    for thread_id in sorted(by_thread):
        trees.append(ClassCct(thread_id, _build_tree(by_thread[thread_id], stats)))
    return trees


def _build_tree(events: Sequence[TraceEvent], stats: ReductionStats) -> CctNode:
    root = CctNode(ROOT_LABEL)
    stack: list[_Frame] = []
    for event in events:
        if event.class_name == ROOT_LABEL:
            raise TracepartError(f"class name {ROOT_LABEL!r} is reserved for the virtual root")
        if event.direction is Direction.ENTER:
            if stack and stack[-1].class_name == event.class_name:
                node = stack[-1].node
            else:
                parent = stack[-1].node if stack else root
                node = parent.children.get(event.class_name)
                if node is None:
                    node = CctNode(event.class_name)
                    parent.children[event.class_name] = node
                node.call_count += 1
            stack.append(_Frame(event.class_name, event.method_name, node))
        else:
            match = None
            for i in range(len(stack) - 1, -1, -1):
                frame = stack[i]
                if frame.class_name == event.class_name and frame.method_name == event.method_name:
                    match = i
                    break
            if match is None:
                stats.dropped_exits += 1
            else:
                stats.implicitly_closed += len(stack) - match - 1
                del stack[match:]
    stats.open_at_eof += len(stack)
    return root


def iter_edges(cct: ClassCct) -> Iterator[tuple[str, str, int]]:
    """Yield (parent label, child label, call count) for every tree edge."""
    todo = [cct.root]
    while todo:
        node = todo.pop()
        for child in node.children.values():
            yield node.label, child.label, child.call_count
            todo.append(child)


def extract_reduced_paths(ccts: Iterable[ClassCct], use_case: str) -> set[ReducedPath]:
    """Collect the deduplicated root-to-leaf class sequences of one use case."""
    paths: set[ReducedPath] = set()
    for cct in ccts:
        stack: list[tuple[CctNode, tuple[str, ...]]] = [(cct.root, ())]
        while stack:
            node, prefix = stack.pop()
            if node.label != ROOT_LABEL:
                prefix = prefix + (node.label,)
            if not node.children:
                if prefix:
                    paths.add(ReducedPath(use_case, prefix))
                continue
            for child in node.children.values():
                stack.append((child, prefix))
    return paths


def dump_paths(
    paths_by_use_case: Mapping[str, Iterable[ReducedPath]],
    use_case_order: Sequence[str],
) -> str:
    """Render reduced paths in the debug dump format.

    One line per path, ``<use_case>, Root, <c1>, <c2>, ...``; use cases keep
    the given order and paths are sorted within each use case.
    """
    lines = []
    for use_case in use_case_order:
        for path in sorted(paths_by_use_case.get(use_case, []), key=lambda p: p.classes):
            lines.append(", ".join((use_case, ROOT_LABEL) + path.classes))
    return "\n".join(lines) + ("\n" if lines else "")
