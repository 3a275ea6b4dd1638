"""End-to-end orchestration: corpus -> paths -> matrix -> partitions -> reports.

Output directory layout (one analysis run):

* ``paths.txt``      reduced paths, debug dump format
* ``matrix.json``    {"classes": [...], "matrix": [[...]]}
* ``merges.json``    full merge sequence, [{"a": [...], "b": [...], "score": s}]
* ``graph.json``     runtime call graph with call counts
* ``report-n<k>.json`` / ``report-n<k>.txt``  one per target size

paths.txt, graph.json and merges.json together carry everything the serve
command needs to re-score edited partitions, so a session can be reopened
without the original traces.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from . import cct, clustering, features, metrics, report
from .errors import PartitionFileInvalid, TracepartError
from .ingest import TraceCorpus, load_corpus

log = logging.getLogger(__name__)


@dataclass
class CorpusAnalysis:
    """Everything derived from the traces before any clustering."""

    use_cases: tuple[str, ...]
    paths: set[cct.ReducedPath]
    universe: features.ClassUniverse
    call_graph: metrics.RuntimeCallGraph
    stats: cct.ReductionStats
    digest: str


def analyze_corpus(corpus: TraceCorpus) -> CorpusAnalysis:
    """Reduce every trace and aggregate paths plus the call graph."""
    paths: set[cct.ReducedPath] = set()
    edges: dict[tuple[str, str], int] = {}
    stats = cct.ReductionStats()
    for use_case in corpus.use_cases:
        trees: list[cct.ClassCct] = []
        for events in corpus.streams[use_case]:
            trees.extend(cct.build_ccts(events, stats))
        paths |= cct.extract_reduced_paths(trees, use_case)
        for tree in trees:
            for parent, child, count in cct.iter_edges(tree):
                if parent == cct.ROOT_LABEL:
                    continue
                key = (parent, child)
                edges[key] = edges.get(key, 0) + count
    if stats.dropped_exits or stats.implicitly_closed:
        log.warning(
            "unbalanced traces repaired: %d exits dropped, %d frames implicitly closed",
            stats.dropped_exits,
            stats.implicitly_closed,
        )
    universe = features.build_universe(paths, corpus.use_cases)
    graph = metrics.RuntimeCallGraph(edges)
    return CorpusAnalysis(
        use_cases=corpus.use_cases,
        paths=paths,
        universe=universe,
        call_graph=graph,
        stats=stats,
        digest=_digest(corpus.use_cases, paths, edges),
    )


def _digest(
    use_cases: Sequence[str],
    paths: set[cct.ReducedPath],
    edges: Mapping[tuple[str, str], int],
) -> str:
    h = hashlib.sha256()
    for u in use_cases:
        h.update(u.encode() + b"\x00")
    for p in sorted(paths):
        h.update(("|".join((p.use_case,) + p.classes)).encode() + b"\x00")
    for (a, b), count in sorted(edges.items()):
        h.update(f"{a}>{b}={count}".encode() + b"\x00")
    return h.hexdigest()


def paths_by_use_case(analysis: CorpusAnalysis) -> dict[str, list[cct.ReducedPath]]:
    grouped: dict[str, list[cct.ReducedPath]] = {u: [] for u in analysis.use_cases}
    for path in analysis.paths:
        grouped[path.use_case].append(path)
    for group in grouped.values():
        group.sort()
    return grouped


def build_matrix(analysis: CorpusAnalysis) -> features.SimilarityMatrix:
    idx = features.index_relations(analysis.paths, analysis.universe)
    return features.similarity_matrix(idx, analysis.universe)


@dataclass
class AnalysisBundle:
    """A corpus analysis plus the shared clustering hierarchy."""

    analysis: CorpusAnalysis
    matrix: features.SimilarityMatrix
    merges: list[clustering.MergeRecord]

    def partition_at(self, n: int) -> clustering.Partitioning:
        return clustering.cut(self.matrix.classes, self.merges, n)


def build_bundle(analysis: CorpusAnalysis) -> AnalysisBundle:
    matrix = build_matrix(analysis)
    return AnalysisBundle(analysis, matrix, clustering.merge_sequence(matrix))


def report_for(
    bundle: AnalysisBundle,
    partitioning: clustering.Partitioning,
    known_classes: Sequence[str] | None = None,
) -> dict:
    analysis = bundle.analysis
    explanation = report.explain(
        partitioning.partitions, analysis.universe.occurrence, analysis.use_cases
    )
    scored = metrics.evaluate(
        partitioning.partitions, analysis.call_graph, analysis.universe.occurrence
    )
    coverage = report.coverage_report(analysis.universe.classes, known_classes)
    stats = analysis.stats
    return report.build_report(
        target_n=partitioning.target_n,
        partitions=partitioning.partitions,
        metrics=scored,
        explanation=explanation,
        graph=analysis.call_graph,
        coverage=coverage,
        corpus_digest=analysis.digest,
        warnings={
            "dropped_exits": stats.dropped_exits,
            "implicitly_closed": stats.implicitly_closed,
            "open_at_eof": stats.open_at_eof,
        },
    )


def run_partition(
    manifest_path: str | Path,
    out_dir: str | Path,
    *,
    n: int | None = None,
    sweep: bool = False,
    known_classes: Sequence[str] | None = None,
) -> list[Path]:
    """Execute the full pipeline and write all artifacts; returns report paths."""
    corpus = load_corpus(manifest_path)
    analysis = analyze_corpus(corpus)
    num_classes = len(analysis.universe.classes)
    if num_classes == 0:
        raise TracepartError("no classes observed in any trace")
    bundle = build_bundle(analysis)

    if sweep:
        targets = clustering.sweep_sizes(num_classes) if num_classes >= 2 else []
        if not targets:
            # Corpora too small for the sweep rule still get one report.
            targets = [clustering.default_target(num_classes)]
        if n is not None and n not in targets:
            targets = sorted(set(targets) | {n}, reverse=True)
    else:
        targets = [n if n is not None else clustering.default_target(num_classes)]

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "paths.txt").write_text(
        cct.dump_paths(paths_by_use_case(analysis), analysis.use_cases), encoding="utf-8"
    )
    (out / "matrix.json").write_text(
        report.dumps_machine(bundle.matrix.to_json_dict()) + "\n", encoding="utf-8"
    )
    (out / "merges.json").write_text(
        report.dumps_machine(
            [{"a": list(r.a), "b": list(r.b), "score": r.score} for r in bundle.merges]
        )
        + "\n",
        encoding="utf-8",
    )
    (out / "graph.json").write_text(
        report.dumps_machine(
            {
                "edges": [
                    {"caller": a, "callee": b, "count": c}
                    for (a, b), c in sorted(analysis.call_graph.edges.items())
                ]
            }
        )
        + "\n",
        encoding="utf-8",
    )

    written: list[Path] = []
    for target in targets:
        partitioning = bundle.partition_at(target)
        doc = report_for(bundle, partitioning, known_classes)
        path = out / f"report-n{target}.json"
        path.write_text(report.dumps_fixed(doc) + "\n", encoding="utf-8")
        (out / f"report-n{target}.txt").write_text(report.render_text(doc), encoding="utf-8")
        written.append(path)
    return written


def load_partition_file(path: str | Path, observed: Sequence[str]) -> list[tuple[str, ...]]:
    """Read an external partition assignment and check it covers ``observed``.

    Accepts either the report/metrics schema (``partitions`` as objects with
    a ``classes`` list) or a bare list of class lists.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise PartitionFileInvalid(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise PartitionFileInvalid(f"{path}: not valid JSON: {exc}") from None
    raw = doc.get("partitions") if isinstance(doc, dict) else doc
    if not isinstance(raw, list) or not raw:
        raise PartitionFileInvalid(f"{path}: expected a non-empty 'partitions' list")
    partitions: list[tuple[str, ...]] = []
    for entry in raw:
        classes = entry.get("classes") if isinstance(entry, dict) else entry
        if not isinstance(classes, list) or not all(isinstance(c, str) for c in classes):
            raise PartitionFileInvalid(f"{path}: every partition needs a list of class names")
        if classes:
            partitions.append(tuple(classes))
    seen: dict[str, int] = {}
    for part in partitions:
        for cls in part:
            seen[cls] = seen.get(cls, 0) + 1
    duplicated = sorted(c for c, k in seen.items() if k > 1)
    missing = sorted(set(observed) - set(seen))
    unknown = sorted(set(seen) - set(observed))
    if duplicated:
        raise PartitionFileInvalid(f"{path}: classes assigned more than once: {duplicated}")
    if missing:
        raise PartitionFileInvalid(f"{path}: observed classes missing: {missing}")
    if unknown:
        raise PartitionFileInvalid(f"{path}: unknown classes: {unknown}")
    return partitions


def run_metrics(partition_file: str | Path, manifest_path: str | Path) -> dict:
    """Re-score an external partition file against a corpus."""
    corpus = load_corpus(manifest_path)
    analysis = analyze_corpus(corpus)
    partitions = load_partition_file(partition_file, analysis.universe.classes)
    scored = metrics.evaluate(partitions, analysis.call_graph, analysis.universe.occurrence)
    explanation = report.explain(partitions, analysis.universe.occurrence, analysis.use_cases)
    interfaces = metrics.interface_classes(partitions, analysis.call_graph)
    return report.metrics_json_dict(scored, partitions, explanation, interfaces)
