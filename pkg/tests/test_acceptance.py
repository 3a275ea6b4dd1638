"""Acceptance gate: one test per release criterion.

Each test prints a single PASS line with the measured values so a verbose
run reads as a checklist.  Everything here goes through public entry points
only; tolerances are stated inline.
"""

from __future__ import annotations

import json
import math
import random
import resource
import time
from fractions import Fraction
from pathlib import Path

from conftest import paths_from
import oracles
from tracepart import synth
from tracepart.cct import (
    ReducedPath,
    ReductionStats,
    build_ccts,
    dump_paths,
    extract_reduced_paths,
)
from tracepart.clustering import cut, merge_sequence, sweep_sizes
from tracepart.features import (
    build_universe,
    dcp,
    dcr,
    icp_feature,
    icr,
    index_relations,
    similarity_matrix,
)
from tracepart.ingest import parse_trace_file
from tracepart.metrics import RuntimeCallGraph, evaluate
from tracepart.pipeline import run_partition
from tracepart.report import coverage_report


def _graph_from_paths(spec: dict[str, list[tuple[str, ...]]]) -> RuntimeCallGraph:
    edges: dict[tuple[str, str], int] = {}
    for paths in spec.values():
        for path in paths:
            for a, b in zip(path, path[1:]):
                edges[(a, b)] = edges.get((a, b), 0) + 1
    return RuntimeCallGraph(edges)


def test_dcr_worked_example():
    """Occurrence {u1,u2} vs {u1,u2,u3} with one shared direct use case -> 1/3."""
    spec = {
        "u1": [("A", "B")],        # direct relation
        "u2": [("A", "X", "B")],   # co-occurrence without adjacency
        "u3": [("B", "X")],        # B alone
    }
    paths, universe, idx = _prepared(spec)
    assert universe.occurrence["A"] == frozenset({"u1", "u2"})
    assert universe.occurrence["B"] == frozenset({"u1", "u2", "u3"})
    value = dcr("A", "B", idx, universe)
    assert value == 1 / 3
    assert oracles.dcr_fraction(paths, "A", "B") == Fraction(1, 3)

    reps = 2000
    start = time.perf_counter()
    for _ in range(reps):
        dcr("A", "B", idx, universe)
    per_call_ms = (time.perf_counter() - start) * 1000 / reps
    assert per_call_ms < 1.0
    print(f"PASS dcr worked example: exactly 1/3, {per_call_ms:.4f} ms/call")


def test_dcp_worked_example():
    """Five classes, two use cases, two shared direct partners -> 2/(3*2)."""
    spec = {
        "u1": [("A", "P"), ("B", "P"), ("R",)],
        "u2": [("A", "Q"), ("B", "Q")],
    }
    paths, universe, idx = _prepared(spec)
    assert len(universe.classes) == 5
    assert len(universe.use_cases) == 2
    value = dcp("A", "B", idx, universe)
    assert value == 2 / 6
    assert oracles.dcp_fraction(paths, universe.use_cases, "A", "B") == Fraction(2, 6)
    print("PASS dcp worked example: exactly 2/6 over (5-2)*2")


def test_cct_reduction_fixture(tmp_path: Path):
    """Enter/exit streams reduce to the published four-line path dump."""
    streams = {
        "click_item": [("ViewCategoryCont..", "PetStoreImpl", "SqlMapCategory..")],
        "update_item": [
            ("UpdateCartQuantitiesController", "Cart"),
            ("UpdateCartQuantitiesController", "CartIt."),
            ("UpdateCartQuantitiesController", "Item"),
        ],
    }
    reduced: dict[str, set[ReducedPath]] = {}
    for label, paths in streams.items():
        trace = tmp_path / f"{label}.trace"
        trace.write_text("\n".join(synth.trace_lines(paths)) + "\n", encoding="utf-8")
        events = parse_trace_file(trace)
        ccts = build_ccts(events, ReductionStats())
        reduced[label] = extract_reduced_paths(ccts, label)
    dump = dump_paths(reduced, ["click_item", "update_item"])
    expected = (
        "click_item, Root, ViewCategoryCont.., PetStoreImpl, SqlMapCategory..\n"
        "update_item, Root, UpdateCartQuantitiesController, Cart\n"
        "update_item, Root, UpdateCartQuantitiesController, CartIt.\n"
        "update_item, Root, UpdateCartQuantitiesController, Item\n"
    )
    assert dump == expected
    print("PASS cct reduction fixture: 4-line dump byte-identical")


def test_oracle_equivalence_500_corpora():
    """Features+metrics within 1e-9 of brute force; clustering exact, 500 corpora."""
    tol = 1e-9
    checked_pairs = 0
    for seed in range(500):
        rng = random.Random(1000 + seed)
        spec = _small_corpus(rng)
        paths, universe, idx = _prepared(spec)
        classes = universe.classes

        ucs = list(universe.use_cases)
        for i, c1 in enumerate(classes):
            for c2 in classes[i + 1 :]:
                assert abs(dcr(c1, c2, idx, universe) - oracles.dcr_fraction(paths, c1, c2)) <= tol
                assert abs(icr(c1, c2, idx, universe) - oracles.icr_fraction(paths, c1, c2)) <= tol
                assert abs(dcp(c1, c2, idx, universe) - oracles.dcp_fraction(paths, ucs, c1, c2)) <= tol
                assert abs(icp_feature(c1, c2, idx, universe) - oracles.icp_fraction(paths, ucs, c1, c2)) <= tol
                checked_pairs += 1

        matrix = similarity_matrix(idx, universe)
        for i in range(len(matrix.classes)):
            for j in range(i + 1, len(matrix.classes)):
                expected = oracles.similarity_fraction(paths, ucs, matrix.classes[i], matrix.classes[j])
                assert abs(matrix.values[i, j] - expected) <= tol
                assert matrix.values[j, i] == matrix.values[i, j]
            assert matrix.values[i, i] == 0.0

        graph = _graph_from_paths(spec)
        partitions = _random_partition(rng, classes)
        scored = evaluate(partitions, graph, universe.occurrence)
        assert abs(scored.sm - oracles.sm_fraction(partitions, graph.edges)) <= tol
        assert abs(scored.icp - oracles.icp_metric_fraction(partitions, graph.edges)) <= tol
        assert abs(scored.bcp - oracles.bcp_float(partitions, universe.occurrence)) <= tol
        assert abs(scored.ifn - oracles.ifn_fraction(partitions, graph.edges)) <= tol
        assert abs(scored.ned - oracles.ned_fraction(partitions)) <= tol

        records = merge_sequence(matrix)
        for n in range(1, len(classes) + 1):
            mine = cut(matrix.classes, records, n)
            ref_parts, ref_log = oracles.naive_cluster(
                list(matrix.classes), matrix.values, n
            )
            assert list(mine.partitions) == ref_parts
            assert [(r.a, r.b, r.score) for r in mine.merge_log] == ref_log
    print(f"PASS oracle equivalence: 500 corpora, {checked_pairs} feature pairs, exact clustering")


def test_clustering_invariants(tmp_path: Path):
    """Singletons at n=|C|, one cluster at n=1, nesting, input-order independence."""
    spec = synth.block_corpus(num_classes=128, num_use_cases=4, walks_per_use_case=12, seed=3)
    paths, universe, idx = _prepared(spec)
    matrix = similarity_matrix(idx, universe)
    records = merge_sequence(matrix)
    total = len(matrix.classes)

    singles = cut(matrix.classes, records, total)
    assert all(len(p) == 1 for p in singles.partitions)
    assert len(singles.partitions) == total

    whole = cut(matrix.classes, records, 1)
    assert len(whole.partitions) == 1
    assert len(whole.partitions[0]) == total

    sizes = [total] + sweep_sizes(total) + [1]
    previous = None
    for n in sizes:
        parts = cut(matrix.classes, records, n).partitions
        assert len(parts) == n
        if previous is not None:
            coarser = {frozenset(p) for p in parts}
            for fine in previous:
                homes = [c for c in coarser if set(fine) <= c]
                assert len(homes) == 1
        previous = parts

    manifest_fwd = _two_file_corpus(tmp_path / "fwd", spec, reverse_files=False)
    manifest_rev = _two_file_corpus(tmp_path / "rev", spec, reverse_files=True)
    out_fwd, out_rev = tmp_path / "out_fwd", tmp_path / "out_rev"
    run_partition(manifest_fwd, out_fwd, n=8)
    run_partition(manifest_rev, out_rev, n=8)
    for name in ("report-n8.json", "paths.txt", "matrix.json", "merges.json", "graph.json"):
        assert (out_fwd / name).read_bytes() == (out_rev / name).read_bytes()
    print(f"PASS clustering invariants: sweep {sizes} nested, shuffled inputs byte-identical")


def test_metric_direction_properties():
    """Merges never raise icp; bcp <= ln|U|; ned of [5,20] sizes is 0; edgeless sm is 0."""
    rng = random.Random(77)
    for _ in range(200):
        spec = _small_corpus(rng)
        _, universe, _ = _prepared(spec)
        graph = _graph_from_paths(spec)
        partitions = _random_partition(rng, universe.classes)
        scored = evaluate(partitions, graph, universe.occurrence)
        if len(partitions) >= 2:
            i, j = rng.sample(range(len(partitions)), 2)
            merged = [p for k, p in enumerate(partitions) if k not in (i, j)]
            merged.append(tuple(partitions[i]) + tuple(partitions[j]))
            after = evaluate(merged, graph, universe.occurrence)
            assert after.icp <= scored.icp
        assert scored.bcp <= math.log(len(universe.use_cases)) + 1e-12

    sized = [tuple(f"C{i}_{k}" for k in range(size)) for i, size in enumerate((5, 12, 20))]
    occurrence = {c: frozenset({"u"}) for p in sized for c in p}
    assert evaluate(sized, RuntimeCallGraph({}), occurrence).ned == 0.0

    edgeless = evaluate([("A",), ("B",)], RuntimeCallGraph({}), {"A": frozenset({"u"}), "B": frozenset({"u"})})
    assert edgeless.sm == 0.0
    print("PASS metric direction properties: 200 corpora + boundary cases")


def test_performance_envelope():
    """1300 classes / 21 use cases / ~12k distinct edges within 30 s and 2 GB."""
    spec = synth.performance_corpus()
    edge_count = synth.distinct_path_edges(spec)
    assert 10_500 <= edge_count <= 13_500

    paths = paths_from(spec)
    start = time.perf_counter()
    universe = build_universe(paths, list(spec))
    idx = index_relations(paths, universe)
    matrix = similarity_matrix(idx, universe)
    records = merge_sequence(matrix)
    partitioning = cut(matrix.classes, records, 5)
    elapsed = time.perf_counter() - start

    assert len(matrix.classes) == 1300
    assert len(universe.use_cases) == 21
    assert sorted(c for p in partitioning.partitions for c in p) == list(matrix.classes)
    assert elapsed <= 30.0

    peak_kb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    assert peak_kb <= 2 * 1024 * 1024
    print(
        f"PASS performance envelope: {edge_count} edges, {elapsed:.2f} s, "
        f"peak {peak_kb / 1024:.0f} MB"
    )


def test_coverage_arithmetic():
    """73 observed of 109 known reports 66%."""
    observed = [f"C{i:03d}" for i in range(73)]
    known = observed + [f"K{i:03d}" for i in range(36)]
    coverage = coverage_report(observed, known)
    assert coverage.observed_classes == 73
    assert coverage.total_known_classes == 109
    assert coverage.class_coverage_ratio == 73 / 109
    assert coverage.coverage_percent == 66
    print("PASS coverage arithmetic: 73/109 -> 66%")


# -- helpers ---------------------------------------------------------------


def _prepared(spec: dict[str, list[tuple[str, ...]]]):
    paths = paths_from(spec)
    universe = build_universe(paths, list(spec))
    return paths, universe, index_relations(paths, universe)


def _small_corpus(rng: random.Random) -> dict[str, list[tuple[str, ...]]]:
    """<= 8 classes, <= 4 use cases, <= 6 paths in total."""
    num_classes = rng.randint(2, 8)
    classes = [f"K{i}" for i in range(num_classes)]
    labels = [f"u{i}" for i in range(rng.randint(1, 4))]
    spec: dict[str, list[tuple[str, ...]]] = {label: [] for label in labels}
    for _ in range(rng.randint(1, 6)):
        length = rng.randint(1, 5)
        seq = [rng.choice(classes)]
        while len(seq) < length:
            nxt = rng.choice(classes)
            if nxt != seq[-1]:
                seq.append(nxt)
        spec[rng.choice(labels)].append(tuple(seq))
    return spec  # labels without paths stay in, to exercise the |U| denominator


def _random_partition(rng: random.Random, classes: tuple[str, ...]) -> list[tuple[str, ...]]:
    shuffled = list(classes)
    rng.shuffle(shuffled)
    k = rng.randint(1, min(4, len(shuffled)))
    groups: list[list[str]] = [[] for _ in range(k)]
    for i, cls in enumerate(shuffled):
        groups[i % k].append(cls)
    return [tuple(sorted(g)) for g in groups if g]


def _two_file_corpus(directory: Path, spec: dict, reverse_files: bool) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for label, paths in spec.items():
        half = max(1, len(paths) // 2)
        names = []
        for k, chunk in enumerate((paths[:half], paths[half:])):
            name = f"{label}-{k}.trace"
            lines = synth.trace_lines(chunk)
            (directory / name).write_text(
                ("\n".join(lines) + "\n") if lines else "\n", encoding="utf-8"
            )
            names.append(name)
        if reverse_files:
            names.reverse()
        entries.append({"label": label, "trace_files": names})
    manifest = directory / "manifest.json"
    manifest.write_text(json.dumps({"use_cases": entries}), encoding="utf-8")
    return manifest
