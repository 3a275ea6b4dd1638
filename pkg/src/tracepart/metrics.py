"""Partition quality metrics over the runtime call graph.

The call graph aggregates every tree edge (virtual root excluded) into
directed class pairs with total call counts.  Five metrics score a
partitioning:

* sm: mean per-partition structural cohesion minus mean pairwise coupling.
  Cohesion of partition i is mu_i / m_i^2 with mu_i the number of distinct
  directed edges inside i; coupling of partitions i, j is sigma_ij /
  (2 * m_i * m_j) with sigma_ij the distinct directed edges between them in
  either direction.  Higher is better.
* icp_metric: calls crossing partition boundaries as a share of all calls,
  weighted by call volume.  Lower is better.
* bcp: mean over partitions of ln(number of use cases touching the
  partition).  Lower means more business-purpose focus.
* ifn: mean number of interface classes (classes called from outside their
  partition).  Lower is better.
* ned: share of classes living outside partitions of size 5..20.  Lower is
  better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

PartitionSets = Sequence[Sequence[str]]


@dataclass(frozen=True)
class RuntimeCallGraph:
    """Directed (caller, callee) -> total call count, summed over all traces."""

    edges: Mapping[tuple[str, str], int]


@dataclass(frozen=True)
class PartitionStats:
    size: int
    use_case_count: int
    interface_count: int


@dataclass(frozen=True)
class MetricsReport:
    sm: float
    icp: float
    bcp: float
    ifn: float
    ned: float
    per_partition: tuple[PartitionStats, ...]


def _assignment(partitions: PartitionSets) -> dict[str, int]:
    owner: dict[str, int] = {}
    for i, part in enumerate(partitions):
        for cls in part:
            owner[cls] = i
    return owner


def sm(partitions: PartitionSets, graph: RuntimeCallGraph) -> float:
    owner = _assignment(partitions)
    m = len(partitions)
    inside = [0] * m
    between: dict[tuple[int, int], int] = {}
    for caller, callee in graph.edges:
        i = owner.get(caller)
        j = owner.get(callee)
        if i is None or j is None:
            continue
        if i == j:
            inside[i] += 1
        else:
            key = (i, j) if i < j else (j, i)
            between[key] = between.get(key, 0) + 1
    cohesion = sum(inside[i] / len(partitions[i]) ** 2 for i in range(m)) / m
    if m == 1:
        return cohesion
    # Sum couplings in index order so the value never depends on the edge
    # map's iteration order (the graph may be rebuilt from sorted artifacts).
    coupling = sum(
        sigma / (2 * len(partitions[i]) * len(partitions[j]))
        for (i, j), sigma in sorted(between.items())
    ) / (m * (m - 1) / 2)
    return cohesion - coupling


def icp_metric(partitions: PartitionSets, graph: RuntimeCallGraph) -> float:
    """Share of call volume crossing partition boundaries."""
    owner = _assignment(partitions)
    total = 0
    crossing = 0
    for (caller, callee), count in graph.edges.items():
        if caller not in owner or callee not in owner:
            continue
        total += count
        if owner[caller] != owner[callee]:
            crossing += count
    if total == 0 or len(partitions) == 1:
        return 0.0
    return crossing / total


def bcp(partitions: PartitionSets, occurrence: Mapping[str, frozenset[str]]) -> float:
    values = []
    for part in partitions:
        touched: set[str] = set()
        for cls in part:
            touched |= occurrence.get(cls, frozenset())
        values.append(math.log(len(touched)) if touched else 0.0)
    return sum(values) / len(values)


def interface_classes(partitions: PartitionSets, graph: RuntimeCallGraph) -> list[set[str]]:
    """Per partition, the classes receiving at least one call from outside."""
    owner = _assignment(partitions)
    result: list[set[str]] = [set() for _ in partitions]
    for caller, callee in graph.edges:
        i = owner.get(caller)
        j = owner.get(callee)
        if i is None or j is None or i == j:
            continue
        result[j].add(callee)
    return result


def ifn(partitions: PartitionSets, graph: RuntimeCallGraph) -> float:
    counts = [len(s) for s in interface_classes(partitions, graph)]
    return sum(counts) / len(counts)


def ned(partitions: PartitionSets) -> float:
    total = sum(len(p) for p in partitions)
    sized = sum(len(p) for p in partitions if 5 <= len(p) <= 20)
    return 1.0 - sized / total


def evaluate(
    partitions: PartitionSets,
    graph: RuntimeCallGraph,
    occurrence: Mapping[str, frozenset[str]],
) -> MetricsReport:
    interfaces = interface_classes(partitions, graph)
    stats = tuple(
        PartitionStats(
            size=len(part),
            use_case_count=len(set().union(*(occurrence.get(c, frozenset()) for c in part))),
            interface_count=len(interfaces[i]),
        )
        for i, part in enumerate(partitions)
    )
    return MetricsReport(
        sm=sm(partitions, graph),
        icp=icp_metric(partitions, graph),
        bcp=bcp(partitions, occurrence),
        ifn=ifn(partitions, graph),
        ned=ned(partitions),
        per_partition=stats,
    )
