"""Agglomerative clustering of the similarity matrix.

Unweighted average linkage over the *original* matrix entries: the score of
two clusters is the sum of all cross-pair similarities divided by the
product of the cluster sizes.  Cross-pair sums are maintained by the merge
recurrence sums(A+B, K) = sums(A, K) + sums(B, K) in float64; that
recurrence is the score's arithmetic definition, so any reimplementation
following it reproduces the merge sequence bit for bit.

Each step merges the pair with the maximal score.  Ties (exact float64
equality) are broken by the pair's lexicographically smallest member class
name, then by the smallest member name of the other cluster.  Merging
continues until the requested number of clusters remains; zero-similarity
clusters are never dropped, they simply merge last.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidTarget
from .features import SimilarityMatrix


@dataclass(frozen=True)
class MergeRecord:
    """One merge step: member tuples of both clusters plus the score.

    ``a`` holds the cluster whose smallest member name is smaller.
    """

    a: tuple[str, ...]
    b: tuple[str, ...]
    score: float


@dataclass
class Partitioning:
    """A flat cut of the merge hierarchy.

    Partitions are sorted tuples ordered by their first member; merge_log
    holds the merges applied to reach them, so len(merge_log) equals
    |classes| - len(partitions).
    """

    partitions: list[tuple[str, ...]]
    target_n: int
    merge_log: list[MergeRecord] = field(default_factory=list)


def merge_sequence(matrix: SimilarityMatrix) -> list[MergeRecord]:
    """Run the full agglomeration down to a single cluster.

    Keeps a cached row maximum per cluster so each step only rescans rows
    whose cached best partner was invalidated by the merge.
    """
    classes = matrix.classes
    n = len(classes)
    if n <= 1:
        return []

    sums = matrix.values.astype(np.float64, copy=True)
    sizes = np.ones(n, dtype=np.int64)
    # Rank of each class name in sorted order; cluster rank is the min over members.
    order = sorted(range(n), key=lambda i: classes[i])
    min_rank = np.empty(n, dtype=np.int64)
    for position, i in enumerate(order):
        min_rank[i] = position
    members: list[list[str]] = [[c] for c in classes]

    scores = sums.copy()
    np.fill_diagonal(scores, -np.inf)
    row_max = scores.max(axis=1)
    row_arg = scores.argmax(axis=1)
    alive = np.ones(n, dtype=bool)
    records: list[MergeRecord] = []

    for _ in range(n - 1):
        best = np.max(row_max)
        tied_rows = np.where(row_max == best)[0]
        if len(tied_rows) == 2:
            p, q = int(tied_rows[0]), int(tied_rows[1])
        else:
            # Gather every pair attaining the maximum and pick the smallest
            # (min rank, other rank) key.
            local_rows, local_cols = np.where(scores[tied_rows] == best)
            rows = tied_rows[local_rows]
            keep = rows < local_cols
            rows, cols = rows[keep], local_cols[keep]
            low = np.minimum(min_rank[rows], min_rank[cols])
            high = np.maximum(min_rank[rows], min_rank[cols])
            pick = np.lexsort((high, low))[0]
            p, q = int(rows[pick]), int(cols[pick])
        if min_rank[q] < min_rank[p]:
            p, q = q, p

        records.append(
            MergeRecord(a=tuple(sorted(members[p])), b=tuple(sorted(members[q])), score=float(best))
        )

        members[p].extend(members[q])
        members[q] = []
        sums[p, :] += sums[q, :]
        sums[:, p] = sums[p, :]
        sizes[p] += sizes[q]
        alive[q] = False
        min_rank[p] = min(min_rank[p], min_rank[q])

        scores[q, :] = -np.inf
        scores[:, q] = -np.inf
        row_max[q] = -np.inf
        row_arg[q] = q
        new_row = np.where(alive, sums[p, :] / (sizes[p] * sizes), -np.inf)
        new_row[p] = -np.inf
        scores[p, :] = new_row
        scores[:, p] = new_row

        if len(records) == n - 1:
            break
        # Rows whose cached best pointed at a merged cluster must rescan;
        # everyone else only checks their updated entry against the cache.
        stale = alive & ((row_arg == p) | (row_arg == q))
        stale[p] = True
        stale_idx = np.where(stale)[0]
        sub = scores[stale_idx]
        row_max[stale_idx] = sub.max(axis=1)
        row_arg[stale_idx] = sub.argmax(axis=1)
        fresh = alive & ~stale
        improved = fresh & (new_row > row_max)
        row_max[improved] = new_row[improved]
        row_arg[improved] = p

    return records


def cut(classes: Sequence[str], records: Sequence[MergeRecord], n: int) -> Partitioning:
    """Replay a merge-log prefix to produce an n-cluster partitioning."""
    if n < 1:
        raise InvalidTarget(f"cluster count must be >= 1, got {n}")
    total = len(classes)
    steps = min(max(total - n, 0), len(records))
    clusters: set[frozenset[str]] = {frozenset({c}) for c in classes}
    applied: list[MergeRecord] = []
    for record in records[:steps]:
        clusters.remove(frozenset(record.a))
        clusters.remove(frozenset(record.b))
        clusters.add(frozenset(record.a) | frozenset(record.b))
        applied.append(record)
    partitions = sorted((tuple(sorted(c)) for c in clusters), key=lambda t: t[0])
    return Partitioning(partitions=partitions, target_n=n, merge_log=applied)


def cluster(matrix: SimilarityMatrix, n: int) -> Partitioning:
    """Cluster the matrix classes into n partitions (singletons when n >= |C|)."""
    if n < 1:
        raise InvalidTarget(f"cluster count must be >= 1, got {n}")
    return cut(matrix.classes, merge_sequence(matrix), n)


def sweep_sizes(num_classes: int) -> list[int]:
    """Candidate partition counts to try for an application of this size.

    Halving steps for 100+ classes; smaller applications shrink from half
    the class count by growing powers of two.  Every candidate stays >= 2.
    """
    if num_classes < 2:
        raise InvalidTarget(f"need at least 2 classes to sweep, got {num_classes}")
    if num_classes >= 100:
        sizes: list[int] = []
        value = num_classes // 2
        while value >= 2:
            if not sizes or sizes[-1] != value:
                sizes.append(value)
            value //= 2
        return sizes
    sizes = []
    value = num_classes // 2
    step = 2
    while value >= 2:
        sizes.append(value)
        value -= step
        step *= 2
    return sizes


def default_target(num_classes: int) -> int:
    """Default partition count: five services, fewer only for tiny apps."""
    return min(5, num_classes)
