"""Class-pair similarity features over use-case sets.

Two classes are *directly* related in a use case when they appear adjacent
in one of its reduced paths, and *indirectly* related when they appear in
the same path with at least one intermediary.  Both relations are unordered
and set-based per use case: repeats within a use case count once, and a pair
may be in both relations at once.

Four features, each in [0, 1], compare two classes c1 and c2:

* dcr: |use cases with a direct c1-c2 relation| / |U_c1 union U_c2|
* icr: the same ratio for the indirect relation
* dcp: sum over every third class cl of |U_direct(c1,cl) intersect
  U_direct(c2,cl)|, normalized by (|C| - 2) * |U|
* icp_feature: the dcp structure applied to the indirect relation

Their sum populates the symmetric, zero-diagonal similarity matrix with
entries in [0, 4].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .cct import ReducedPath

_EMPTY: frozenset[str] = frozenset()


@dataclass(frozen=True)
class ClassUniverse:
    """All observed classes plus where they occur.

    ``classes`` is sorted; ``use_cases`` keeps manifest order and defines
    |U| (a use case with no paths still counts).  ``occurrence`` maps each
    class to the use cases whose paths contain it.
    """

    classes: tuple[str, ...]
    use_cases: tuple[str, ...]
    occurrence: Mapping[str, frozenset[str]]

    def index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.classes)}


@dataclass(frozen=True)
class RelationIndex:
    """Per-pair use-case sets, keyed by name-ordered class pairs."""

    direct: Mapping[tuple[str, str], frozenset[str]]
    indirect: Mapping[tuple[str, str], frozenset[str]]


@dataclass(frozen=True)
class SimilarityMatrix:
    classes: tuple[str, ...]
    values: np.ndarray

    def to_json_dict(self) -> dict:
        return {"classes": list(self.classes), "matrix": self.values.tolist()}


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def build_universe(paths: Iterable[ReducedPath], use_cases: Iterable[str]) -> ClassUniverse:
    occurrence: dict[str, set[str]] = {}
    for path in paths:
        for cls in path.classes:
            occurrence.setdefault(cls, set()).add(path.use_case)
    return ClassUniverse(
        classes=tuple(sorted(occurrence)),
        use_cases=tuple(use_cases),
        occurrence={c: frozenset(s) for c, s in occurrence.items()},
    )


def index_relations(paths: Iterable[ReducedPath], universe: ClassUniverse) -> RelationIndex:
    """Scan every path once and collect both relations."""
    direct: dict[tuple[str, str], set[str]] = {}
    indirect: dict[tuple[str, str], set[str]] = {}
    for path in paths:
        seq = path.classes
        for i in range(len(seq) - 1):
            direct.setdefault(_pair(seq[i], seq[i + 1]), set()).add(path.use_case)
        for i in range(len(seq)):
            for j in range(i + 2, len(seq)):
                if seq[i] != seq[j]:
                    indirect.setdefault(_pair(seq[i], seq[j]), set()).add(path.use_case)
    return RelationIndex(
        direct={k: frozenset(v) for k, v in direct.items()},
        indirect={k: frozenset(v) for k, v in indirect.items()},
    )


def dcr(c1: str, c2: str, idx: RelationIndex, universe: ClassUniverse) -> float:
    shared = idx.direct.get(_pair(c1, c2), _EMPTY)
    union = universe.occurrence[c1] | universe.occurrence[c2]
    return len(shared) / len(union)


def icr(c1: str, c2: str, idx: RelationIndex, universe: ClassUniverse) -> float:
    shared = idx.indirect.get(_pair(c1, c2), _EMPTY)
    union = universe.occurrence[c1] | universe.occurrence[c2]
    return len(shared) / len(union)


def _common_partner_sum(
    c1: str, c2: str, relation: Mapping[tuple[str, str], frozenset[str]], universe: ClassUniverse
) -> int:
    total = 0
    for cl in universe.classes:
        if cl == c1 or cl == c2:
            continue
        total += len(relation.get(_pair(c1, cl), _EMPTY) & relation.get(_pair(c2, cl), _EMPTY))
    return total


def dcp(c1: str, c2: str, idx: RelationIndex, universe: ClassUniverse) -> float:
    n_classes = len(universe.classes)
    if n_classes < 3:
        return 0.0
    total = _common_partner_sum(c1, c2, idx.direct, universe)
    return total / ((n_classes - 2) * len(universe.use_cases))


def icp_feature(c1: str, c2: str, idx: RelationIndex, universe: ClassUniverse) -> float:
    n_classes = len(universe.classes)
    if n_classes < 3:
        return 0.0
    total = _common_partner_sum(c1, c2, idx.indirect, universe)
    return total / ((n_classes - 2) * len(universe.use_cases))


def _ratio_and_partner_counts(
    relation: Mapping[tuple[str, str], frozenset[str]],
    pos: Mapping[str, int],
    n: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Count pair use cases and per-use-case common partners for one relation.

    The partner counts come from squaring each use case's boolean adjacency
    matrix: entry (i, j) sums adjacency[i, cl] * adjacency[cl, j] over all
    cl, which counts exactly the common partners (the zero diagonal excludes
    cl in {i, j}).  Every intermediate is an exact small integer in float64.
    """
    ratio_num = np.zeros((n, n), dtype=np.float64)
    partner_num = np.zeros((n, n), dtype=np.float64)
    by_uc: dict[str, list[tuple[int, int]]] = {}
    for (a, b), ucs in relation.items():
        i, j = pos[a], pos[b]
        ratio_num[i, j] = len(ucs)
        ratio_num[j, i] = len(ucs)
        for u in ucs:
            by_uc.setdefault(u, []).append((i, j))
    if n >= 3:
        adjacency = np.zeros((n, n), dtype=np.float64)
        for pairs in by_uc.values():
            adjacency.fill(0.0)
            rows = np.fromiter((p[0] for p in pairs), dtype=np.intp, count=len(pairs))
            cols = np.fromiter((p[1] for p in pairs), dtype=np.intp, count=len(pairs))
            adjacency[rows, cols] = 1.0
            adjacency[cols, rows] = 1.0
            partner_num += adjacency @ adjacency
    return ratio_num, partner_num


def similarity_matrix(idx: RelationIndex, universe: ClassUniverse) -> SimilarityMatrix:
    """Compute the summed feature matrix for the whole universe.

    Vectorized but bit-for-bit equal to summing the four per-pair features
    left to right: numerators and denominators are exact integers carried in
    float64, and the four quotients are added in the same order.
    """
    classes = universe.classes
    n = len(classes)
    n_uc = len(universe.use_cases)
    pos = universe.index()
    if n == 0:
        return SimilarityMatrix(classes, np.zeros((0, 0), dtype=np.float64))

    occ = np.zeros((n, n_uc), dtype=np.float64)
    uc_pos = {u: k for k, u in enumerate(universe.use_cases)}
    for cls, ucs in universe.occurrence.items():
        for u in ucs:
            occ[pos[cls], uc_pos[u]] = 1.0
    occ_count = occ.sum(axis=1)
    union = occ_count[:, None] + occ_count[None, :] - occ @ occ.T
    np.fill_diagonal(union, 1.0)

    direct_ratio, direct_partner = _ratio_and_partner_counts(idx.direct, pos, n)
    indirect_ratio, indirect_partner = _ratio_and_partner_counts(idx.indirect, pos, n)

    values = direct_ratio / union
    if n >= 3:
        partner_denom = float((n - 2) * n_uc)
        values = values + direct_partner / partner_denom
    values = values + indirect_ratio / union
    if n >= 3:
        values = values + indirect_partner / partner_denom
    np.fill_diagonal(values, 0.0)
    return SimilarityMatrix(classes, values)
