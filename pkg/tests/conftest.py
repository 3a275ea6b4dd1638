"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from tracepart import synth
from tracepart.cct import ReducedPath
from tracepart.features import (
    ClassUniverse,
    RelationIndex,
    build_universe,
    index_relations,
)


def paths_from(spec: dict[str, list[tuple[str, ...] | list[str]]]) -> set[ReducedPath]:
    """Build a ReducedPath set from {use_case: [class sequences]}."""
    return {
        ReducedPath(uc, tuple(seq)) for uc, seqs in spec.items() for seq in seqs
    }


def universe_and_index(
    spec: dict[str, list], use_cases: list[str] | None = None
) -> tuple[set[ReducedPath], ClassUniverse, RelationIndex]:
    """Paths, universe and relation index in one go; |U| defaults to the keys."""
    paths = paths_from(spec)
    universe = build_universe(paths, use_cases if use_cases is not None else list(spec))
    return paths, universe, index_relations(paths, universe)


def random_path_corpus(
    rng: random.Random,
    *,
    max_classes: int = 8,
    max_use_cases: int = 4,
    max_paths: int = 6,
    max_len: int = 5,
) -> dict[str, list[tuple[str, ...]]]:
    """A small random corpus: per-use-case class sequences without
    consecutive repeats (the reduced-path invariant)."""
    num_classes = rng.randint(2, max_classes)
    classes = [f"K{i}" for i in range(num_classes)]
    num_ucs = rng.randint(1, max_use_cases)
    corpus: dict[str, list[tuple[str, ...]]] = {}
    for u in range(num_ucs):
        label = f"u{u}"
        paths = []
        for _ in range(rng.randint(1, max_paths)):
            length = rng.randint(1, max_len)
            seq = [rng.choice(classes)]
            while len(seq) < length:
                nxt = rng.choice(classes)
                if nxt != seq[-1]:
                    seq.append(nxt)
            paths.append(tuple(seq))
        corpus[label] = paths
    return corpus


def write_corpus_dir(tmp_path: Path, spec: dict[str, list], name: str = "corpus") -> Path:
    """Write trace files + manifest for {use_case: [paths]}; returns manifest path."""
    return synth.write_corpus(tmp_path / name, spec)


@pytest.fixture
def petstore_spec() -> dict[str, list[tuple[str, ...]]]:
    """A small shop-shaped corpus: two use cases over eight classes."""
    return {
        "click_item": [
            ("ViewCategoryController", "PetStoreImpl", "SqlMapCategoryDao", "Category"),
        ],
        "update_item": [
            ("UpdateCartQuantitiesController", "Cart"),
            ("UpdateCartQuantitiesController", "CartItem"),
            ("UpdateCartQuantitiesController", "Item"),
        ],
    }


@pytest.fixture
def petstore_manifest(tmp_path: Path, petstore_spec) -> Path:
    return write_corpus_dir(tmp_path, petstore_spec)
