"""Partition explanations, trace coverage, and report rendering.

Every class is explained by the tuple of use cases it participates in
(manifest order), and every partition by the multiset of its members'
tuples.  Reports serialize deterministically: keys are emitted in a fixed
order and every float is rendered with 6 decimal places (round-half-even),
so regenerating a report from the same inputs is byte-identical.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import KnownClassListInvalid
from .metrics import MetricsReport, RuntimeCallGraph, interface_classes

JsonValue = None | bool | int | float | str | list | dict


@dataclass(frozen=True)
class PartitionExplanation:
    use_cases: tuple[str, ...]
    tuples: tuple[tuple[tuple[str, ...], int], ...]


@dataclass(frozen=True)
class Explanation:
    per_class: dict[str, tuple[str, ...]]
    per_partition: tuple[PartitionExplanation, ...]


@dataclass(frozen=True)
class Coverage:
    observed_classes: int
    total_known_classes: int | None
    class_coverage_ratio: float | None
    coverage_percent: int | None
    unobserved_known: tuple[str, ...]
    unknown_observed: tuple[str, ...]


def explain(
    partitions: Sequence[Sequence[str]],
    occurrence: Mapping[str, frozenset[str]],
    use_case_order: Sequence[str],
) -> Explanation:
    rank = {u: i for i, u in enumerate(use_case_order)}
    per_class = {
        cls: tuple(sorted(ucs, key=lambda u: rank.get(u, len(rank))))
        for cls, ucs in occurrence.items()
    }
    parts = []
    for part in partitions:
        tuples = Counter(per_class.get(cls, ()) for cls in part)
        ordered = tuple(
            sorted(tuples.items(), key=lambda kv: tuple(rank.get(u, len(rank)) for u in kv[0]))
        )
        union = set().union(*(per_class.get(cls, ()) for cls in part))
        parts.append(
            PartitionExplanation(
                use_cases=tuple(sorted(union, key=lambda u: rank.get(u, len(rank)))),
                tuples=ordered,
            )
        )
    return Explanation(per_class=per_class, per_partition=tuple(parts))


def coverage_report(
    observed_classes: Iterable[str],
    known_classes: Sequence[str] | None = None,
) -> Coverage:
    """Compare observed classes against an optional known-class list.

    The integer percentage truncates (73 of 109 reports 66), matching how
    coverage counts are conventionally quoted; the exact ratio is kept
    alongside.  Observed classes missing from the known list are returned
    for warning display, never silently dropped.
    """
    observed = set(observed_classes)
    if known_classes is None:
        return Coverage(len(observed), None, None, None, (), ())
    if len(set(known_classes)) != len(known_classes):
        dup = sorted({c for c in known_classes if known_classes.count(c) > 1})
        raise KnownClassListInvalid(f"duplicate class names in known-class list: {dup}")
    known = set(known_classes)
    ratio = len(observed & known) / len(known)
    return Coverage(
        observed_classes=len(observed),
        total_known_classes=len(known),
        class_coverage_ratio=ratio,
        coverage_percent=math.floor(ratio * 100),
        unobserved_known=tuple(sorted(known - observed)),
        unknown_observed=tuple(sorted(observed - known)),
    )


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite number {value!r}")
    return format(value, ".6f")


def dumps_fixed(value: JsonValue, indent: int = 0) -> str:
    """Serialize JSON with floats fixed to 6 decimal places.

    Dict insertion order is preserved, so callers control key order and the
    output is reproducible byte for byte.
    """
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, bool) or value is None:
        return "null" if value is None else ("true" if value else "false")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [dumps_fixed(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(inner + i for i in items) + "\n" + pad + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{dumps_fixed(str(k), indent + 1)}: {dumps_fixed(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(inner + i for i in items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_machine(value: JsonValue) -> str:
    """Compact full-precision JSON for machine artifacts (matrix, merges, graph)."""
    return json.dumps(value, ensure_ascii=False, separators=(",", ":"))


def metrics_json_dict(
    report: MetricsReport,
    partitions: Sequence[Sequence[str]],
    explanation: Explanation,
    interfaces: Sequence[Iterable[str]],
) -> dict:
    """The metrics report schema shared by the CLI and the service."""
    return {
        "sm": report.sm,
        "icp": report.icp,
        "bcp": report.bcp,
        "ifn": report.ifn,
        "ned": report.ned,
        "partitions": [
            {
                "classes": list(part),
                "use_cases": list(explanation.per_partition[i].use_cases),
                "interfaces": sorted(interfaces[i]),
            }
            for i, part in enumerate(partitions)
        ],
    }


def build_report(
    *,
    target_n: int,
    partitions: Sequence[Sequence[str]],
    metrics: MetricsReport,
    explanation: Explanation,
    graph: RuntimeCallGraph,
    coverage: Coverage,
    corpus_digest: str,
    warnings: Mapping[str, int],
) -> dict:
    """Assemble the full report document for one target size."""
    interfaces = interface_classes(partitions, graph)
    doc = {
        "tool": {"name": "tracepart", "version": "0.1.0"},
        "corpus_digest": corpus_digest,
        "target_n": target_n,
        "metrics": {
            "sm": metrics.sm,
            "icp": metrics.icp,
            "bcp": metrics.bcp,
            "ifn": metrics.ifn,
            "ned": metrics.ned,
        },
        "partitions": [
            {
                "id": i,
                "classes": list(part),
                "use_cases": list(explanation.per_partition[i].use_cases),
                "interfaces": sorted(interfaces[i]),
                "tuples": [
                    {"use_cases": list(ucs), "count": count}
                    for ucs, count in explanation.per_partition[i].tuples
                ],
            }
            for i, part in enumerate(partitions)
        ],
        "per_class": {cls: list(explanation.per_class[cls]) for cls in sorted(explanation.per_class)},
        "coverage": {
            "observed_classes": coverage.observed_classes,
            "total_known_classes": coverage.total_known_classes,
            "class_coverage_ratio": coverage.class_coverage_ratio,
            "coverage_percent": coverage.coverage_percent,
            "unobserved_known": list(coverage.unobserved_known),
            "unknown_observed": list(coverage.unknown_observed),
        },
        "warnings": dict(warnings),
    }
    return doc


def render_text(doc: dict) -> str:
    """Human-readable rendering of a report document."""
    lines: list[str] = []
    metrics = doc["metrics"]
    lines.append(f"Partitions: {len(doc['partitions'])} (target {doc['target_n']})")
    lines.append(
        "Metrics: "
        + "  ".join(f"{name}={_format_float(metrics[name])}" for name in ("sm", "icp", "bcp", "ifn", "ned"))
    )
    cov = doc["coverage"]
    if cov["total_known_classes"] is not None:
        lines.append(
            f"Coverage: {cov['observed_classes']} observed, "
            f"{cov['total_known_classes']} known ({cov['coverage_percent']}%)"
        )
    else:
        lines.append(f"Coverage: {cov['observed_classes']} classes observed")
    for part in doc["partitions"]:
        lines.append("")
        lines.append(
            f"Partition {part['id']}: {len(part['classes'])} classes, "
            f"{len(part['use_cases'])} use cases, {len(part['interfaces'])} interfaces"
        )
        lines.append("  classes: " + ", ".join(part["classes"]))
        if part["interfaces"]:
            lines.append("  interfaces: " + ", ".join(part["interfaces"]))
        for entry in part["tuples"]:
            label = ", ".join(entry["use_cases"]) if entry["use_cases"] else "(none)"
            lines.append(f"  {entry['count']} class(es) used by: {label}")
    return "\n".join(lines) + "\n"
