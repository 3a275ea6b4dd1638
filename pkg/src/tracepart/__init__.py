"""Trace-driven decomposition of monoliths into candidate microservices.

The pipeline turns use-case-labeled enter/exit traces into class-level
calling context trees, reduces them to root-to-leaf paths, scores class
pairs by four use-case similarity features, clusters the similarity matrix
bottom-up, and explains each recommended partition by the use cases its
classes serve, alongside five quality metrics.
"""

from .cct import ClassCct, ReducedPath, build_ccts, extract_reduced_paths
from .clustering import MergeRecord, Partitioning, cluster, default_target, sweep_sizes
from .features import (
    ClassUniverse,
    RelationIndex,
    SimilarityMatrix,
    build_universe,
    dcr,
    dcp,
    icr,
    icp_feature,
    index_relations,
    similarity_matrix,
)
from .ingest import Direction, TraceCorpus, TraceEvent, load_corpus, parse_trace_line
from .metrics import MetricsReport, RuntimeCallGraph, bcp, evaluate, icp_metric, ifn, ned, sm

__version__ = "0.1.0"

__all__ = [
    "ClassCct",
    "ClassUniverse",
    "Direction",
    "MergeRecord",
    "MetricsReport",
    "Partitioning",
    "ReducedPath",
    "RelationIndex",
    "RuntimeCallGraph",
    "SimilarityMatrix",
    "TraceCorpus",
    "TraceEvent",
    "bcp",
    "build_ccts",
    "build_universe",
    "cluster",
    "dcp",
    "dcr",
    "default_target",
    "evaluate",
    "extract_reduced_paths",
    "icp_feature",
    "icp_metric",
    "icr",
    "ifn",
    "index_relations",
    "load_corpus",
    "ned",
    "parse_trace_line",
    "similarity_matrix",
    "sm",
    "sweep_sizes",
    "__version__",
]
