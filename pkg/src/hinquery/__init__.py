"""Top-k query engines for information networks with hierarchical
inheritance relations, plus brute-force reference implementations and a
scaling benchmark."""

from .backend import active_backend, available_backends, use_backend
from .bundle import (BundleValidationError, GraphBundle, GraphFormatError,
                     load_bundle, load_query, save_bundle)
from .general import (CandidateLists, GeneralResult, StarDecomposition,
                      candidate_selection, decompose, general_topk)
from .generate import GenConfig, generate, sample_general_query, sample_star_query
from .model import (AnchorError, Arity, DataGraph, HinQueryError, Inheritance,
                    Match, QueryClass, QueryError, QueryGraph, Schema,
                    SchemaError, classify_query, resolve_anchors, validate_graph)
from .oracle import (OracleCapacityError, bfs_closeness, exact_closeness,
                     exact_general_topk, exact_star_topk)
from .scoring import (ClosenessScore, MatchingScore, PathStats, ScoringParams,
                      aggregate_bounds, closeness, general_score,
                      lower_bound_step, star_score, upper_bound_step)
from .star import (StarResult, StarStats, TopKQueue, VertexStateTable,
                   check_convergence, consider_candidate, star_topk)

__version__ = "0.1.0"

__all__ = [
    "AnchorError", "Arity", "BundleValidationError", "CandidateLists",
    "ClosenessScore", "DataGraph", "GenConfig", "GeneralResult", "GraphBundle",
    "GraphFormatError", "HinQueryError", "Inheritance", "Match",
    "MatchingScore", "OracleCapacityError", "PathStats", "QueryClass",
    "QueryError", "QueryGraph", "Schema", "SchemaError", "ScoringParams",
    "StarDecomposition", "StarResult", "StarStats", "TopKQueue",
    "VertexStateTable", "active_backend", "aggregate_bounds",
    "available_backends", "bfs_closeness", "candidate_selection",
    "check_convergence", "classify_query", "closeness", "consider_candidate",
    "decompose", "exact_closeness", "exact_general_topk", "exact_star_topk",
    "general_score", "general_topk", "generate", "load_bundle", "load_query",
    "lower_bound_step", "resolve_anchors", "sample_general_query",
    "sample_star_query", "save_bundle", "star_score", "star_topk",
    "upper_bound_step", "use_backend", "validate_graph",
]
