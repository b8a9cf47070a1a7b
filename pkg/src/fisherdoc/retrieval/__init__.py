from .bm25 import (
    DEFAULT_B,
    DEFAULT_K1,
    TOP_K,
    b_grid,
    bm25_idf,
    bm25_search,
    grid_scan,
    k1_grid,
    search_topics,
    tokenize_query,
)
from .fusion import cosine_scores, fuse, fuse_run, minmax_normalize
from .index import IndexError_, InvertedIndex, build_index, load_index, save_index
from .metrics import (
    RetrievalReport,
    average_precision,
    ci95,
    evaluate_run,
    map_metric,
    p_at_20,
    per_topic_metrics,
    precision_at,
    write_trec_run,
)

__all__ = [
    "InvertedIndex",
    "IndexError_",
    "build_index",
    "save_index",
    "load_index",
    "bm25_search",
    "bm25_idf",
    "search_topics",
    "tokenize_query",
    "grid_scan",
    "k1_grid",
    "b_grid",
    "DEFAULT_K1",
    "DEFAULT_B",
    "TOP_K",
    "minmax_normalize",
    "cosine_scores",
    "fuse",
    "fuse_run",
    "average_precision",
    "precision_at",
    "per_topic_metrics",
    "map_metric",
    "p_at_20",
    "ci95",
    "RetrievalReport",
    "evaluate_run",
    "write_trec_run",
]
