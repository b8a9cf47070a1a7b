"""BM25 search and the (k1, b) parameter grid scan.

idf(t) = ln(1 + (N - n_t + 0.5) / (n_t + 0.5)); ties broken by doc id
ascending (index rows are docno-sorted, so row order is the tie-break)."""

import logging

import numpy as np

from ..corpus import default_stopwords, remove_stopwords, tokenize
from .bm25_kernels import bm25_accumulate
from .metrics import map_metric

log = logging.getLogger(__name__)

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
TOP_K = 1000


def bm25_idf(n_docs, doc_freq):
    return float(np.log(1.0 + (n_docs - doc_freq + 0.5) / (doc_freq + 0.5)))


def bm25_search(index, query_tokens, k1=DEFAULT_K1, b=DEFAULT_B, top=TOP_K):
    """Ranked (doc_id, score) list for a tokenized query.

    Only documents matching at least one query term are returned; an all-OOV
    query yields an empty list with a warning.
    """
    if k1 < 0:
        raise ValueError(f"k1 must be >= 0, got {k1}")
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"b must be in [0, 1], got {b}")
    starts, ends, idfs = [], [], []
    for t in query_tokens:
        v = index.term_index.get(t)
        if v is None:
            continue
        starts.append(index.term_starts[v])
        ends.append(index.term_starts[v + 1])
        idfs.append(bm25_idf(index.n_docs, ends[-1] - starts[-1]))
    if not starts:
        log.warning("query has no indexed terms; empty result")
        return []
    norm = k1 * (1.0 - b + b * index.doc_lengths / index.avgdl)
    scores = np.zeros(index.n_docs)
    bm25_accumulate(np.asarray(starts, dtype=np.int64),
                    np.asarray(ends, dtype=np.int64),
                    np.asarray(idfs, dtype=np.float64),
                    index.post_docs, index.post_tfs,
                    norm.astype(np.float64), scores)
    cand = np.flatnonzero(scores > 0.0)
    # primary key -score, secondary key row (== docno order)
    order = cand[np.lexsort((cand, -scores[cand]))][:top]
    return [(index.doc_ids[i], float(scores[i])) for i in order]


def tokenize_query(text, stopwords=None):
    if stopwords is None:
        stopwords = default_stopwords()
    return remove_stopwords(tokenize(text), stopwords)


def search_topics(index, collection, k1=DEFAULT_K1, b=DEFAULT_B, top=TOP_K,
                  fields="title+desc"):
    """RankedRun over all topics of a TREC collection."""
    run = {}
    for topic in collection.topics:
        q = tokenize_query(collection.topic_text(topic.topic_id, fields))
        run[topic.topic_id] = bm25_search(index, q, k1=k1, b=b, top=top)
    return run


def k1_grid(step=0.05, lo=0.0, hi=3.0):
    return [round(lo + i * step, 2) for i in range(int(round((hi - lo) / step)) + 1)]


def b_grid(step=0.05, lo=0.0, hi=1.0):
    return [round(lo + i * step, 2) for i in range(int(round((hi - lo) / step)) + 1)]


def grid_scan(index, collection, qrels=None, k1_values=None, b_values=None,
              top=TOP_K, fields="title+desc"):
    """MAP surface over the (k1, b) grid.

    Returns a dict with the surface cells, the best cell, and the default
    (k1=1.2, b=0.75) cell.  Ties on MAP go to the smaller (k1, b).
    """
    if qrels is None:
        qrels = collection.qrels
    k1_values = k1_grid() if k1_values is None else list(k1_values)
    b_values = b_grid() if b_values is None else list(b_values)
    queries = {t.topic_id: tokenize_query(collection.topic_text(t.topic_id, fields))
               for t in collection.topics}
    surface = []
    best = None
    default_cell = None
    for k1 in k1_values:
        for b in b_values:
            run = {tid: bm25_search(index, q, k1=k1, b=b, top=top)
                   for tid, q in queries.items()}
            cell_map = map_metric(run, qrels)
            cell = {"k1": k1, "b": b, "map": cell_map}
            surface.append(cell)
            if best is None or cell_map > best["map"]:
                best = cell
            if k1 == DEFAULT_K1 and b == DEFAULT_B:
                default_cell = cell
    return {"surface": surface, "best": best, "default": default_cell,
            "n_cells": len(surface)}
