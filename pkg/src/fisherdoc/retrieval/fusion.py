"""Min-max score fusion of BM25 with embedding cosine similarity.

fused(d) = lambda * norm_bm25(d) + (1 - lambda) * norm_cos(d), both score
lists min-max normalized within the topic's BM25 top-1000 pool; documents
outside the pool never enter the fused ranking."""

import logging

import numpy as np

log = logging.getLogger(__name__)


def minmax_normalize(scores):
    """Rescale onto [0, 1]; constant lists map to zeros (warned when len > 1)."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        return scores
    lo, hi = scores.min(), scores.max()
    if hi == lo:
        if scores.size > 1:
            log.warning("constant score list; min-max maps all to 0")
        return np.zeros_like(scores)
    return (scores - lo) / (hi - lo)


def cosine_scores(pool_ids, doc_vectors, query_vector):
    """(scores, n_missing): cosine of each pool doc with the query.

    ``doc_vectors`` maps doc id -> vector; missing or zero vectors score 0.
    """
    q = np.asarray(query_vector, dtype=np.float64)
    qn = np.linalg.norm(q)
    out = np.zeros(len(pool_ids))
    missing = 0
    if qn == 0:
        log.warning("zero query vector; all cosines 0")
        return out, 0
    for i, doc in enumerate(pool_ids):
        v = doc_vectors.get(doc)
        if v is None:
            missing += 1
            continue
        vn = np.linalg.norm(v)
        if vn == 0:
            continue
        out[i] = float(q @ v / (qn * vn))
    if missing:
        log.warning("%d of %d pool docs had no vector; cosine 0", missing, len(pool_ids))
    return out, missing


def fuse(bm25_ranked, doc_vectors, query_vector, lam=0.5):
    """Re-rank one topic's BM25 pool by the fused score.

    Returns (ranked list of (doc_id, fused_score), n_missing_vectors).
    Ties break by doc id ascending, matching the BM25 convention.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    if not bm25_ranked:
        return [], 0
    pool_ids = [doc for doc, _ in bm25_ranked]
    bscores = np.array([s for _, s in bm25_ranked])
    cscores, missing = cosine_scores(pool_ids, doc_vectors, query_vector)
    fused = lam * minmax_normalize(bscores) + (1.0 - lam) * minmax_normalize(cscores)
    # lexsort: primary -fused, secondary docno order (pool is bm25-ordered,
    # which itself tie-breaks by doc id, so sort pool positions by doc id)
    id_rank = np.argsort(np.argsort(pool_ids, kind="stable"), kind="stable")
    order = np.lexsort((id_rank, -fused))
    ranked = [(pool_ids[i], float(fused[i])) for i in order]
    return ranked, missing


def fuse_run(bm25_run, doc_vectors, query_vectors, lam=0.5):
    """Fuse every topic of a run; returns (fused run, stats)."""
    fused = {}
    total_missing = 0
    for tid, ranked in bm25_run.items():
        qv = query_vectors[tid]
        fused[tid], missing = fuse(ranked, doc_vectors, qv, lam=lam)
        total_missing += missing
    return fused, {"missing_vectors": total_missing, "lambda": lam}
