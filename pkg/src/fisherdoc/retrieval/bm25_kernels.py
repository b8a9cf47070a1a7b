"""Score-accumulation inner loop of BM25, compiled with numba when enabled.

score(d) = sum over query terms of idf(t) * f / (f + k1 (1 - b + b dl/avgdl))

The per-document length normalizer is precomputed into ``norm``; the kernel
walks each query term's postings slice and accumulates."""

from ..accel import jit_kernel


@jit_kernel
def bm25_accumulate(q_starts, q_ends, q_idfs, post_docs, post_tfs, norm, scores):
    for qi in range(q_starts.shape[0]):
        idf = q_idfs[qi]
        for p in range(q_starts[qi], q_ends[qi]):
            d = post_docs[p]
            f = post_tfs[p]
            scores[d] += idf * f / (f + norm[d])
