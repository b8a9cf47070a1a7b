"""TF-IDF document vectors with a capped vocabulary.

idf uses the smoothed form ln((1+N)/(1+df)) + 1, document vectors are raw
term counts times idf, L2-normalized.  When the vocabulary exceeds
``max_features`` terms, the retained terms are the top scorers by their
tf-idf weight over the corpus (max over documents by default, sum behind a
flag), ties broken lexicographically.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)


class TfidfError(ValueError):
    pass


@dataclass
class TfidfModel:
    vocab: list
    idf: np.ndarray
    term_index: dict = field(default_factory=dict)
    rank_by: str = "max"

    def __post_init__(self):
        if not self.term_index:
            self.term_index = {t: i for i, t in enumerate(self.vocab)}

    @property
    def n_features(self):
        return len(self.vocab)


def fit_tfidf(corpus, max_features=5000, rank_by="max"):
    """Fit idf weights and select the top ``max_features`` terms.

    ``rank_by`` chooses the per-term selection score: ``"max"`` (highest
    tf-idf weight the term attains in any document) or ``"sum"`` (its total
    tf-idf mass over the corpus).
    """
    if rank_by not in ("max", "sum"):
        raise TfidfError(f"rank_by must be 'max' or 'sum', got {rank_by!r}")
    n_docs = len(corpus.docs)
    if n_docs == 0 or not corpus.vocab_counts:
        raise TfidfError("corpus has no tokens")

    terms = sorted(corpus.vocab_counts)
    index = {t: i for i, t in enumerate(terms)}
    df = np.zeros(len(terms))
    score = np.zeros(len(terms))
    for doc in corpus.docs:
        counts = {}
        for t in doc.tokens:
            counts[t] = counts.get(t, 0) + 1
        for t, c in counts.items():
            j = index[t]
            df[j] += 1
            if rank_by == "max":
                score[j] = max(score[j], c)
            else:
                score[j] += c
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    score = score * idf

    if len(terms) > max_features:
        # stable selection: score descending, term ascending
        order = sorted(range(len(terms)), key=lambda j: (-score[j], terms[j]))
        keep = sorted(order[:max_features])
        terms = [terms[j] for j in keep]
        idf = idf[keep]
    return TfidfModel(vocab=terms, idf=idf, rank_by=rank_by)


def transform_tfidf(model, tokens):
    """Sparse 1 x V tf-idf vector for one document (L2-normalized)."""
    counts = {}
    for t in tokens:
        j = model.term_index.get(t)
        if j is not None:
            counts[j] = counts.get(j, 0) + 1
    if not counts:
        if tokens:
            log.warning("document has no in-vocabulary terms; zero vector")
        return sp.csr_matrix((1, model.n_features))
    cols = sorted(counts)
    vals = np.array([counts[j] * model.idf[j] for j in cols])
    vals /= math.sqrt(float(vals @ vals))
    return sp.csr_matrix(
        (vals, (np.zeros(len(cols), dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(1, model.n_features),
    )


def transform_tfidf_corpus(model, corpus):
    """Sparse N x V tf-idf matrix, one row per corpus document."""
    indptr = [0]
    indices = []
    data = []
    n_oov = 0
    for doc in corpus.docs:
        counts = {}
        for t in doc.tokens:
            j = model.term_index.get(t)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        if not counts and doc.tokens:
            n_oov += 1
        cols = sorted(counts)
        vals = np.array([counts[j] * model.idf[j] for j in cols])
        if len(vals):
            vals /= math.sqrt(float(vals @ vals))
        indices.extend(cols)
        data.extend(vals)
        indptr.append(len(indices))
    if n_oov:
        log.warning("%d documents had no in-vocabulary terms", n_oov)
    return sp.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(len(corpus.docs), model.n_features),
    )
