"""Paragraph-vector training (PV-DBOW and PV-DM) and held-out inference.

DBOW predicts each word of a document from the document vector alone (the
context window plays no part); DM predicts the center word from the mean of
the context word vectors and the document vector.  Inference for an unseen
document freezes everything but a fresh document vector and runs the same
SGD for a fixed number of passes.
"""

import logging

import numpy as np

from .base import (
    LR_END,
    LR_START,
    EmbeddingError,
    build_unigram_table,
    corpus_to_arrays,
)
from .sgd_kernels import dbow_epoch, dm_epoch

log = logging.getLogger(__name__)

DEFAULT_INFER_STEPS = 50


class PvModel:
    """Trained paragraph-vector model: per-document vectors plus the frozen
    layers needed to infer vectors for unseen documents."""

    def __init__(self, mode, doc_ids, doc_vectors, w_out, terms, counts,
                 w_in=None, window=5, negative=5, trained_epochs=0, seed=0):
        self.mode = mode
        self.doc_ids = list(doc_ids)
        self.doc_vectors = np.asarray(doc_vectors, dtype=np.float64)
        self.w_out = np.asarray(w_out, dtype=np.float64)
        self.w_in = None if w_in is None else np.asarray(w_in, dtype=np.float64)
        self.terms = list(terms)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.vocab = {t: i for i, t in enumerate(self.terms)}
        self.window = window
        self.negative = negative
        self.trained_epochs = trained_epochs
        self.seed = seed
        self._table = None
        self._doc_index = {did: i for i, did in enumerate(self.doc_ids)}

    @property
    def d(self):
        return self.doc_vectors.shape[1]

    def vector(self, doc_id):
        return self.doc_vectors[self._doc_index[doc_id]]

    def _unigram_table(self):
        if self._table is None:
            self._table = build_unigram_table(self.counts)
        return self._table

    def infer(self, tokens, steps=DEFAULT_INFER_STEPS, seed=None):
        """Infer a vector for an unseen token sequence; trained layers stay
        frozen.  Deterministic given the model and ``seed`` (defaults to the
        training seed)."""
        ids = np.array(
            [self.vocab[t] for t in tokens if t in self.vocab], dtype=np.int64
        )
        if ids.size == 0:
            if tokens:
                log.warning("inference document has no in-vocabulary terms")
            return np.zeros(self.d)
        rng = np.random.default_rng(self.seed if seed is None else seed)
        doc_vec = (rng.random((1, self.d)) - 0.5) / self.d
        offsets = np.array([0, ids.size], dtype=np.int64)
        table = self._unigram_table()
        total = float(steps * ids.size)
        processed = 0
        for _ in range(steps):
            neg = table[rng.integers(0, table.size, size=(ids.size, self.negative))]
            if self.mode == "DBOW":
                processed = dbow_epoch(
                    ids, offsets, doc_vec, self.w_out, np.ascontiguousarray(neg),
                    LR_START, LR_END, processed, total, False,
                )
            else:
                win = rng.integers(1, self.window + 1, size=ids.size).astype(np.int64)
                processed = dm_epoch(
                    ids, offsets, self.w_in, doc_vec, self.w_out,
                    win, np.ascontiguousarray(neg),
                    LR_START, LR_END, processed, total, False, False,
                )
        return doc_vec[0].copy()


def train_pv(corpus, mode, d, window=5, negative=5, epochs=5, seed=0):
    """Train paragraph vectors; ``mode`` is "DBOW" or "DM"."""
    if mode not in ("DBOW", "DM"):
        raise EmbeddingError(f"mode must be 'DBOW' or 'DM', got {mode!r}")
    if epochs < 1:
        raise EmbeddingError(f"epochs must be >= 1, got {epochs}")
    tokens, offsets, terms, counts, doc_ids = corpus_to_arrays(corpus)
    n_vocab = len(terms)
    if n_vocab < negative + 1:
        raise EmbeddingError(
            f"vocabulary of {n_vocab} terms is too small for {negative} negatives"
        )
    if tokens.size == 0:
        raise EmbeddingError("corpus has no tokens")

    rng = np.random.default_rng(seed)
    n_docs = len(doc_ids)
    doc_vecs = (rng.random((n_docs, d)) - 0.5) / d
    w_out = np.zeros((n_vocab, d))
    w_in = (rng.random((n_vocab, d)) - 0.5) / d if mode == "DM" else None
    table = build_unigram_table(counts)

    n_pos = tokens.size
    total = float(epochs * n_pos)
    processed = 0
    for _ in range(epochs):
        neg_draws = table[rng.integers(0, table.size, size=(n_pos, negative))]
        neg_draws = np.ascontiguousarray(neg_draws)
        if mode == "DBOW":
            processed = dbow_epoch(
                tokens, offsets, doc_vecs, w_out, neg_draws,
                LR_START, LR_END, processed, total, True,
            )
        else:
            win_draws = rng.integers(1, window + 1, size=n_pos).astype(np.int64)
            processed = dm_epoch(
                tokens, offsets, w_in, doc_vecs, w_out, win_draws, neg_draws,
                LR_START, LR_END, processed, total, True, True,
            )
    return PvModel(
        mode=mode, doc_ids=doc_ids, doc_vectors=doc_vecs, w_out=w_out,
        terms=terms, counts=counts, w_in=w_in, window=window,
        negative=negative, trained_epochs=epochs, seed=seed,
    )
