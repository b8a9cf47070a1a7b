"""cBoW word-vector training with negative sampling.

Single-threaded SGD, linearly decaying learning rate, no frequency pruning
or subsampling.  Deterministic for a fixed seed: every random draw comes
from one numpy Generator in a fixed order.
"""

import numpy as np

from .base import (
    LR_END,
    LR_START,
    EmbeddingError,
    EmbeddingMatrix,
    build_unigram_table,
    corpus_to_arrays,
)
from .sgd_kernels import cbow_epoch


def train_cbow(corpus, d, window=5, negative=5, epochs=5, seed=0):
    """Train cBoW word vectors of dimension ``d`` on a tokenized corpus."""
    if epochs < 1:
        raise EmbeddingError(f"epochs must be >= 1, got {epochs}")
    if window < 1:
        raise EmbeddingError(f"window must be >= 1, got {window}")
    tokens, offsets, terms, counts, _ = corpus_to_arrays(corpus)
    n_vocab = len(terms)
    if n_vocab < negative + 1:
        raise EmbeddingError(
            f"vocabulary of {n_vocab} terms is too small for {negative} negatives"
        )
    if tokens.size == 0:
        raise EmbeddingError("corpus has no tokens")

    rng = np.random.default_rng(seed)
    w_in = (rng.random((n_vocab, d)) - 0.5) / d
    w_out = np.zeros((n_vocab, d))
    table = build_unigram_table(counts)

    n_pos = tokens.size
    total = float(epochs * n_pos)
    processed = 0
    for _ in range(epochs):
        win_draws = rng.integers(1, window + 1, size=n_pos)
        neg_draws = table[rng.integers(0, table.size, size=(n_pos, negative))]
        processed = cbow_epoch(
            tokens, offsets, w_in, w_out,
            win_draws.astype(np.int64), np.ascontiguousarray(neg_draws),
            LR_START, LR_END, processed, total,
        )
    return EmbeddingMatrix(terms, w_in, trained_epochs=epochs)
