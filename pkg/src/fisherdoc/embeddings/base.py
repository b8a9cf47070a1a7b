"""Shared pieces of the embedding trainers: vocabulary/array encoding of a
corpus, the 3/4-power unigram table for negative sampling, the per-example
objective used by the gradient check, and mean pooling."""

import logging

import numpy as np

log = logging.getLogger(__name__)

LR_START = 0.025
LR_END = 1e-4
UNIGRAM_TABLE_SIZE = 1_000_000


class EmbeddingError(ValueError):
    pass


class EmbeddingMatrix:
    """Vocabulary-indexed dense word vectors."""

    def __init__(self, terms, vectors, trained_epochs=0):
        self.terms = list(terms)
        self.vectors = np.asarray(vectors, dtype=np.float64)
        self.vocab = {t: i for i, t in enumerate(self.terms)}
        self.trained_epochs = trained_epochs
        if self.vectors.shape[0] != len(self.terms):
            raise EmbeddingError(
                f"{len(self.terms)} terms but {self.vectors.shape[0]} vectors"
            )

    @property
    def d(self):
        return self.vectors.shape[1]

    def __contains__(self, term):
        return term in self.vocab

    def __len__(self):
        return len(self.terms)

    def vector(self, term):
        return self.vectors[self.vocab[term]]


def corpus_to_arrays(corpus):
    """Flatten a TokenizedCorpus into kernel-ready arrays.

    Returns (tokens, doc_offsets, terms, counts, doc_ids): token ids are rows
    into the sorted term list; doc_offsets has one extra trailing entry.
    """
    terms = sorted(corpus.vocab_counts)
    index = {t: i for i, t in enumerate(terms)}
    counts = np.array([corpus.vocab_counts[t] for t in terms], dtype=np.int64)
    doc_ids = [d.id for d in corpus.docs]
    offsets = np.zeros(len(corpus.docs) + 1, dtype=np.int64)
    flat = []
    for i, doc in enumerate(corpus.docs):
        flat.extend(index[t] for t in doc.tokens)
        offsets[i + 1] = len(flat)
    return np.array(flat, dtype=np.int64), offsets, terms, counts, doc_ids


def build_unigram_table(counts, size=UNIGRAM_TABLE_SIZE):
    """word2vec-style negative-sampling table: word i occupies a share of
    slots proportional to count_i ** 0.75."""
    p = np.asarray(counts, dtype=np.float64) ** 0.75
    p /= p.sum()
    cum = np.cumsum(p)
    slots = (np.arange(size) + 0.5) / size
    return np.searchsorted(cum, slots).astype(np.int64)


def _stable_sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def ns_example_loss_and_grads(ctx_vectors, out_target, out_negs):
    """Negative-sampling loss for one training example and its exact
    gradients.

    h = mean(ctx_vectors); loss = -log s(h.t) - sum_m log s(-h.n_m).
    Returns (loss, g_ctx, g_target, g_negs).
    """
    ctx = np.atleast_2d(np.asarray(ctx_vectors, dtype=np.float64))
    t = np.asarray(out_target, dtype=np.float64)
    negs = np.atleast_2d(np.asarray(out_negs, dtype=np.float64))
    h = ctx.mean(axis=0)
    st = _stable_sigmoid(np.array([h @ t]))[0]
    sn = _stable_sigmoid(negs @ h)
    # -log s(x) = log(1 + exp(-x)), computed stably
    xt = h @ t
    xn = negs @ h
    loss = np.logaddexp(0.0, -xt) + np.logaddexp(0.0, xn).sum()
    dh = -(1.0 - st) * t + sn @ negs
    g_ctx = np.tile(dh / ctx.shape[0], (ctx.shape[0], 1))
    g_target = -(1.0 - st) * h
    g_negs = sn[:, None] * h[None, :]
    return loss, g_ctx, g_target, g_negs


def lookup_vectors(tokens, emb):
    """T' x d matrix of the in-vocabulary tokens' vectors, OOV skipped."""
    rows = [emb.vocab[t] for t in tokens if t in emb.vocab]
    if not rows:
        return np.zeros((0, emb.d))
    return emb.vectors[rows]


def mean_pool(tokens, emb):
    """Arithmetic mean of the in-vocabulary word vectors; zero vector when
    none are in vocabulary."""
    rows = [emb.vocab[t] for t in tokens if t in emb.vocab]
    if not rows:
        log.warning("document has no in-vocabulary terms; zero vector")
        return np.zeros(emb.d)
    return emb.vectors[rows].mean(axis=0)
