"""Latent Dirichlet Allocation via collapsed Gibbs sampling.

Priors default to alpha = 1/K and beta = 0.01.  ``chunk_size`` is accepted
for configuration compatibility with online variational trainers but has no
effect on the collapsed sampler.  Inference for a document folds it in
against the frozen topic-word distribution and averages the doc-topic
posterior over the post-burn-in sweeps.
"""

import logging

import numpy as np
from scipy.special import gammaln

from ..embeddings.base import corpus_to_arrays
from .gibbs_kernels import gibbs_infer_sweeps, gibbs_init, gibbs_sweep

log = logging.getLogger(__name__)

MIN_PASSES, MAX_PASSES = 20, 100


class LdaError(ValueError):
    pass


def joint_log_likelihood(n_dk, n_kt, n_k, doc_lengths, alpha, beta):
    """log p(w, z) of the collapsed state (Dirichlet-multinomial form).

    Runs once per pass over the count tables, so it stays vectorized scipy
    rather than a jit kernel; CPython's math.lgamma and libm's disagree in
    the last ulp, which would make the trace depend on the backend.
    """
    n_docs, k_topics = n_dk.shape
    n_vocab = n_kt.shape[1]
    ll = k_topics * (gammaln(n_vocab * beta) - n_vocab * gammaln(beta))
    ll += (gammaln(n_kt + beta) - gammaln(beta)).sum()
    ll -= (gammaln(n_k + n_vocab * beta) - gammaln(n_vocab * beta)).sum()
    ll += n_docs * (gammaln(k_topics * alpha) - k_topics * gammaln(alpha))
    ll += (gammaln(n_dk + alpha) - gammaln(alpha)).sum()
    ll -= (gammaln(doc_lengths + k_topics * alpha) - gammaln(k_topics * alpha)).sum()
    return float(ll)


class LdaModel:
    def __init__(self, topic_word, terms, alpha, beta, ll_trace, seed, passes):
        self.topic_word = np.asarray(topic_word, dtype=np.float64)
        self.terms = list(terms)
        self.vocab = {t: i for i, t in enumerate(self.terms)}
        self.alpha = alpha
        self.beta = beta
        self.ll_trace = np.asarray(ll_trace, dtype=np.float64)
        self.seed = seed
        self.passes = passes

    @property
    def n_topics(self):
        return self.topic_word.shape[0]


def fit_lda(corpus, d, chunk_size=1000, passes=20, alpha=None, beta=0.01, seed=0):
    """Fit a ``d``-topic LDA model with ``passes`` Gibbs sweeps over the
    corpus; returns an LdaModel carrying the per-sweep joint log-likelihood
    trace."""
    if d < 2:
        raise LdaError(f"need at least 2 topics, got {d}")
    if not MIN_PASSES <= passes <= MAX_PASSES:
        raise LdaError(f"passes must lie in [{MIN_PASSES}, {MAX_PASSES}], got {passes}")
    del chunk_size  # online-VB knob; the collapsed sampler sweeps full passes
    if alpha is None:
        alpha = 1.0 / d
    tokens, offsets, terms, _, _ = corpus_to_arrays(corpus)
    if tokens.size == 0:
        raise LdaError("corpus has no tokens")
    n_docs = len(corpus.docs)
    n_vocab = len(terms)
    doc_of_token = np.repeat(
        np.arange(n_docs, dtype=np.int64), np.diff(offsets)
    )
    doc_lengths = np.diff(offsets).astype(np.float64)

    rng = np.random.default_rng(seed)
    z = np.empty(tokens.size, dtype=np.int64)
    n_dk = np.zeros((n_docs, d), dtype=np.float64)
    n_kt = np.zeros((d, n_vocab), dtype=np.float64)
    n_k = np.zeros(d, dtype=np.float64)
    gibbs_init(tokens, doc_of_token, z, n_dk, n_kt, n_k, rng.random(tokens.size))

    trace = np.empty(passes)
    for sweep in range(passes):
        gibbs_sweep(
            tokens, doc_of_token, z, n_dk, n_kt, n_k, alpha, beta,
            rng.random(tokens.size),
        )
        trace[sweep] = joint_log_likelihood(n_dk, n_kt, n_k, doc_lengths, alpha, beta)

    topic_word = (n_kt + beta) / (n_k[:, None] + n_vocab * beta)
    return LdaModel(
        topic_word=topic_word, terms=terms, alpha=alpha, beta=beta,
        ll_trace=trace, seed=seed, passes=passes,
    )


def infer_lda(model, tokens, sweeps=50, seed=None):
    """Topic proportions for one document (a point on the K-simplex)."""
    k = model.n_topics
    ids = np.array([model.vocab[t] for t in tokens if t in model.vocab], dtype=np.int64)
    if ids.size == 0:
        if tokens:
            log.warning("document has no in-vocabulary terms; uniform topic vector")
        else:
            log.warning("empty document; uniform topic vector")
        return np.full(k, 1.0 / k)
    rng = np.random.default_rng(model.seed if seed is None else seed)
    uniforms = rng.random((sweeps, ids.size))
    theta = np.zeros(k)
    n_kept = gibbs_infer_sweeps(
        ids, model.topic_word, model.alpha, uniforms, theta, n_burnin=sweeps // 2
    )
    theta /= n_kept
    return theta / theta.sum()


def infer_lda_corpus(model, corpus, sweeps=50, seed=None):
    return np.vstack([infer_lda(model, doc.tokens, sweeps, seed) for doc in corpus.docs])
