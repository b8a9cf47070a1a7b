"""Latent semantic indexing: truncated SVD of the tf-idf matrix.

The contract is the tolerance, not the algorithm: projection columns must be
orthonormal to 1e-6 and span the dominant singular subspace.  Small problems
use a dense SVD, larger ones Lanczos (scipy svds).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg

from .tfidf import fit_tfidf, transform_tfidf, transform_tfidf_corpus

_DENSE_CUTOFF = 400


class LsiError(ValueError):
    pass


@dataclass
class LsiModel:
    projection: np.ndarray  # V x d, orthonormal columns
    singular_values: np.ndarray  # length d, non-increasing
    tfidf: object

    @property
    def d(self):
        return self.projection.shape[1]


def truncated_svd(X, d):
    """Top-d singular triplets of a (sparse) matrix, singular values
    descending.  Returns (U, s, Vt)."""
    n, m = X.shape
    if d > min(n, m):
        raise LsiError(f"d={d} exceeds min(shape)={min(n, m)}")
    if min(n, m) <= _DENSE_CUTOFF or d >= min(n, m):
        dense = X.toarray() if sp.issparse(X) else np.asarray(X)
        U, s, Vt = np.linalg.svd(dense, full_matrices=False)
        return U[:, :d], s[:d], Vt[:d]
    U, s, Vt = scipy.sparse.linalg.svds(X, k=d, random_state=0)
    order = np.argsort(s)[::-1]
    return U[:, order], s[order], Vt[order]


def fit_lsi(corpus, d, max_features=5000):
    """Fit LSI of dimension ``d`` on the corpus tf-idf matrix."""
    tfidf = fit_tfidf(corpus, max_features=max_features)
    X = transform_tfidf_corpus(tfidf, corpus)
    n, v = X.shape
    if d > min(max_features, n):
        raise LsiError(f"d={d} exceeds min(max_features, n_docs)={min(max_features, n)}")
    if d > min(n, v):
        raise LsiError(f"d={d} exceeds achievable rank {min(n, v)}")
    U, s, Vt = truncated_svd(X, d)
    tol = max(n, v) * np.finfo(float).eps * (s[0] if len(s) else 0.0)
    rank = int(np.sum(s > tol))
    if rank < d:
        raise LsiError(f"requested d={d} but matrix rank is only {rank}")
    return LsiModel(projection=Vt.T.copy(), singular_values=s, tfidf=tfidf)


def transform_lsi(model, tokens):
    """Dense d-dim document vector: tf-idf row times the projection."""
    row = transform_tfidf(model.tfidf, tokens)
    return np.asarray(row @ model.projection).ravel()


def transform_lsi_corpus(model, corpus):
    X = transform_tfidf_corpus(model.tfidf, corpus)
    return np.asarray(X @ model.projection)
