"""Fisher-vector aggregation of a document's word vectors under a fitted
mixture.

Gaussian family, per component i:

    G_i = (1 / sqrt(omega_i)) sum_t gamma_t(i) (x_t - mu_i) / sigma_i

VMF family, per component i (inputs projected to the unit sphere):

    G_i = sum_t gamma_t(i) x_t d / (omega_i kappa_i)

The output concatenates the K per-component d-blocks.  Power (signed square
root) and L2 normalization are applied after aggregation when requested;
the default applies L2 only."""

import logging
from dataclasses import dataclass

import numpy as np

from .container import KIND_FV_BATCH, read_container, write_container
from .embeddings import lookup_vectors
from .mixtures import (
    GaussianMixture,
    VmfMixture,
    gmm_log_responsibilities,
    unit_rows,
    vmf_log_responsibilities,
)

log = logging.getLogger(__name__)


class FisherError(ValueError):
    pass


@dataclass
class FisherVector:
    values: np.ndarray
    family: str
    normalized: tuple

    def __len__(self):
        return self.values.shape[0]


def _finish(raw, family, power, l2):
    applied = []
    v = raw
    if power:
        v = np.sign(v) * np.sqrt(np.abs(v))
        applied.append("power")
    if l2:
        norm = np.linalg.norm(v)
        if norm > 0:
            v = v / norm
        applied.append("l2")
    if not np.all(np.isfinite(v)):
        raise FisherError("non-finite Fisher vector")
    return FisherVector(values=v, family=family, normalized=tuple(applied))


def _fv_gmm_raw(X, gmm):
    log_gamma, _ = gmm_log_responsibilities(gmm, X)
    gamma = np.exp(log_gamma)
    nk = gamma.sum(axis=0)
    sigma = np.sqrt(gmm.variances)
    blocks = (gamma.T @ X - nk[:, None] * gmm.means) / sigma
    blocks /= np.sqrt(gmm.weights)[:, None]
    return blocks.ravel()


def _fv_movmf_raw(X, vmf):
    U = unit_rows(X)
    if U.shape[0] == 0:
        raise FisherError("empty document")
    log_gamma, _ = vmf_log_responsibilities(vmf, U)
    gamma = np.exp(log_gamma)
    d = U.shape[1]
    blocks = (gamma.T @ U) * (d / (vmf.weights * vmf.kappas))[:, None]
    return blocks.ravel()


def _check_input(X, model):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[0] == 0:
        raise FisherError("empty document")
    if X.shape[1] != model.d:
        raise FisherError(f"vectors are {X.shape[1]}-dim, model expects {model.d}")
    return X


def fv_gmm(X, gmm, power=False, l2=True):
    """Fisher vector of the T x d point set X under a Gaussian mixture."""
    X = _check_input(X, gmm)
    return _finish(_fv_gmm_raw(X, gmm), "GMM", power, l2)


def fv_movmf(X, vmf, power=False, l2=True):
    """Fisher vector of X under a VMF mixture; rows are L2-normalized first."""
    X = _check_input(X, vmf)
    return _finish(_fv_movmf_raw(X, vmf), "VMF", power, l2)


def fv(X, model, power=False, l2=True):
    """Family dispatch on the mixture type."""
    if isinstance(model, GaussianMixture):
        return fv_gmm(X, model, power=power, l2=l2)
    if isinstance(model, VmfMixture):
        return fv_movmf(X, model, power=power, l2=l2)
    raise FisherError(f"unknown mixture type {type(model).__name__}")


def fv_corpus(corpus, emb, model, power=False, l2=True):
    """Fisher vectors for every document of a tokenized corpus.

    OOV tokens are skipped; documents with no in-vocabulary tokens get a zero
    row and are flagged rather than erroring.  Returns (doc_ids, N x K*d
    matrix, flagged_ids).
    """
    n = len(corpus.docs)
    out = np.zeros((n, model.K * model.d))
    flagged = []
    doc_ids = []
    for row, doc in enumerate(corpus.docs):
        doc_ids.append(doc.id)
        X = lookup_vectors(doc.tokens, emb)
        if X.shape[0] == 0:
            flagged.append(doc.id)
            continue
        try:
            out[row] = fv(X, model, power=power, l2=l2).values
        except FisherError as e:
            if "empty document" not in str(e):
                raise
            flagged.append(doc.id)  # e.g. all word vectors were zero
    if flagged:
        log.warning("%d documents had no usable word vectors; zero rows", len(flagged))
    return doc_ids, out, flagged


def save_fv_batch(path, doc_ids, matrix, family, normalized, flagged=()):
    write_container(path, KIND_FV_BATCH, {"vectors": np.asarray(matrix, dtype=np.float64)}, {
        "doc_ids": list(doc_ids),
        "family": family,
        "normalized": list(normalized),
        "flagged": list(flagged),
    })


def load_fv_batch(path):
    _, meta, arrays = read_container(path, expect_kind=KIND_FV_BATCH)
    return meta["doc_ids"], arrays["vectors"], meta
