"""Mixture-family dispatch: responsibilities, serialization, and the
point-cloud builder that feeds embeddings into the fitters."""

import numpy as np

from ..container import KIND_GMM, KIND_VMF, read_container, write_container
from .gmm import GaussianMixture, MixtureError, gmm_log_responsibilities
from .vmf import VmfMixture, unit_rows, vmf_log_responsibilities


def responsibilities(model, x):
    """Soft-assignment vector gamma(.) of a single point, log-space safe.

    VMF inputs are projected to the sphere first, so gamma(x) == gamma(c x)
    for any c > 0.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise MixtureError("x must be a single d-vector")
    return responsibilities_batch(model, x[None, :])[0]


def responsibilities_batch(model, X):
    """N x K responsibility matrix for many points at once."""
    if isinstance(model, GaussianMixture):
        log_gamma, _ = gmm_log_responsibilities(model, X)
    elif isinstance(model, VmfMixture):
        log_gamma, _ = vmf_log_responsibilities(model, unit_rows(X, drop_zero=False))
    else:
        raise MixtureError(f"unknown mixture type {type(model).__name__}")
    return np.exp(log_gamma)


def mixture_fitting_set(emb, vocab_counts=None, mode="unique"):
    """(X, weights) to fit a mixture on an embedding's vocabulary.

    ``unique`` uses each term's vector once (weights None); ``weighted``
    attaches token frequencies from ``vocab_counts`` as point weights.
    """
    X = np.asarray(emb.vectors, dtype=np.float64)
    if mode == "unique":
        return X, None
    if mode == "weighted":
        if vocab_counts is None:
            raise MixtureError("weighted mode needs vocab_counts")
        w = np.array([float(vocab_counts[t]) for t in emb.terms])
        if (w <= 0).any():
            raise MixtureError("every term needs a positive count")
        return X, w
    raise MixtureError(f"mode must be 'unique' or 'weighted', got {mode!r}")


def save_mixture(model, path):
    if isinstance(model, GaussianMixture):
        write_container(path, KIND_GMM, {
            "weights": model.weights,
            "means": model.means,
            "variances": model.variances,
            "ll_trace": np.asarray(model.ll_trace, dtype=np.float64),
        }, {"log_likelihood": model.log_likelihood})
    elif isinstance(model, VmfMixture):
        write_container(path, KIND_VMF, {
            "weights": model.weights,
            "mean_directions": model.mean_directions,
            "kappas": model.kappas,
            "ll_trace": np.asarray(model.ll_trace, dtype=np.float64),
        }, {"log_likelihood": model.log_likelihood})
    else:
        raise MixtureError(f"unknown mixture type {type(model).__name__}")


def load_mixture(path):
    kind, meta, arrays = read_container(path)
    if kind == KIND_GMM:
        model = GaussianMixture(arrays["weights"], arrays["means"], arrays["variances"])
    elif kind == KIND_VMF:
        model = VmfMixture(arrays["weights"], arrays["mean_directions"], arrays["kappas"])
    else:
        raise MixtureError(f"not a mixture container (kind=0x{kind:02x})")
    model.log_likelihood = float(meta["log_likelihood"])
    model.ll_trace = list(arrays["ll_trace"])
    return model.validate()
