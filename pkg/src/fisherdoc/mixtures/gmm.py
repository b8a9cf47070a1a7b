"""Diagonal-covariance Gaussian mixture fit by EM.

Initialization runs k-means (k-means++ seeding plus Lloyd) and converts the
hard clustering into starting weights/means/variances.  The best of n_init
restarts by final log-likelihood wins."""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ..kmeans import kmeans_single

log = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-6
WEIGHT_FLOOR = 1e-8
EM_REL_TOL = 1e-4
EM_MAX_ITER = 200


class MixtureError(ValueError):
    pass


@dataclass
class GaussianMixture:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_likelihood: float = float("nan")
    ll_trace: list = field(default_factory=list)

    @property
    def K(self):
        return self.means.shape[0]

    @property
    def d(self):
        return self.means.shape[1]

    def validate(self):
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise MixtureError("weights do not sum to 1")
        if (self.variances < VARIANCE_FLOOR * (1 - 1e-12)).any():
            raise MixtureError("variance below floor")
        return self


def gmm_log_densities(gmm, X):
    """N x K matrix of log(omega_i) + log N(x_t; mu_i, diag sigma_i^2)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    d = X.shape[1]
    inv_var = 1.0 / gmm.variances
    # (x - mu)^2 / var expanded for all pairs without a K-loop
    x2 = (X ** 2) @ inv_var.T
    xm = X @ (gmm.means * inv_var).T
    m2 = np.einsum("kj,kj->k", gmm.means ** 2, inv_var)
    mahal = x2 - 2.0 * xm + m2[None, :]
    log_norm = -0.5 * (d * np.log(2.0 * np.pi) + np.log(gmm.variances).sum(axis=1))
    return np.log(gmm.weights)[None, :] + log_norm[None, :] - 0.5 * mahal


def gmm_log_responsibilities(gmm, X):
    """(log gamma matrix N x K, per-point log density vector)."""
    lj = gmm_log_densities(gmm, X)
    norm = logsumexp(lj, axis=1)
    return lj - norm[:, None], norm


def _init_from_kmeans(X, K, rng):
    _, labels, _, _ = kmeans_single(X, K, rng)
    n, d = X.shape
    weights = np.empty(K)
    means = np.empty((K, d))
    variances = np.empty((K, d))
    global_var = np.maximum(X.var(axis=0), VARIANCE_FLOOR)
    for j in range(K):
        mask = labels == j
        weights[j] = mask.sum() / n
        if not mask.any():
            means[j] = X[rng.integers(n)]
            variances[j] = global_var
            continue
        means[j] = X[mask].mean(axis=0)
        variances[j] = np.maximum(X[mask].var(axis=0), VARIANCE_FLOOR)
    weights = np.maximum(weights, WEIGHT_FLOOR)
    weights /= weights.sum()
    return GaussianMixture(weights, means, variances)


def _reseed_component(gmm, X, j, rng):
    # drop the degenerate component onto a random point with global spread
    gmm.means[j] = X[rng.integers(X.shape[0])]
    gmm.variances[j] = np.maximum(X.var(axis=0), VARIANCE_FLOOR)
    gmm.weights[j] = 1.0 / gmm.K
    gmm.weights /= gmm.weights.sum()


def _em_gmm(X, K, rng, weights=None):
    n = X.shape[0]
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    n_eff = w.sum()
    gmm = _init_from_kmeans(X, K, rng)
    trace = []
    prev_ll = -np.inf
    reseeded = set()
    for _ in range(EM_MAX_ITER):
        log_gamma, log_px = gmm_log_responsibilities(gmm, X)
        ll = float(log_px @ w)
        trace.append(ll)
        gamma = np.exp(log_gamma) * w[:, None]
        nk = gamma.sum(axis=0)
        low = np.flatnonzero(nk / n_eff < WEIGHT_FLOOR)
        if low.size:
            for j in low:
                if j in reseeded:
                    raise MixtureError(f"component {j} degenerate after reseed")
                reseeded.add(j)
                _reseed_component(gmm, X, j, rng)
            # reseeding is not an EM step; restart the recorded trace
            trace.clear()
            prev_ll = -np.inf
            continue
        if prev_ll > -np.inf and ll - prev_ll < EM_REL_TOL * abs(prev_ll):
            break
        gmm.weights = nk / n_eff
        gmm.means = (gamma.T @ X) / nk[:, None]
        ex2 = (gamma.T @ (X ** 2)) / nk[:, None]
        gmm.variances = np.maximum(ex2 - gmm.means ** 2, VARIANCE_FLOOR)
        prev_ll = ll
    if not trace:  # reseed on the last allowed iteration
        _, log_px = gmm_log_responsibilities(gmm, X)
        trace.append(float(log_px @ w))
    gmm.log_likelihood = trace[-1]
    gmm.ll_trace = trace
    return gmm


def fit_gmm(X, K=15, n_init=10, seed=0, weights=None):
    """Best-of-n_init EM fit of a K-component diagonal GMM.

    ``weights`` optionally weights each point (token-frequency mode); the
    default unweighted call treats every row once.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise MixtureError("X must be N x d")
    if X.shape[0] <= K:
        raise MixtureError(f"need more than K={K} points, got {X.shape[0]}")
    best = None
    for i in range(n_init):
        rng = np.random.default_rng(seed + i)
        try:
            cand = _em_gmm(X, K, rng, weights=weights)
        except MixtureError:
            if i == n_init - 1 and best is None:
                raise
            continue
        if best is None or cand.log_likelihood > best.log_likelihood:
            best = cand
    if best is None:
        raise MixtureError("all restarts degenerate")
    return best.validate()
