"""Mixture of von Mises-Fisher distributions fit by EM on the unit sphere.

Concentrations come from the Banerjee closed-form approximation
kappa = (r_bar d - r_bar^3) / (1 - r_bar^2); an optional Newton refinement of
the Bessel-ratio equation A_d(kappa) = r_bar sits behind a flag."""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ..kmeans import kmeans_single
from .bessel import log_vmf_normalizer
from .gmm import EM_MAX_ITER, EM_REL_TOL, WEIGHT_FLOOR, MixtureError

log = logging.getLogger(__name__)

KAPPA_FLOOR = 1e-6
KAPPA_CAP = 1e5


def estimate_kappa(r_bar, d, newton_refine=False):
    """Concentration from the mean resultant length r_bar in d dimensions."""
    if r_bar < 0:
        raise MixtureError(f"r_bar must be non-negative, got {r_bar}")
    if r_bar >= 1.0:
        log.warning("r_bar=%g >= 1; kappa clamped to cap %g", r_bar, KAPPA_CAP)
        return KAPPA_CAP
    kappa = (r_bar * d - r_bar ** 3) / (1.0 - r_bar ** 2)
    kappa = min(max(kappa, KAPPA_FLOOR), KAPPA_CAP)
    if newton_refine:
        kappa = _newton_refine(kappa, r_bar, d)
    return kappa


def _bessel_ratio(kappa, d):
    # A_d(kappa) = I_{d/2}(kappa) / I_{d/2-1}(kappa) via continued fraction
    from .bessel import log_bessel_i

    return float(np.exp(log_bessel_i(d / 2.0, kappa) - log_bessel_i(d / 2.0 - 1.0, kappa)))


def _newton_refine(kappa, r_bar, d, steps=2):
    # A'_d(k) = 1 - A^2 - (d-1)/k * A
    for _ in range(steps):
        a = _bessel_ratio(kappa, d)
        da = 1.0 - a * a - (d - 1.0) / kappa * a
        if da == 0.0:
            break
        kappa = kappa - (a - r_bar) / da
        kappa = min(max(kappa, KAPPA_FLOOR), KAPPA_CAP)
    return kappa


@dataclass
class VmfMixture:
    weights: np.ndarray
    mean_directions: np.ndarray
    kappas: np.ndarray
    log_likelihood: float = float("nan")
    ll_trace: list = field(default_factory=list)

    @property
    def K(self):
        return self.mean_directions.shape[0]

    @property
    def d(self):
        return self.mean_directions.shape[1]

    def validate(self):
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise MixtureError("weights do not sum to 1")
        norms = np.linalg.norm(self.mean_directions, axis=1)
        if np.abs(norms - 1.0).max() > 1e-9:
            raise MixtureError("mean directions not unit norm")
        if (self.kappas <= 0).any() or (self.kappas > KAPPA_CAP).any():
            raise MixtureError("kappa outside (0, cap]")
        return self


def unit_rows(X, drop_zero=True):
    """L2-normalize rows; zero rows are dropped (or rejected)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    norms = np.linalg.norm(X, axis=1)
    nz = norms > 0
    if not nz.all():
        if not drop_zero:
            raise MixtureError("zero vector cannot be normalized")
        log.warning("%d zero vectors excluded from sphere projection", int((~nz).sum()))
        X, norms = X[nz], norms[nz]
    return X / norms[:, None]


def vmf_log_densities(vmf, X):
    """N x K matrix of log(omega_i) + log C_d(kappa_i) + kappa_i mu_i . x_t."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    d = X.shape[1]
    log_c = np.array([log_vmf_normalizer(d, k) for k in vmf.kappas])
    dots = X @ (vmf.mean_directions * vmf.kappas[:, None]).T
    return np.log(vmf.weights)[None, :] + log_c[None, :] + dots


def vmf_log_responsibilities(vmf, X):
    lj = vmf_log_densities(vmf, X)
    norm = logsumexp(lj, axis=1)
    return lj - norm[:, None], norm


def _init_spherical(X, K, rng):
    centers, labels, _, _ = kmeans_single(X, K, rng, spherical=True)
    n, d = X.shape
    weights = np.empty(K)
    mu = np.empty((K, d))
    kappas = np.empty(K)
    for j in range(K):
        mask = labels == j
        weights[j] = max(mask.sum() / n, WEIGHT_FLOOR)
        r = X[mask].sum(axis=0) if mask.any() else X[rng.integers(n)]
        norm = np.linalg.norm(r)
        mu[j] = r / norm if norm > 0 else _random_unit(d, rng)
        r_bar = norm / max(mask.sum(), 1) if mask.any() else 0.0
        kappas[j] = estimate_kappa(min(r_bar, 1.0 - 1e-12), d)
    weights /= weights.sum()
    return VmfMixture(weights, mu, kappas)


def _random_unit(d, rng):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _guarded_kappa(k_new, k_old, nk_i, r_norm_i, d):
    """Backtrack an approximate kappa update that would lower the EM bound.

    Given responsibilities, the component's expected complete log-likelihood
    in kappa is Q(k) = nk log C_d(k) + k ||r||.  The closed-form estimator is
    not the exact argmax, so accept it only if Q does not drop; otherwise
    bisect toward the previous kappa (which leaves the bound unchanged).
    """
    def q(k):
        return nk_i * log_vmf_normalizer(d, k) + k * r_norm_i

    q_old = q(k_old)
    for _ in range(8):
        if q(k_new) >= q_old:
            return k_new
        k_new = 0.5 * (k_new + k_old)
    return k_old


def _reseed_component(vmf, X, j, rng):
    vmf.mean_directions[j] = X[rng.integers(X.shape[0])]
    vmf.kappas[j] = 1.0
    vmf.weights[j] = 1.0 / vmf.K
    vmf.weights /= vmf.weights.sum()


def _em_vmf(X, K, rng, weights=None, newton_refine=False):
    n, d = X.shape
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    n_eff = w.sum()
    vmf = _init_spherical(X, K, rng)
    trace = []
    prev_ll = -np.inf
    reseeded = set()
    for _ in range(EM_MAX_ITER):
        log_gamma, log_px = vmf_log_responsibilities(vmf, X)
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
                _reseed_component(vmf, X, j, rng)
            # reseeding is not an EM step; restart the recorded trace
            trace.clear()
            prev_ll = -np.inf
            continue
        if prev_ll > -np.inf and ll - prev_ll < EM_REL_TOL * abs(prev_ll):
            break
        r = gamma.T @ X
        r_norm = np.linalg.norm(r, axis=1)
        new_mu = np.where(r_norm[:, None] > 0, r / np.maximum(r_norm, 1e-300)[:, None],
                          vmf.mean_directions)
        r_bar = np.minimum(r_norm / nk, 1.0 - 1e-12)
        new_kappa = np.array([
            _guarded_kappa(estimate_kappa(rb, d, newton_refine=newton_refine),
                           k_old, nk_i, rn_i, d)
            for rb, k_old, nk_i, rn_i in zip(r_bar, vmf.kappas, nk, r_norm)
        ])
        vmf.weights = nk / n_eff
        vmf.mean_directions = new_mu
        vmf.kappas = new_kappa
        prev_ll = ll
    if not trace:  # reseed on the last allowed iteration
        _, log_px = vmf_log_responsibilities(vmf, X)
        trace.append(float(log_px @ w))
    vmf.log_likelihood = trace[-1]
    vmf.ll_trace = trace
    return vmf


def fit_movmf(X, K=15, n_init=10, seed=0, weights=None, newton_refine=False):
    """Best-of-n_init EM fit of a K-component VMF mixture.

    Rows are L2-normalized internally; zero rows are dropped.  All-identical
    inputs short-circuit to a capped-concentration mixture with a warning.
    """
    X = unit_rows(X)
    if X.shape[0] <= K:
        raise MixtureError(f"need more than K={K} points, got {X.shape[0]}")
    if (X == X[0]).all():
        log.warning("all points identical; kappa capped at %g", KAPPA_CAP)
        mu = np.tile(X[0], (K, 1))
        vmf = VmfMixture(np.full(K, 1.0 / K), mu, np.full(K, KAPPA_CAP))
        _, log_px = vmf_log_responsibilities(vmf, X)
        vmf.log_likelihood = float(log_px.sum())
        vmf.ll_trace = [vmf.log_likelihood]
        return vmf.validate()
    best = None
    for i in range(n_init):
        rng = np.random.default_rng(seed + i)
        try:
            cand = _em_vmf(X, K, rng, weights=weights, newton_refine=newton_refine)
        except MixtureError:
            if i == n_init - 1 and best is None:
                raise
            continue
        if best is None or cand.log_likelihood > best.log_likelihood:
            best = cand
    if best is None:
        raise MixtureError("all restarts degenerate")
    return best.validate()
