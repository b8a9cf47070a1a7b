"""k-means primitives shared by mixture initialization and the clustering
evaluation: k-means++ seeding and Lloyd iterations, in Euclidean or
spherical (cosine) geometry.

Spherical mode expects unit-norm rows and renormalizes centroids after every
update; squared Euclidean distance on the sphere is monotone in cosine
distance, so the same seeding code serves both."""

import numpy as np


class KmeansError(ValueError):
    pass


def _sq_dists(X, c):
    diff = X - c
    return np.einsum("ij,ij->i", diff, diff)


def kmeans_pp_indices(X, k, rng):
    """Indices of k seed rows chosen by the k-means++ D² scheme."""
    n = X.shape[0]
    if k > n:
        raise KmeansError(f"k={k} exceeds {n} points")
    idx = np.empty(k, dtype=np.int64)
    idx[0] = rng.integers(n)
    d2 = _sq_dists(X, X[idx[0]])
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            # remaining points coincide with chosen seeds; fill uniformly
            idx[j:] = rng.integers(n, size=k - j)
            return idx
        probs = d2 / total
        idx[j] = rng.choice(n, p=probs)
        d2 = np.minimum(d2, _sq_dists(X, X[idx[j]]))
    return idx


def _assign(X, centers):
    # ||x-c||^2 = ||x||^2 - 2 x.c + ||c||^2; the x term is constant per row
    cross = X @ centers.T
    c2 = np.einsum("ij,ij->i", centers, centers)
    labels = np.argmin(c2[None, :] - 2.0 * cross, axis=1)
    return labels


def lloyd(X, centers, tol=1e-6, max_iter=300, spherical=False):
    """Lloyd iterations from the given centers.

    Returns (centers, labels, inertia, n_iter).  Empty clusters are re-seeded
    to the point farthest from its current centroid.
    """
    X = np.asarray(X, dtype=np.float64)
    centers = np.array(centers, dtype=np.float64)
    k = centers.shape[0]
    labels = _assign(X, centers)
    for it in range(1, max_iter + 1):
        new_centers = np.zeros_like(centers)
        counts = np.bincount(labels, minlength=k)
        np.add.at(new_centers, labels, X)
        for j in range(k):
            if counts[j] == 0:
                # farthest point from its assigned centroid becomes a new seed
                far = int(np.argmax(_sq_dists(X, centers[labels])))
                new_centers[j] = X[far]
                labels[far] = j
                counts[j] = 1
            else:
                new_centers[j] /= counts[j]
        if spherical:
            norms = np.linalg.norm(new_centers, axis=1, keepdims=True)
            norms[norms == 0] = 1.0
            new_centers /= norms
        shift = np.linalg.norm(new_centers - centers, axis=1).max()
        centers = new_centers
        labels = _assign(X, centers)
        if shift < tol:
            break
    diff = X - centers[labels]
    inertia = float(np.einsum("ij,ij->", diff, diff))
    return centers, labels, inertia, it


def kmeans_single(X, k, rng, tol=1e-6, max_iter=300, spherical=False):
    """One k-means run: k-means++ seeding followed by Lloyd iterations."""
    seeds = kmeans_pp_indices(X, k, rng)
    return lloyd(X, X[seeds], tol=tol, max_iter=max_iter, spherical=spherical)
