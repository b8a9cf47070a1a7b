"""k-means evaluation runs and the ARI / NMI agreement metrics."""

from dataclasses import dataclass, field

import numpy as np

from ..kmeans import KmeansError, kmeans_single


@dataclass
class ClusterReport:
    ari_values: list
    nmi_values: list
    tag: str = ""
    params: dict = field(default_factory=dict)

    @property
    def ari_mean(self):
        return float(np.mean(self.ari_values))

    @property
    def ari_std(self):
        return float(np.std(self.ari_values))

    @property
    def nmi_mean(self):
        return float(np.mean(self.nmi_values))

    @property
    def nmi_std(self):
        return float(np.std(self.nmi_values))

    def pct(self):
        return tuple(round(100.0 * v, 1) for v in
                     (self.ari_mean, self.ari_std, self.nmi_mean, self.nmi_std))


def kmeans(X, k, runs=10, seed=0, spherical=False):
    """Labelings from ``runs`` independent k-means fits (seeds seed+i)."""
    X = np.asarray(X, dtype=np.float64)
    if k > X.shape[0]:
        raise KmeansError(f"k={k} exceeds {X.shape[0]} points")
    out = []
    for i in range(runs):
        rng = np.random.default_rng(seed + i)
        _, labels, _, _ = kmeans_single(X, k, rng, spherical=spherical)
        out.append(labels)
    return out


def _contingency(labels, truth):
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    if labels.shape != truth.shape:
        raise ValueError("labelings must have equal length")
    _, li = np.unique(labels, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    table = np.zeros((li.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(table, (li, ti), 1)
    return table


def _comb2(x):
    return x * (x - 1) / 2.0


def ari(labels, truth):
    """Adjusted Rand Index via the contingency-table closed form."""
    table = _contingency(labels, truth)
    n = table.sum()
    sum_ij = _comb2(table).sum()
    sum_a = _comb2(table.sum(axis=1)).sum()
    sum_b = _comb2(table.sum(axis=0)).sum()
    total = _comb2(n)
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        # degenerate partitions (e.g. both single-cluster): perfect agreement
        return 1.0 if sum_ij == expected else 0.0
    return float((sum_ij - expected) / (max_index - expected))


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(labels, truth):
    """NMI = I(U;V) / sqrt(H(U) H(V)); natural log.

    A single-cluster labeling has zero entropy: two trivial partitions score
    1.0, one trivial against a non-trivial one scores 0.0.
    """
    table = _contingency(labels, truth)
    n = table.sum()
    hu = _entropy(table.sum(axis=1), n)
    hv = _entropy(table.sum(axis=0), n)
    if hu == 0.0 and hv == 0.0:
        return 1.0
    if hu == 0.0 or hv == 0.0:
        return 0.0
    pij = table / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0)) / (n * n)
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / outer[nz])).sum())
    mi = max(mi, 0.0)  # guard tiny negative rounding
    return min(mi / np.sqrt(hu * hv), 1.0)


def cluster_eval(X, truth, k, runs=10, seed=0, tag="", spherical=False):
    """ClusterReport over ``runs`` k-means fits scored against the truth."""
    truth = np.asarray(truth)
    runs_labels = kmeans(X, k, runs=runs, seed=seed, spherical=spherical)
    return ClusterReport(
        ari_values=[ari(lab, truth) for lab in runs_labels],
        nmi_values=[nmi(lab, truth) for lab in runs_labels],
        tag=tag,
        params={"k": k, "runs": runs, "seed": seed},
    )
