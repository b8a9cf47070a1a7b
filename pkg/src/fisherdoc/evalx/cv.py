"""Stratified 10-fold cross-validation and the C / epoch scan curves."""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .logreg import ClassifierError, train_logreg

DEFAULT_C_GRID = (0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
DEFAULT_EPOCH_GRID = (1, 5, 10, 20, 50)
N_FOLDS = 10


@dataclass
class CvReport:
    fold_accuracies: list
    tag: str = ""
    params: dict = field(default_factory=dict)

    @property
    def mean(self):
        return float(np.mean(self.fold_accuracies))

    @property
    def std(self):
        return float(np.std(self.fold_accuracies))

    def pct(self):
        """(mean, std) in percent, one decimal, as reported."""
        return round(100.0 * self.mean, 1), round(100.0 * self.std, 1)


def stratified_folds(y, n_folds=N_FOLDS, seed=0):
    """Class-balanced fold assignment; returns an int array of fold ids."""
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(y), dtype=np.int64)
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        # deal round-robin so fold sizes differ by at most one per class
        for pos, i in enumerate(idx):
            fold_of[i] = pos % n_folds
    return fold_of


def cv10(X, y, C=1.0, seed=0, tag="", X_test=None, max_iter=1000):
    """Stratified 10-fold CV accuracy of logistic regression.

    ``X_test``, when given, supplies the feature rows used for scoring
    held-out documents (inferred vectors for PV models); training always
    uses ``X``.
    """
    X = sp.csr_matrix(X) if sp.issparse(X) else np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.shape[0] != len(y):
        raise ClassifierError("X and y length mismatch")
    if X_test is None:
        X_test = X
    else:
        if not sp.issparse(X_test):
            X_test = np.asarray(X_test, dtype=np.float64)
        if X_test.shape != X.shape:
            raise ClassifierError("X_test must match X's shape")
    fold_of = stratified_folds(y, N_FOLDS, seed)
    accs = []
    for f in range(N_FOLDS):
        test = fold_of == f
        model = train_logreg(X[~test], y[~test], C=C, max_iter=max_iter)
        accs.append(model.accuracy(X_test[test], y[test]))
    return CvReport(fold_accuracies=accs, tag=tag, params={"C": C, "seed": seed})


def scan_C(X, y, grid=DEFAULT_C_GRID, seed=0, tag="", X_test=None):
    """One CvReport per C on the grid."""
    return [cv10(X, y, C=c, seed=seed, tag=tag, X_test=X_test) for c in grid]


def scan_epochs(train_fn, grid=DEFAULT_EPOCH_GRID, C=1.0, seed=0, tag=""):
    """One CvReport per epoch count.

    ``train_fn(epochs)`` must return ``(X, y)`` or ``(X, y, X_test)`` — it
    retrains the representation at each grid point.
    """
    curve = []
    for epochs in grid:
        out = train_fn(epochs)
        X, y = out[0], out[1]
        X_test = out[2] if len(out) > 2 else None
        rep = cv10(X, y, C=C, seed=seed, tag=tag, X_test=X_test)
        rep.params["epochs"] = epochs
        curve.append(rep)
    return curve


def best_report(curve):
    """Highest-mean report on a scan curve."""
    return max(curve, key=lambda r: r.mean)
