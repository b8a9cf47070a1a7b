"""L2-regularized logistic regression trained with L-BFGS-B.

Objective (y in {-1,+1}, intercept unpenalized):

    L(w, b) = sum_t log(1 + exp(-y_t (w.x_t + b))) + (1 / (2C)) ||w||^2
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy import optimize

log = logging.getLogger(__name__)

GRAD_TOL = 1e-5


class ClassifierError(ValueError):
    pass


@dataclass
class LogisticModel:
    w: np.ndarray
    b: float
    C: float
    converged: bool
    n_iter: int

    def decision(self, X):
        if not sp.issparse(X):
            X = np.asarray(X)
        return X @ self.w + self.b

    def predict(self, X):
        return (self.decision(X) >= 0.0).astype(np.int64)

    def accuracy(self, X, y):
        return float((self.predict(X) == np.asarray(y)).mean())


def logreg_loss_grad(params, X, y_pm, C):
    """(loss, grad) of the objective at params = [w..., b]."""
    w, b = params[:-1], params[-1]
    z = y_pm * (X @ w + b)
    loss = np.logaddexp(0.0, -z).sum() + 0.5 / C * (w @ w)
    # d/dz log(1+e^-z) = -sigmoid(-z)
    coef = -y_pm * _sigmoid(-z)
    grad_w = X.T @ coef + w / C
    grad_b = coef.sum()
    return loss, np.concatenate([grad_w, [grad_b]])


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _as_pm_one(y):
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size != 2 or not np.array_equal(classes, [0, 1]):
        raise ClassifierError(f"labels must be binary 0/1, got classes {classes}")
    return 2.0 * y - 1.0


def train_logreg(X, y, C=1.0, max_iter=1000):
    """Fit the model; warns and returns the best iterate on non-convergence."""
    if C <= 0:
        raise ClassifierError(f"C must be positive, got {C}")
    X = sp.csr_matrix(X) if sp.issparse(X) else np.asarray(X, dtype=np.float64)
    y_pm = _as_pm_one(y)
    x0 = np.zeros(X.shape[1] + 1)
    res = optimize.minimize(
        logreg_loss_grad, x0, args=(X, y_pm, C), method="L-BFGS-B", jac=True,
        options={"maxiter": max_iter, "gtol": GRAD_TOL * 1e-2, "ftol": 1e-14},
    )
    grad_norm = float(np.linalg.norm(res.jac))
    converged = grad_norm < GRAD_TOL
    if not converged:
        log.warning("logreg did not converge (grad norm %.2e); using best iterate",
                    grad_norm)
    return LogisticModel(w=res.x[:-1], b=float(res.x[-1]), C=C,
                         converged=converged, n_iter=int(res.nit))
