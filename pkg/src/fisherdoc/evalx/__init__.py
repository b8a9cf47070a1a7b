from .clustering import ClusterReport, ari, cluster_eval, kmeans, nmi
from .cv import (
    DEFAULT_C_GRID,
    DEFAULT_EPOCH_GRID,
    CvReport,
    best_report,
    cv10,
    scan_C,
    scan_epochs,
    stratified_folds,
)
from .logreg import ClassifierError, LogisticModel, logreg_loss_grad, train_logreg
from .report import (
    CLUSTER_COLUMNS,
    CV_COLUMNS,
    cluster_rows,
    cv_rows,
    to_markdown,
    to_tsv,
)

__all__ = [
    "ClassifierError",
    "LogisticModel",
    "train_logreg",
    "logreg_loss_grad",
    "CvReport",
    "cv10",
    "scan_C",
    "scan_epochs",
    "best_report",
    "stratified_folds",
    "DEFAULT_C_GRID",
    "DEFAULT_EPOCH_GRID",
    "ClusterReport",
    "kmeans",
    "ari",
    "nmi",
    "cluster_eval",
    "cv_rows",
    "cluster_rows",
    "to_tsv",
    "to_markdown",
    "CV_COLUMNS",
    "CLUSTER_COLUMNS",
]
