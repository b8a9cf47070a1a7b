from .io import load_lda, load_lsi, load_tfidf, save_lda, save_lsi, save_tfidf
from .lda import LdaError, LdaModel, fit_lda, infer_lda, infer_lda_corpus
from .lsi import LsiError, LsiModel, fit_lsi, transform_lsi, transform_lsi_corpus, truncated_svd
from .tfidf import (
    TfidfError,
    TfidfModel,
    fit_tfidf,
    transform_tfidf,
    transform_tfidf_corpus,
)

__all__ = [
    "LdaError",
    "LdaModel",
    "LsiError",
    "LsiModel",
    "TfidfError",
    "TfidfModel",
    "fit_lda",
    "fit_lsi",
    "fit_tfidf",
    "infer_lda",
    "infer_lda_corpus",
    "load_lda",
    "load_lsi",
    "load_tfidf",
    "save_lda",
    "save_lsi",
    "save_tfidf",
    "transform_lsi",
    "transform_lsi_corpus",
    "transform_tfidf",
    "transform_tfidf_corpus",
    "truncated_svd",
]
