"""Persistence for the baseline models (TF-IDF, LSI, LDA).

All three use the FDV1 container; LSI embeds its TF-IDF stage in the same
file so a single artifact is enough to transform new documents.
"""

from .. import container
from .lda import LdaModel
from .lsi import LsiModel
from .tfidf import TfidfModel


def save_tfidf(model, path):
    container.write_container(
        path,
        container.KIND_TFIDF,
        arrays={"idf": model.idf},
        meta={"vocab": model.vocab, "rank_by": model.rank_by},
    )


def load_tfidf(path):
    _, meta, arrays = container.read_container(path, expect_kind=container.KIND_TFIDF)
    return TfidfModel(
        vocab=meta["vocab"], idf=arrays["idf"], rank_by=meta.get("rank_by", "max")
    )


def save_lsi(model, path):
    container.write_container(
        path,
        container.KIND_LSI,
        arrays={
            "projection": model.projection,
            "singular_values": model.singular_values,
            "idf": model.tfidf.idf,
        },
        meta={"vocab": model.tfidf.vocab, "rank_by": model.tfidf.rank_by},
    )


def load_lsi(path):
    _, meta, arrays = container.read_container(path, expect_kind=container.KIND_LSI)
    tfidf = TfidfModel(
        vocab=meta["vocab"], idf=arrays["idf"], rank_by=meta.get("rank_by", "max")
    )
    return LsiModel(
        projection=arrays["projection"],
        singular_values=arrays["singular_values"],
        tfidf=tfidf,
    )


def save_lda(model, path):
    container.write_container(
        path,
        container.KIND_LDA,
        arrays={"topic_word": model.topic_word, "ll_trace": model.ll_trace},
        meta={
            "terms": model.terms,
            "alpha": model.alpha,
            "beta": model.beta,
            "seed": model.seed,
            "passes": model.passes,
        },
    )


def load_lda(path):
    _, meta, arrays = container.read_container(path, expect_kind=container.KIND_LDA)
    return LdaModel(
        topic_word=arrays["topic_word"],
        terms=meta["terms"],
        alpha=meta["alpha"],
        beta=meta["beta"],
        ll_trace=arrays["ll_trace"],
        seed=meta["seed"],
        passes=meta["passes"],
    )
