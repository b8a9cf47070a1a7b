"""Embedding persistence.

Binary saves use the FDV1 container and round-trip bit-exactly.  The text
format (header line ``V d``, then ``term v1 ... vd`` per line) exists for
interchange with external tools and is read permissively but written with a
fixed decimal precision, so it is not an exact round-trip.
"""

from .. import container
from .base import EmbeddingError, EmbeddingMatrix
from .doc2vec import PvModel


def save_embeddings(emb, path):
    container.write_container(
        path,
        container.KIND_EMBEDDING,
        arrays={"vectors": emb.vectors},
        meta={"terms": emb.terms, "trained_epochs": emb.trained_epochs},
    )


def load_embeddings(path):
    _, meta, arrays = container.read_container(
        path, expect_kind=container.KIND_EMBEDDING
    )
    return EmbeddingMatrix(
        meta["terms"], arrays["vectors"], trained_epochs=meta.get("trained_epochs", 0)
    )


def save_pv_model(model, path):
    """Persist a PvModel with the frozen layers needed for later inference."""
    arrays = {
        "doc_vectors": model.doc_vectors,
        "w_out": model.w_out,
        "counts": model.counts,
    }
    if model.w_in is not None:
        arrays["w_in"] = model.w_in
    container.write_container(
        path,
        container.KIND_DOC_EMBEDDINGS,
        arrays=arrays,
        meta={
            "mode": model.mode,
            "doc_ids": model.doc_ids,
            "terms": model.terms,
            "window": model.window,
            "negative": model.negative,
            "trained_epochs": model.trained_epochs,
            "seed": model.seed,
        },
    )


def load_pv_model(path):
    _, meta, arrays = container.read_container(
        path, expect_kind=container.KIND_DOC_EMBEDDINGS
    )
    return PvModel(
        mode=meta["mode"],
        doc_ids=meta["doc_ids"],
        doc_vectors=arrays["doc_vectors"],
        w_out=arrays["w_out"],
        terms=meta["terms"],
        counts=arrays["counts"],
        w_in=arrays.get("w_in"),
        window=meta["window"],
        negative=meta["negative"],
        trained_epochs=meta["trained_epochs"],
        seed=meta["seed"],
    )


def write_text_embeddings(emb, path, precision=6):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(emb)} {emb.d}\n")
        for term, row in zip(emb.terms, emb.vectors):
            vals = " ".join(f"{v:.{precision}f}" for v in row)
            fh.write(f"{term} {vals}\n")


def read_text_embeddings(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise EmbeddingError(f"{path}:1: malformed header {header.strip()!r}")
        try:
            n, d = int(parts[0]), int(parts[1])
        except ValueError:
            raise EmbeddingError(f"{path}:1: malformed header {header.strip()!r}")
        terms = []
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split(" ")
            if len(fields) != d + 1:
                raise EmbeddingError(
                    f"{path}:{lineno}: expected term plus {d} values, "
                    f"got {len(fields)} fields"
                )
            terms.append(fields[0])
            try:
                rows.append([float(v) for v in fields[1:]])
            except ValueError:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric vector entry")
        if len(terms) != n:
            raise EmbeddingError(
                f"{path}: header declares {n} terms but body has {len(terms)}"
            )
    return EmbeddingMatrix(terms, rows)
