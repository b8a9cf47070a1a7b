"""Dense document-vector batches: id-aligned matrices cached between stages."""

import numpy as np

from .container import KIND_DOCVEC_BATCH, read_container, write_container


def save_docvec_batch(path, doc_ids, matrix, source="", meta=None):
    """Persist an N x d matrix with its row ids; ``source`` tags the model
    that produced the vectors."""
    doc_ids = list(doc_ids)
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != len(doc_ids):
        raise ValueError(
            f"matrix shape {matrix.shape} does not align with {len(doc_ids)} ids"
        )
    full_meta = dict(meta or {})
    full_meta["doc_ids"] = doc_ids
    full_meta["source"] = source
    write_container(path, KIND_DOCVEC_BATCH, {"vectors": matrix}, full_meta)


def load_docvec_batch(path):
    """Returns (doc_ids, matrix, meta)."""
    _, meta, arrays = read_container(path, expect_kind=KIND_DOCVEC_BATCH)
    return meta["doc_ids"], arrays["vectors"], meta
