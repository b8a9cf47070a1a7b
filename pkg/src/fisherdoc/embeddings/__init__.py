from .base import (
    EmbeddingError,
    EmbeddingMatrix,
    build_unigram_table,
    corpus_to_arrays,
    lookup_vectors,
    mean_pool,
    ns_example_loss_and_grads,
)
from .doc2vec import DEFAULT_INFER_STEPS, PvModel, train_pv
from .io import (
    load_embeddings,
    load_pv_model,
    read_text_embeddings,
    save_embeddings,
    save_pv_model,
    write_text_embeddings,
)
from .word2vec import train_cbow

__all__ = [
    "DEFAULT_INFER_STEPS",
    "EmbeddingError",
    "EmbeddingMatrix",
    "PvModel",
    "build_unigram_table",
    "corpus_to_arrays",
    "load_embeddings",
    "load_pv_model",
    "lookup_vectors",
    "mean_pool",
    "ns_example_loss_and_grads",
    "read_text_embeddings",
    "save_embeddings",
    "save_pv_model",
    "train_cbow",
    "train_pv",
    "write_text_embeddings",
]
