"""Document representations from word embeddings via Fisher kernels, plus the
classic sparse/factorization baselines, and evaluation harnesses for
classification, clustering, and BM25-fused retrieval."""

__version__ = "0.1.0"
