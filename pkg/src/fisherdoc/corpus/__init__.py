from .loaders import (
    CorpusError,
    RawDocument,
    TokenizedCorpus,
    TokenizedDoc,
    build_tokenized_corpus,
    load_labeled_corpus,
    read_corpus_jsonl,
    strip_newsgroup_headers,
    write_corpus_jsonl,
)
from .tokenizer import default_stopwords, load_stopwords, remove_stopwords, tokenize
from .trec import Topic, TrecCollection, load_trec_collection, load_trec_docs

__all__ = [
    "CorpusError",
    "RawDocument",
    "TokenizedCorpus",
    "TokenizedDoc",
    "Topic",
    "TrecCollection",
    "build_tokenized_corpus",
    "default_stopwords",
    "load_labeled_corpus",
    "load_stopwords",
    "load_trec_collection",
    "load_trec_docs",
    "read_corpus_jsonl",
    "remove_stopwords",
    "strip_newsgroup_headers",
    "tokenize",
    "write_corpus_jsonl",
]
