"""Array-backed inverted index over the corpus tokenization pipeline.

Documents are stored in docno-ascending order, so internal row order doubles
as the tie-break order and postings come out sorted by doc id for free.
Postings live in CSR-style flat arrays for the scoring kernel."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..container import KIND_INDEX, read_container, write_container
from ..corpus import RawDocument, default_stopwords, remove_stopwords, tokenize

log = logging.getLogger(__name__)


class IndexError_(ValueError):
    pass


@dataclass
class InvertedIndex:
    doc_ids: list
    terms: list
    term_starts: np.ndarray  # len V+1; postings of term v at [starts[v], starts[v+1])
    post_docs: np.ndarray
    post_tfs: np.ndarray
    doc_lengths: np.ndarray
    term_index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.term_index:
            self.term_index = {t: i for i, t in enumerate(self.terms)}

    @property
    def n_docs(self):
        return len(self.doc_ids)

    @property
    def avgdl(self):
        return float(self.doc_lengths.mean())

    def doc_frequency(self, term):
        v = self.term_index.get(term)
        if v is None:
            return 0
        return int(self.term_starts[v + 1] - self.term_starts[v])


def _doc_stream(docs):
    if isinstance(docs, dict):
        return [(i, t) for i, t in docs.items()]
    out = []
    for d in docs:
        if isinstance(d, RawDocument):
            out.append((d.id, d.text))
        else:
            i, t = d
            out.append((i, t))
    return out


def build_index(docs, stopwords=None):
    """Index a collection; ``docs`` is a mapping id -> text, an iterable of
    (id, text) pairs, or RawDocuments."""
    if stopwords is None:
        stopwords = default_stopwords()
    pairs = sorted(_doc_stream(docs), key=lambda p: p[0])
    if not pairs:
        raise IndexError_("empty collection")
    seen = set()
    for i, _ in pairs:
        if i in seen:
            raise IndexError_(f"duplicate doc id {i!r}")
        seen.add(i)
    doc_ids = [i for i, _ in pairs]
    postings = {}
    doc_lengths = np.zeros(len(pairs), dtype=np.int64)
    for row, (_, text) in enumerate(pairs):
        toks = remove_stopwords(tokenize(text), stopwords)
        doc_lengths[row] = len(toks)
        counts = {}
        for t in toks:
            counts[t] = counts.get(t, 0) + 1
        for t, f in counts.items():
            postings.setdefault(t, []).append((row, f))
    terms = sorted(postings)
    term_starts = np.zeros(len(terms) + 1, dtype=np.int64)
    n_post = sum(len(postings[t]) for t in terms)
    post_docs = np.empty(n_post, dtype=np.int64)
    post_tfs = np.empty(n_post, dtype=np.float64)
    pos = 0
    for v, t in enumerate(terms):
        term_starts[v] = pos
        for row, f in postings[t]:  # rows appended in ascending order already
            post_docs[pos] = row
            post_tfs[pos] = f
            pos += 1
    term_starts[len(terms)] = pos
    if doc_lengths.sum() == 0:
        log.warning("collection tokenized to zero terms")
    return InvertedIndex(doc_ids=doc_ids, terms=terms, term_starts=term_starts,
                         post_docs=post_docs, post_tfs=post_tfs,
                         doc_lengths=doc_lengths)


def save_index(index, path):
    write_container(path, KIND_INDEX, {
        "term_starts": index.term_starts,
        "post_docs": index.post_docs,
        "post_tfs": index.post_tfs,
        "doc_lengths": index.doc_lengths,
    }, {"doc_ids": index.doc_ids, "terms": index.terms})


def load_index(path):
    _, meta, arrays = read_container(path, expect_kind=KIND_INDEX)
    return InvertedIndex(doc_ids=meta["doc_ids"], terms=meta["terms"],
                         term_starts=arrays["term_starts"],
                         post_docs=arrays["post_docs"],
                         post_tfs=arrays["post_tfs"],
                         doc_lengths=arrays["doc_lengths"])
