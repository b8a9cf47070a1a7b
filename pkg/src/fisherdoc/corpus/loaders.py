"""Dataset ingestion for the labeled (classification/clustering) corpora.

Two on-disk layouts are supported:

* ``subj_sent`` -- one document per line, two files in a directory, one file
  per class (the movie-review subjectivity and sentence-polarity sets ship
  this way).  Latin-1 content is tolerated.
* ``newsgroups_bydate`` -- one file per document inside per-class
  directories; the usual ``*-train`` / ``*-test`` split directories are
  merged when present.
"""

import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field

from .tokenizer import default_stopwords, remove_stopwords, tokenize

log = logging.getLogger(__name__)


class CorpusError(ValueError):
    """Unusable corpus input (missing, empty, or malformed)."""


@dataclass
class RawDocument:
    id: str
    text: str
    label: int | None = None


@dataclass
class TokenizedDoc:
    id: str
    tokens: list
    label: int | None = None


@dataclass
class TokenizedCorpus:
    docs: list
    vocab_counts: Counter = field(default_factory=Counter)

    def __len__(self):
        return len(self.docs)

    @property
    def n_empty(self):
        return sum(1 for d in self.docs if not d.tokens)

    def labels(self):
        return [d.label for d in self.docs]

    def validate(self):
        """Check structural invariants; raises CorpusError on violation."""
        seen = set()
        recount = Counter()
        for d in self.docs:
            if not d.id:
                raise CorpusError("document with empty id")
            if d.id in seen:
                raise CorpusError(f"duplicate document id {d.id!r}")
            seen.add(d.id)
            for t in d.tokens:
                if not t:
                    raise CorpusError(f"empty token in document {d.id!r}")
            recount.update(d.tokens)
        if recount != self.vocab_counts:
            raise CorpusError("vocab_counts inconsistent with documents")
        return self


def build_tokenized_corpus(raw_docs, stopwords=None):
    """Tokenize and stopword-filter RawDocuments into a TokenizedCorpus."""
    if stopwords is None:
        stopwords = default_stopwords()
    docs = []
    counts = Counter()
    seen = set()
    n_empty = 0
    for rd in raw_docs:
        if not rd.id:
            raise CorpusError("document with empty id")
        if rd.id in seen:
            raise CorpusError(f"duplicate document id {rd.id!r}")
        seen.add(rd.id)
        tokens = remove_stopwords(tokenize(rd.text), stopwords)
        if not tokens:
            n_empty += 1
        counts.update(tokens)
        docs.append(TokenizedDoc(rd.id, tokens, rd.label))
    if not docs:
        raise CorpusError("no documents")
    if n_empty:
        log.warning("%d of %d documents are empty after filtering", n_empty, len(docs))
    return TokenizedCorpus(docs=docs, vocab_counts=counts)


def write_corpus_jsonl(corpus, path):
    """Serialize a TokenizedCorpus as one JSON object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.docs:
            rec = {"id": doc.id, "tokens": doc.tokens}
            if doc.label is not None:
                rec["label"] = doc.label
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def read_corpus_jsonl(path):
    docs = []
    counts = Counter()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc})")
            if "id" not in rec or "tokens" not in rec:
                raise CorpusError(f"{path}:{lineno}: record needs 'id' and 'tokens'")
            tokens = [str(t) for t in rec["tokens"]]
            counts.update(tokens)
            docs.append(TokenizedDoc(str(rec["id"]), tokens, rec.get("label")))
    if not docs:
        raise CorpusError(f"{path}: no documents")
    return TokenizedCorpus(docs=docs, vocab_counts=counts).validate()


def _decode(raw, origin):
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        pass
    try:
        return raw.decode("latin-1")
    except UnicodeDecodeError:  # pragma: no cover - latin-1 decodes anything
        log.warning("%s: undecodable bytes replaced", origin)
        return raw.decode("utf-8", errors="replace")


def _iter_subj_sent(path):
    class_files = sorted(
        e for e in os.listdir(path)
        if not e.startswith(".") and os.path.isfile(os.path.join(path, e))
    )
    if len(class_files) != 2:
        raise CorpusError(
            f"{path}: subj_sent layout needs exactly two class files, found "
            f"{len(class_files)}: {class_files}"
        )
    for label, name in enumerate(class_files):
        fpath = os.path.join(path, name)
        with open(fpath, "rb") as fh:
            raw = fh.read()
        text = _decode(raw, fpath)
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise CorpusError(f"{fpath}: no documents")
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                log.warning("%s:%d: blank line kept as empty document", fpath, lineno)
            yield RawDocument(id=f"{name}:{lineno}", text=line, label=label)


def _bydate_roots(path):
    subdirs = sorted(
        e for e in os.listdir(path) if os.path.isdir(os.path.join(path, e))
    )
    split_dirs = [d for d in subdirs if d.endswith(("-train", "-test", "_train", "_test"))]
    if split_dirs:
        return [os.path.join(path, d) for d in split_dirs]
    return [path]


def strip_newsgroup_headers(text):
    """Drop the RFC-822 header block (everything before the first blank line)."""
    _, _, body = text.partition("\n\n")
    return body if body else text


def _iter_newsgroups(path, strip_headers):
    roots = _bydate_roots(path)
    class_names = sorted(
        {
            e
            for root in roots
            for e in os.listdir(root)
            if os.path.isdir(os.path.join(root, e))
        }
    )
    if not class_names:
        raise CorpusError(f"{path}: no class directories found")
    label_of = {name: i for i, name in enumerate(class_names)}
    for root in roots:
        split = os.path.basename(root)
        for cname in sorted(os.listdir(root)):
            cdir = os.path.join(root, cname)
            if not os.path.isdir(cdir):
                continue
            for fname in sorted(os.listdir(cdir)):
                fpath = os.path.join(cdir, fname)
                if not os.path.isfile(fpath):
                    continue
                with open(fpath, "rb") as fh:
                    text = _decode(fh.read(), fpath)
                if strip_headers:
                    text = strip_newsgroup_headers(text)
                doc_id = f"{split}/{cname}/{fname}" if root != path else f"{cname}/{fname}"
                yield RawDocument(id=doc_id, text=text, label=label_of[cname])


def load_labeled_corpus(path, format, stopwords=None, strip_headers=False):
    """Load and tokenize a labeled corpus.

    ``format`` selects the on-disk layout: ``"subj_sent"`` or
    ``"newsgroups_bydate"``.  For the newsgroups layout, ``strip_headers``
    removes the message header block (kept by default).
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"corpus path does not exist: {path}")
    if format == "subj_sent":
        raw = list(_iter_subj_sent(path))
    elif format == "newsgroups_bydate":
        raw = list(_iter_newsgroups(path, strip_headers))
    else:
        raise CorpusError(f"unknown corpus format {format!r}")
    if not raw:
        raise CorpusError(f"{path}: no documents")
    return build_tokenized_corpus(raw, stopwords=stopwords)
