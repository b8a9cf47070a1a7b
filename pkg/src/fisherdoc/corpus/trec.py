"""TREC test-collection ingestion: SGML documents, topics, and qrels.

Document files are concatenations of ``<DOC>`` blocks carrying a ``<DOCNO>``;
all markup is stripped and the remaining raw text kept.  Topic files use the
classic ``<top>/<num>/<title>/<desc>`` layout.  Qrels are whitespace-separated
``topic 0 docno rel`` lines.  Plain and gzip-compressed files are read.
"""

import gzip
import logging
import os
import re
from dataclasses import dataclass, field

from .loaders import CorpusError, RawDocument, _decode

log = logging.getLogger(__name__)

_DOC_BLOCK = re.compile(r"<DOC>(.*?)</DOC>", re.DOTALL | re.IGNORECASE)
_DOCNO = re.compile(r"<DOCNO>(.*?)</DOCNO>", re.DOTALL | re.IGNORECASE)
_DOCID_LIKE = re.compile(
    r"<(DOCNO|DOCID|DOCOLDNO)>.*?</\1>", re.DOTALL | re.IGNORECASE
)
_ANY_TAG = re.compile(r"<[^>]+>")

_TOPIC_BLOCK = re.compile(r"<top>(.*?)</top>", re.DOTALL | re.IGNORECASE)
_TOPIC_FIELD = re.compile(r"<(num|title|desc|narr)>", re.IGNORECASE)


@dataclass
class Topic:
    topic_id: str
    title: str
    description: str


@dataclass
class TrecCollection:
    docs: list
    topics: list
    qrels: dict
    n_skipped: int = 0
    doc_index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.doc_index:
            self.doc_index = {t.topic_id: t for t in self.topics}

    def topic_text(self, topic_id, fields="title+desc"):
        """Query text for a topic: ``title``, ``desc``, or ``title+desc``."""
        topic = self.doc_index[topic_id]
        if fields == "title":
            return topic.title
        if fields == "desc":
            return topic.description
        if fields == "title+desc":
            return f"{topic.title} {topic.description}".strip()
        raise ValueError(f"unknown topic fields {fields!r}")


def _read_text(path):
    path = os.fspath(path)
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as fh:
        return _decode(fh.read(), path)


def _doc_files(doc_path):
    if os.path.isfile(doc_path):
        return [doc_path]
    files = []
    for root, dirs, names in os.walk(doc_path):
        dirs.sort()
        files.extend(os.path.join(root, n) for n in sorted(names))
    return files


def parse_sgml_docs(text, origin="<string>"):
    """Extract (docno, raw text) pairs from concatenated <DOC> blocks.

    Returns (docs, n_skipped); blocks without a DOCNO are skipped.
    """
    docs = []
    n_skipped = 0
    for block in _DOC_BLOCK.finditer(text):
        body = block.group(1)
        m = _DOCNO.search(body)
        if m is None:
            n_skipped += 1
            log.warning("%s: <DOC> block without <DOCNO> skipped", origin)
            continue
        docno = m.group(1).strip()
        if not docno:
            n_skipped += 1
            log.warning("%s: <DOC> block with empty <DOCNO> skipped", origin)
            continue
        content = _DOCID_LIKE.sub(" ", body)
        content = _ANY_TAG.sub(" ", content)
        docs.append((docno, content.strip()))
    return docs, n_skipped


def _clean_field(text, labels):
    text = text.strip()
    for label in labels:
        if text.lower().startswith(label):
            text = text[len(label):].lstrip(" :").strip()
            break
    return " ".join(text.split())


def parse_topics(text):
    """Parse classic TREC topic markup into Topic records."""
    topics = []
    for block in _TOPIC_BLOCK.finditer(text):
        body = block.group(1)
        fields = {}
        matches = list(_TOPIC_FIELD.finditer(body))
        for i, m in enumerate(matches):
            name = m.group(1).lower()
            end = matches[i + 1].start() if i + 1 < len(matches) else len(body)
            fields[name] = body[m.end():end]
        if "num" not in fields:
            raise CorpusError("topic block without <num>")
        topic_id = _clean_field(fields["num"], ["number"])
        title = _clean_field(fields.get("title", ""), ["topic"])
        desc = _clean_field(fields.get("desc", ""), ["description"])
        topics.append(Topic(topic_id=topic_id, title=title, description=desc))
    return topics


def parse_qrels(text, origin="<string>"):
    """Parse trec qrels lines into {(topic_id, docno): relevance}."""
    qrels = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise CorpusError(f"{origin}:{lineno}: malformed qrels line {line!r}")
        topic_id, _iter, docno, rel = parts
        try:
            rel = int(rel)
        except ValueError:
            raise CorpusError(f"{origin}:{lineno}: non-integer relevance {rel!r}")
        if rel < 0:
            raise CorpusError(f"{origin}:{lineno}: negative relevance {rel}")
        qrels[(topic_id, docno)] = rel
    return qrels


def load_trec_docs(doc_path):
    """RawDocuments from a TREC SGML file or directory, without topics."""
    if not os.path.exists(doc_path):
        raise FileNotFoundError(f"missing TREC input: {doc_path}")
    docs = []
    for fpath in _doc_files(doc_path):
        parsed, _ = parse_sgml_docs(_read_text(fpath), origin=fpath)
        docs.extend(RawDocument(id=docno, text=text) for docno, text in parsed)
    if not docs:
        raise CorpusError(f"{doc_path}: no documents parsed")
    return docs


def load_trec_collection(doc_path, topic_path, qrels_path):
    """Load and cross-link documents, topics, and qrels."""
    for p in (doc_path, topic_path, qrels_path):
        if not os.path.exists(p):
            raise FileNotFoundError(f"missing TREC input: {p}")

    docs = []
    n_skipped = 0
    for fpath in _doc_files(doc_path):
        parsed, skipped = parse_sgml_docs(_read_text(fpath), origin=fpath)
        n_skipped += skipped
        docs.extend(RawDocument(id=docno, text=text) for docno, text in parsed)
    if not docs:
        raise CorpusError(f"{doc_path}: no documents parsed")

    topics = parse_topics(_read_text(topic_path))
    if not topics:
        raise CorpusError(f"{topic_path}: no topics parsed")

    qrels = parse_qrels(_read_text(qrels_path), origin=qrels_path)
    known = {t.topic_id for t in topics}
    unknown = sorted({tid for tid, _ in qrels} - known)
    if unknown:
        raise CorpusError(
            f"{qrels_path}: qrels reference unknown topics: {', '.join(unknown[:5])}"
        )
    return TrecCollection(docs=docs, topics=topics, qrels=qrels, n_skipped=n_skipped)
