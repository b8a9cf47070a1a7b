"""Deterministic text tokenization and stopword filtering.

Tokens are maximal runs of Unicode letters after lowercasing; punctuation,
digits, and anything else act as separators, so purely numeric fragments
never survive.  No stemming or lemmatization is applied.
"""

import re
from importlib import resources

_WORDISH_RUN = re.compile(r"[^\W\d_]+", re.UNICODE)

_DEFAULT_STOPWORDS = None


def _letter_parts(run):
    return "".join(c if c.isalpha() else " " for c in run).split()


def tokenize(text):
    """Lowercase ``text`` and return its letter-run tokens, in order."""
    out = []
    for run in _WORDISH_RUN.findall(text.lower()):
        # \w admits non-decimal numerics (e.g. superscripts); keep letters only
        if run.isalpha():
            out.append(run)
        else:
            out.extend(_letter_parts(run))
    return out


def remove_stopwords(tokens, stoplist):
    """Order-preserving removal of every token present in ``stoplist``."""
    return [t for t in tokens if t not in stoplist]


def load_stopwords(path=None):
    """Read a one-word-per-line stopword file; defaults to the bundled
    179-word English list."""
    if path is None:
        text = (
            resources.files("fisherdoc.corpus")
            .joinpath("data/stopwords_en.txt")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return {line.strip().lower() for line in text.splitlines() if line.strip()}


def default_stopwords():
    """Bundled English stopword set (cached)."""
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = frozenset(load_stopwords())
    return _DEFAULT_STOPWORDS
