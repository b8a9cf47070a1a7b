from collections import Counter

from fisherdoc.corpus import TokenizedCorpus, TokenizedDoc


def corpus_from_token_lists(token_lists, labels=None):
    """Build a TokenizedCorpus from pre-tokenized lists, skipping the tokenizer.

    Synthetic test vocabularies often contain digits the real tokenizer would
    strip, so tests construct the corpus structure directly.
    """
    docs = []
    counts = Counter()
    for i, toks in enumerate(token_lists):
        toks = list(toks)
        label = labels[i] if labels is not None else None
        docs.append(TokenizedDoc(id=str(i), tokens=toks, label=label))
        counts.update(toks)
    return TokenizedCorpus(docs=docs, vocab_counts=counts).validate()
