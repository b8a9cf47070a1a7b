"""Retrieval metrics: average precision, MAP, P@20, and t-based 95% CIs.

Topics without a single relevant judgment are excluded from the means, the
convention the standard trec scorer follows."""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

log = logging.getLogger(__name__)


def _relevant_docs(qrels, topic_id):
    return {doc for (tid, doc), rel in qrels.items() if tid == topic_id and rel > 0}


def topics_with_relevant(qrels):
    out = {}
    for (tid, doc), rel in qrels.items():
        if rel > 0:
            out.setdefault(tid, set()).add(doc)
    return out


def average_precision(ranked_ids, relevant):
    """AP of one ranking against the topic's full relevant set."""
    if not relevant:
        raise ValueError("AP undefined without relevant documents")
    hits = 0
    total = 0.0
    for rank, doc in enumerate(ranked_ids, start=1):
        if doc in relevant:
            hits += 1
            total += hits / rank
    return total / len(relevant)


def precision_at(ranked_ids, relevant, k=20):
    """Relevant among the top k, missing ranks counted non-relevant."""
    top = ranked_ids[:k]
    return sum(1 for doc in top if doc in relevant) / k


def per_topic_metrics(run, qrels, k=20):
    """{topic: (AP, P@k)} over topics that have relevant judgments."""
    rel_by_topic = topics_with_relevant(qrels)
    out = {}
    for tid, relevant in sorted(rel_by_topic.items()):
        ranked = [doc for doc, _ in run.get(tid, [])]
        out[tid] = (average_precision(ranked, relevant),
                    precision_at(ranked, relevant, k))
    return out


def map_metric(run, qrels):
    """Mean average precision over topics with relevant judgments."""
    vals = [ap for ap, _ in per_topic_metrics(run, qrels).values()]
    if not vals:
        raise ValueError("no topics with relevant judgments")
    return float(np.mean(vals))


def p_at_20(run, qrels):
    vals = [p for _, p in per_topic_metrics(run, qrels, k=20).values()]
    if not vals:
        raise ValueError("no topics with relevant judgments")
    return float(np.mean(vals))


def ci95(values):
    """Half-width of the t-based 95% CI of the mean; 0 for n < 2."""
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    if n < 2 or values.min() == values.max():
        return 0.0
    sd = values.std(ddof=1)
    return float(stats.t.ppf(0.975, n - 1) * sd / np.sqrt(n))


@dataclass
class RetrievalReport:
    per_topic: dict  # topic -> (AP, P@20)
    k1: float
    b: float
    tag: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def map(self):
        return float(np.mean([ap for ap, _ in self.per_topic.values()]))

    @property
    def p20(self):
        return float(np.mean([p for _, p in self.per_topic.values()]))

    @property
    def map_ci95(self):
        return ci95([ap for ap, _ in self.per_topic.values()])

    @property
    def p20_ci95(self):
        return ci95([p for _, p in self.per_topic.values()])

    def pct(self):
        """(MAP, MAP CI, P@20, P@20 CI) in percent, two decimals."""
        return tuple(round(100.0 * v, 2) for v in
                     (self.map, self.map_ci95, self.p20, self.p20_ci95))


def evaluate_run(run, qrels, k1, b, tag=""):
    return RetrievalReport(per_topic=per_topic_metrics(run, qrels), k1=k1, b=b, tag=tag)


def write_trec_run(run, path, tag="fisherdoc"):
    """Standard 6-column run file: topic Q0 docno rank score tag."""
    with open(path, "w", encoding="utf-8") as fh:
        for tid in sorted(run):
            for rank, (doc, score) in enumerate(run[tid], start=1):
                fh.write(f"{tid} Q0 {doc} {rank} {score:.6f} {tag}\n")
