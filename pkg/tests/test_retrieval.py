import logging
import math

import numpy as np
import pytest

from fisherdoc.corpus.trec import Topic, TrecCollection
from fisherdoc.retrieval import (
    IndexError_,
    average_precision,
    b_grid,
    bm25_search,
    build_index,
    ci95,
    evaluate_run,
    fuse,
    grid_scan,
    k1_grid,
    load_index,
    map_metric,
    minmax_normalize,
    p_at_20,
    precision_at,
    save_index,
    write_trec_run,
)

NO_STOP = frozenset()


@pytest.fixture
def two_doc_index():
    return build_index({"d1": "Cat cat dog!", "d2": "cat mouse"}, stopwords=NO_STOP)


class TestBuildIndex:
    def test_hand_counted_postings(self, two_doc_index):
        ix = two_doc_index
        assert ix.doc_ids == ["d1", "d2"]
        assert ix.terms == ["cat", "dog", "mouse"]
        np.testing.assert_array_equal(ix.doc_lengths, [3, 2])
        assert ix.avgdl == 2.5
        # cat postings: (d1, 2), (d2, 1)
        v = ix.term_index["cat"]
        s, e = ix.term_starts[v], ix.term_starts[v + 1]
        np.testing.assert_array_equal(ix.post_docs[s:e], [0, 1])
        np.testing.assert_array_equal(ix.post_tfs[s:e], [2.0, 1.0])
        assert ix.doc_frequency("cat") == 2
        assert ix.doc_frequency("dog") == 1
        assert ix.doc_frequency("zzz") == 0

    def test_empty_collection_rejected(self):
        with pytest.raises(IndexError_, match="empty"):
            build_index({})

    def test_duplicate_ids_rejected(self):
        with pytest.raises(IndexError_, match="duplicate"):
            build_index([("d1", "a"), ("d1", "b")], stopwords=NO_STOP)

    def test_reindex_identical(self, two_doc_index):
        other = build_index({"d1": "Cat cat dog!", "d2": "cat mouse"}, stopwords=NO_STOP)
        assert other.terms == two_doc_index.terms
        np.testing.assert_array_equal(other.post_docs, two_doc_index.post_docs)
        np.testing.assert_array_equal(other.post_tfs, two_doc_index.post_tfs)

    def test_stopword_pipeline_applied(self):
        ix = build_index({"d1": "the cat and the dog"})
        assert "the" not in ix.terms
        assert "cat" in ix.terms

    def test_round_trip(self, two_doc_index, tmp_path):
        p = tmp_path / "ix.fdv"
        save_index(two_doc_index, p)
        back = load_index(p)
        assert back.doc_ids == two_doc_index.doc_ids
        assert back.terms == two_doc_index.terms
        np.testing.assert_array_equal(back.post_tfs, two_doc_index.post_tfs)
        np.testing.assert_array_equal(back.doc_lengths, two_doc_index.doc_lengths)


class TestBm25:
    def test_hand_computed_scores(self, two_doc_index):
        # N=2, avgdl=2.5; idf(cat)=ln(1.2)
        res = dict(bm25_search(two_doc_index, ["cat"], k1=1.2, b=0.75))
        idf = math.log(1.2)
        norm1 = 1.2 * (1 - 0.75 + 0.75 * 3 / 2.5)
        norm2 = 1.2 * (1 - 0.75 + 0.75 * 2 / 2.5)
        assert res["d1"] == pytest.approx(idf * 2 / (2 + norm1), abs=1e-9)
        assert res["d2"] == pytest.approx(idf * 1 / (1 + norm2), abs=1e-9)

    def test_k1_zero_binary_scoring(self, two_doc_index):
        res = bm25_search(two_doc_index, ["cat"], k1=0.0, b=0.5)
        idf = math.log(1.2)
        assert [d for d, _ in res] == ["d1", "d2"]  # equal scores, id tie-break
        for _, s in res:
            assert s == pytest.approx(idf, abs=1e-12)

    def test_b_zero_ignores_length(self, two_doc_index):
        res = dict(bm25_search(two_doc_index, ["cat"], k1=1.2, b=0.0))
        # same tf would now give same score regardless of dl
        assert res["d2"] == pytest.approx(math.log(1.2) * 1 / (1 + 1.2), abs=1e-12)

    def test_multi_term_additive(self, two_doc_index):
        both = dict(bm25_search(two_doc_index, ["cat", "dog"], k1=1.2, b=0.75))
        cat = dict(bm25_search(two_doc_index, ["cat"], k1=1.2, b=0.75))
        dog = dict(bm25_search(two_doc_index, ["dog"], k1=1.2, b=0.75))
        assert both["d1"] == pytest.approx(cat["d1"] + dog["d1"], abs=1e-12)

    def test_oov_query_empty_with_warning(self, two_doc_index, caplog):
        with caplog.at_level(logging.WARNING, logger="fisherdoc"):
            res = bm25_search(two_doc_index, ["zebra"])
        assert res == []
        assert any("no indexed terms" in r.message for r in caplog.records)

    def test_tf_monotonicity(self):
        # more matches of a query term never lowers the score
        ix = build_index({"d1": "cat dog dog", "d2": "cat cat dog"}, stopwords=NO_STOP)
        res = dict(bm25_search(ix, ["cat"], k1=1.2, b=0.75))
        assert res["d2"] > res["d1"]

    def test_top_limits_results(self):
        docs = {f"d{i:02d}": "cat" for i in range(30)}
        ix = build_index(docs, stopwords=NO_STOP)
        res = bm25_search(ix, ["cat"], top=10)
        assert len(res) == 10
        assert [d for d, _ in res] == sorted(docs)[:10]  # ties -> id ascending

    def test_param_bounds(self, two_doc_index):
        with pytest.raises(ValueError):
            bm25_search(two_doc_index, ["cat"], k1=-0.1)
        with pytest.raises(ValueError):
            bm25_search(two_doc_index, ["cat"], b=1.5)


class TestGrid:
    def test_grid_values(self):
        ks, bs = k1_grid(), b_grid()
        assert len(ks) == 61 and ks[0] == 0.0 and ks[-1] == 3.0
        assert len(bs) == 21 and bs[0] == 0.0 and bs[-1] == 1.0
        assert 1.2 in ks and 0.75 in bs

    def test_surface_cell_count_and_best(self):
        docs = {"d1": "apple banana banana", "d2": "apple cherry", "d3": "banana"}
        topics = [Topic("1", "banana", "")]
        qrels = {("1", "d1"): 1, ("1", "d3"): 1, ("1", "d2"): 0}
        coll = TrecCollection(docs=[], topics=topics, qrels=qrels)
        ix = build_index(docs, stopwords=NO_STOP)
        out = grid_scan(ix, coll, k1_values=[0.0, 1.2], b_values=[0.0, 0.75],
                        fields="title")
        assert out["n_cells"] == 4
        assert out["default"]["k1"] == 1.2 and out["default"]["b"] == 0.75
        assert out["best"]["map"] >= out["default"]["map"]
        assert out["best"]["map"] >= max(c["map"] for c in out["surface"]) - 1e-12


class TestMinmax:
    def test_basic(self):
        np.testing.assert_allclose(minmax_normalize([2, 4, 6]), [0, 0.5, 1])

    def test_single_element(self):
        np.testing.assert_array_equal(minmax_normalize([7.0]), [0.0])

    def test_constant_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger="fisherdoc"):
            out = minmax_normalize([5, 5, 5])
        np.testing.assert_array_equal(out, [0, 0, 0])
        assert any("constant" in r.message for r in caplog.records)

    def test_range(self):
        rng = np.random.default_rng(0)
        out = minmax_normalize(rng.standard_normal(50))
        assert out.min() == 0.0 and out.max() == 1.0


class TestFuse:
    POOL = [("a", 10.0), ("b", 5.0), ("c", 0.0)]
    VECS = {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0]),
            "c": np.array([1.0, 1.0]) / math.sqrt(2)}
    Q = np.array([1.0, 0.0])

    def test_hand_computed_order(self):
        ranked, missing = fuse(self.POOL, self.VECS, self.Q, lam=0.5)
        # bm25 norm: a=1, b=.5, c=0; cos: a=1, b=0, c=.7071 -> norm same
        # fused: a=1.0, b=0.25, c=0.35355
        assert [d for d, _ in ranked] == ["a", "c", "b"]
        scores = dict(ranked)
        assert scores["a"] == pytest.approx(1.0, abs=1e-9)
        assert scores["b"] == pytest.approx(0.25, abs=1e-9)
        assert scores["c"] == pytest.approx(0.5 * (1 / math.sqrt(2)), abs=1e-9)
        assert missing == 0

    def test_lambda_one_is_bm25_order(self):
        ranked, _ = fuse(self.POOL, self.VECS, self.Q, lam=1.0)
        assert [d for d, _ in ranked] == ["a", "b", "c"]

    def test_lambda_zero_is_cosine_order(self):
        ranked, _ = fuse(self.POOL, self.VECS, self.Q, lam=0.0)
        assert [d for d, _ in ranked] == ["a", "c", "b"]

    def test_missing_vector_counted(self, caplog):
        vecs = {"a": np.array([1.0, 0.0])}
        with caplog.at_level(logging.WARNING, logger="fisherdoc"):
            ranked, missing = fuse(self.POOL, vecs, self.Q, lam=0.5)
        assert missing == 2
        assert any("no vector" in r.message for r in caplog.records)

    def test_lambda_one_ties_keep_id_order(self):
        pool = [("x", 3.0), ("y", 3.0), ("z", 3.0)]
        ranked, _ = fuse(pool, {}, np.array([1.0]), lam=1.0)
        assert [d for d, _ in ranked] == ["x", "y", "z"]

    def test_empty_pool(self):
        ranked, missing = fuse([], self.VECS, self.Q)
        assert ranked == [] and missing == 0

    def test_bad_lambda(self):
        with pytest.raises(ValueError):
            fuse(self.POOL, self.VECS, self.Q, lam=1.5)


class TestMetrics:
    def test_ap_interleaved(self):
        # [rel, nonrel, rel], 2 relevant total -> (1 + 2/3)/2
        assert average_precision(["r1", "n1", "r2"], {"r1", "r2"}) == pytest.approx(5 / 6)

    def test_ap_all_top(self):
        assert average_precision(["r1", "r2", "n"], {"r1", "r2"}) == pytest.approx(1.0)

    def test_ap_counts_unretrieved(self):
        # 3 relevant, only 1 retrieved at rank 1 -> AP = 1/3
        assert average_precision(["r1"], {"r1", "r2", "r3"}) == pytest.approx(1 / 3)

    def test_p20_short_list(self):
        assert precision_at(["r1", "n1"], {"r1"}, k=20) == pytest.approx(1 / 20)

    def test_map_excludes_topics_without_relevant(self):
        run = {"1": [("r", 1.0)], "2": [("x", 1.0)]}
        qrels = {("1", "r"): 1, ("2", "x"): 0}
        assert map_metric(run, qrels) == pytest.approx(1.0)

    def test_map_p20_means(self):
        run = {"1": [("a", 2.0), ("b", 1.0)], "2": [("c", 2.0), ("d", 1.0)]}
        qrels = {("1", "a"): 1, ("2", "d"): 1}
        # topic1 AP=1, topic2 AP=1/2
        assert map_metric(run, qrels) == pytest.approx(0.75)
        assert p_at_20(run, qrels) == pytest.approx(1 / 20)

    def test_ci95_constant_zero(self):
        assert ci95([0.4, 0.4, 0.4]) == 0.0

    def test_ci95_known_value(self):
        from scipy import stats

        expected = stats.t.ppf(0.975, 2) * 1.0 / math.sqrt(3)
        assert ci95([1.0, 2.0, 3.0]) == pytest.approx(expected, rel=1e-12)

    def test_ci95_singleton(self):
        assert ci95([0.7]) == 0.0

    def test_report_pct(self):
        run = {"1": [("a", 2.0)], "2": [("b", 1.0)]}
        qrels = {("1", "a"): 1, ("2", "b"): 1}
        rep = evaluate_run(run, qrels, k1=1.2, b=0.75)
        m, m_ci, p, p_ci = rep.pct()
        assert m == 100.0
        assert p == 5.0

    def test_write_trec_run(self, tmp_path):
        run = {"2": [("db", 0.5)], "1": [("da", 1.5), ("dc", 0.25)]}
        p = tmp_path / "run.txt"
        write_trec_run(run, p, tag="probe")
        lines = p.read_text().splitlines()
        assert lines == [
            "1 Q0 da 1 1.500000 probe",
            "1 Q0 dc 2 0.250000 probe",
            "2 Q0 db 1 0.500000 probe",
        ]
