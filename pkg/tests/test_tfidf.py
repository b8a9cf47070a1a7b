import math

import numpy as np
import pytest
from conftest import corpus_from_token_lists as make_corpus

from fisherdoc.baselines import TfidfError, fit_tfidf, transform_tfidf, transform_tfidf_corpus


@pytest.fixture
def two_doc_corpus():
    return make_corpus([["a", "b"], ["a"]])


class TestFit:
    def test_smooth_idf_values(self, two_doc_corpus):
        model = fit_tfidf(two_doc_corpus)
        idf = dict(zip(model.vocab, model.idf))
        assert idf["a"] == pytest.approx(math.log(3 / 3) + 1, abs=1e-12)
        assert idf["b"] == pytest.approx(math.log(3 / 2) + 1, abs=1e-12)

    def test_max_features_selects_top_scorer(self, two_doc_corpus):
        # brute force: score(t) = max_d tf(t,d) * idf(t) over both terms
        idf_a = math.log(3 / 3) + 1
        idf_b = math.log(3 / 2) + 1
        scores = {"a": 1 * idf_a, "b": 1 * idf_b}
        best = max(sorted(scores), key=lambda t: scores[t])
        model = fit_tfidf(two_doc_corpus, max_features=1)
        assert model.vocab == [best] == ["b"]

    def test_rank_by_sum_flag(self):
        # "a" appears 3 times total, "b" twice but with higher idf
        corp = make_corpus([["a", "a", "b"], ["a", "b"], ["c"]])
        by_max = fit_tfidf(corp, max_features=2, rank_by="max")
        by_sum = fit_tfidf(corp, max_features=2, rank_by="sum")
        assert len(by_max.vocab) == len(by_sum.vocab) == 2
        with pytest.raises(TfidfError):
            fit_tfidf(corp, rank_by="median")

    def test_tie_break_lexicographic(self):
        corp = make_corpus([["z", "a"], ["z", "a"]])
        model = fit_tfidf(corp, max_features=1)
        assert model.vocab == ["a"]

    def test_empty_corpus_rejected(self):
        corp = make_corpus([[], []])
        with pytest.raises(TfidfError, match="no tokens"):
            fit_tfidf(corp)


class TestTransform:
    def test_single_term_unit_vector(self, two_doc_corpus):
        model = fit_tfidf(two_doc_corpus)
        v = transform_tfidf(model, ["b"]).toarray().ravel()
        assert np.count_nonzero(v) == 1
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_all_oov_zero_vector(self, two_doc_corpus):
        model = fit_tfidf(two_doc_corpus)
        v = transform_tfidf(model, ["zebra", "yak"])
        assert v.nnz == 0

    def test_two_term_hand_weights(self, two_doc_corpus):
        model = fit_tfidf(two_doc_corpus)
        v = transform_tfidf(model, ["a", "a", "b"]).toarray().ravel()
        idf_a, idf_b = 1.0, math.log(3 / 2) + 1
        raw = np.zeros(2)
        raw[model.term_index["a"]] = 2 * idf_a
        raw[model.term_index["b"]] = 1 * idf_b
        expected = raw / math.sqrt((raw ** 2).sum())
        np.testing.assert_allclose(v, expected, atol=1e-12)

    def test_identical_docs_identical_vectors(self):
        corp = make_corpus([["x", "y"]] * 4)
        model = fit_tfidf(corp)
        X = transform_tfidf_corpus(model, corp).toarray()
        for row in X[1:]:
            np.testing.assert_array_equal(row, X[0])

    def test_norm_invariant(self):
        rng = np.random.default_rng(0)
        vocab = [f"w{i}" for i in range(30)]
        token_lists = [
            list(rng.choice(vocab, size=rng.integers(0, 12)))
            for _ in range(40)
        ]
        token_lists.append(["w0"])  # ensure at least one non-empty
        corp = make_corpus(token_lists)
        model = fit_tfidf(corp, max_features=10)
        X = transform_tfidf_corpus(model, corp)
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        for n in norms:
            assert n == pytest.approx(0.0, abs=1e-12) or n == pytest.approx(1.0, abs=1e-9)

    def test_vocab_cap_respected(self):
        rng = np.random.default_rng(1)
        vocab = [f"t{i:03d}" for i in range(120)]
        corp = make_corpus([list(rng.choice(vocab, 20)) for _ in range(30)])
        model = fit_tfidf(corp, max_features=50)
        assert model.n_features == 50
        X = transform_tfidf_corpus(model, corp)
        assert X.shape[1] == 50
