import logging

import numpy as np
import pytest
from conftest import corpus_from_token_lists as make_corpus

from fisherdoc.baselines import LdaError, fit_lda, infer_lda, infer_lda_corpus


@pytest.fixture(scope="module")
def disjoint_corpus():
    # two planted topics with disjoint vocabularies
    rng = np.random.default_rng(0)
    va = [f"a{i}" for i in range(8)]
    vb = [f"b{i}" for i in range(8)]
    lists = []
    for i in range(30):
        src = va if i % 2 == 0 else vb
        lists.append(list(rng.choice(src, 20)))
    return make_corpus(lists)


@pytest.fixture(scope="module")
def disjoint_model(disjoint_corpus):
    return fit_lda(disjoint_corpus, d=2, passes=40, seed=3)


class TestFit:
    def test_topic_word_row_stochastic(self, disjoint_model):
        sums = disjoint_model.topic_word.sum(axis=1)
        np.testing.assert_allclose(sums, 1.0, atol=1e-9)

    def test_planted_topics_recovered(self, disjoint_model):
        # each recovered topic should put >90% of its mass on one vocabulary half
        terms = disjoint_model.terms
        a_cols = [i for i, t in enumerate(terms) if t.startswith("a")]
        b_cols = [i for i, t in enumerate(terms) if t.startswith("b")]
        tw = disjoint_model.topic_word
        purity = [max(tw[k, a_cols].sum(), tw[k, b_cols].sum()) for k in range(2)]
        assert min(purity) > 0.9

    def test_ll_trace_trends_upward(self, disjoint_model):
        trace = np.asarray(disjoint_model.ll_trace)
        assert len(trace) == disjoint_model.passes
        assert np.all(np.isfinite(trace))
        # Gibbs is stochastic, so compare 5-pass window means rather than steps
        head = trace[:5].mean()
        tail = trace[-5:].mean()
        assert tail > head

    def test_deterministic_given_seed(self, disjoint_corpus):
        m1 = fit_lda(disjoint_corpus, d=2, passes=20, seed=9)
        m2 = fit_lda(disjoint_corpus, d=2, passes=20, seed=9)
        np.testing.assert_array_equal(m1.topic_word, m2.topic_word)
        np.testing.assert_array_equal(m1.ll_trace, m2.ll_trace)

    def test_seed_changes_result(self, disjoint_corpus):
        m1 = fit_lda(disjoint_corpus, d=2, passes=20, seed=1)
        m2 = fit_lda(disjoint_corpus, d=2, passes=20, seed=2)
        assert not np.array_equal(m1.topic_word, m2.topic_word)

    def test_default_alpha_is_one_over_k(self, disjoint_corpus):
        m = fit_lda(disjoint_corpus, d=2, passes=20, seed=0)
        assert m.alpha == pytest.approx(0.5)
        assert m.beta == pytest.approx(0.01)

    def test_pass_bounds_enforced(self, disjoint_corpus):
        with pytest.raises(LdaError):
            fit_lda(disjoint_corpus, d=2, passes=10)
        with pytest.raises(LdaError):
            fit_lda(disjoint_corpus, d=2, passes=101)

    def test_k_lower_bound(self, disjoint_corpus):
        with pytest.raises(LdaError):
            fit_lda(disjoint_corpus, d=1)


class TestInfer:
    def test_theta_on_simplex(self, disjoint_model, disjoint_corpus):
        theta = infer_lda_corpus(disjoint_model, disjoint_corpus, seed=0)
        assert theta.shape == (30, 2)
        np.testing.assert_allclose(theta.sum(axis=1), 1.0, atol=1e-9)
        assert theta.min() >= 0

    def test_pure_doc_concentrates(self, disjoint_model):
        theta = infer_lda(disjoint_model, ["a0"] * 30, seed=0)
        assert theta.max() > 0.9

    def test_opposite_docs_diverge(self, disjoint_model):
        ta = infer_lda(disjoint_model, ["a1"] * 25, seed=0)
        tb = infer_lda(disjoint_model, ["b1"] * 25, seed=0)
        assert np.argmax(ta) != np.argmax(tb)

    def test_all_oov_uniform_with_warning(self, disjoint_model, caplog):
        with caplog.at_level(logging.WARNING, logger="fisherdoc"):
            theta = infer_lda(disjoint_model, ["zzz"], seed=0)
        assert any("uniform" in r.message for r in caplog.records)
        np.testing.assert_allclose(theta, 0.5, atol=1e-12)

    def test_empty_doc_uniform_with_warning(self, disjoint_model, caplog):
        with caplog.at_level(logging.WARNING, logger="fisherdoc"):
            theta = infer_lda(disjoint_model, [], seed=0)
        assert any("uniform" in r.message for r in caplog.records)
        np.testing.assert_allclose(theta, 0.5, atol=1e-12)

    def test_infer_deterministic(self, disjoint_model):
        t1 = infer_lda(disjoint_model, ["a0", "b0", "a1"], seed=7)
        t2 = infer_lda(disjoint_model, ["a0", "b0", "a1"], seed=7)
        np.testing.assert_array_equal(t1, t2)
