import logging
import math

import numpy as np
import pytest
from scipy import special

from fisherdoc.container import ContainerError
from fisherdoc.mixtures import (
    KAPPA_CAP,
    KAPPA_FLOOR,
    GaussianMixture,
    MixtureError,
    VmfMixture,
    estimate_kappa,
    fit_gmm,
    fit_movmf,
    load_mixture,
    log_bessel_i,
    log_vmf_normalizer,
    mixture_fitting_set,
    responsibilities,
    responsibilities_batch,
    save_mixture,
    unit_rows,
)


class TestKappa:
    def test_banerjee_oracle(self):
        # (0.5*50 - 0.125) / (1 - 0.25) = 24.875 / 0.75
        assert estimate_kappa(0.5, 50) == pytest.approx(24.875 / 0.75, rel=1e-12)
        assert estimate_kappa(0.5, 50) == pytest.approx(33.16666666, abs=1e-6)

    def test_zero_resultant_clamps_to_floor(self):
        assert estimate_kappa(0.0, 50) == KAPPA_FLOOR

    def test_high_resultant_below_cap(self):
        k = estimate_kappa(0.999, 50)
        assert 1000 < k <= KAPPA_CAP

    def test_r_bar_one_clamps_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="fisherdoc"):
            k = estimate_kappa(1.0, 10)
        assert k == KAPPA_CAP
        assert any("clamp" in r.message for r in caplog.records)

    def test_negative_rejected(self):
        with pytest.raises(MixtureError):
            estimate_kappa(-0.1, 10)

    def test_newton_refinement_improves_bessel_ratio(self):
        # exact condition: A_d(kappa) = r_bar with A_d = I_{d/2}/I_{d/2-1}
        r_bar, d = 0.4, 8
        plain = estimate_kappa(r_bar, d)
        refined = estimate_kappa(r_bar, d, newton_refine=True)

        def ratio(k):
            return special.ive(d / 2, k) / special.ive(d / 2 - 1, k)

        assert abs(ratio(refined) - r_bar) <= abs(ratio(plain) - r_bar)


class TestLogBessel:
    def test_matches_scipy_moderate(self):
        for nu, x in [(0, 0.5), (0, 10.0), (1.5, 3.0), (24.0, 80.0), (49.5, 100.0)]:
            expected = math.log(special.ive(nu, x)) + x
            assert log_bessel_i(nu, x) == pytest.approx(expected, rel=1e-12)

    def test_finite_over_required_domain(self):
        for d in [2, 3, 10, 50, 512, 1024]:
            for kappa in [KAPPA_FLOOR, 1e-3, 1.0, 33.0, 1e3, KAPPA_CAP]:
                assert np.isfinite(log_vmf_normalizer(d, kappa))

    def test_normalizer_d3_closed_form(self):
        # C_3(k) = k / (4 pi sinh k)
        for kappa in [0.5, 2.0, 10.0, 50.0]:
            closed = math.log(kappa) - math.log(4 * math.pi) - (
                kappa + math.log1p(-math.exp(-2 * kappa)) - math.log(2))
            assert log_vmf_normalizer(3, kappa) == pytest.approx(closed, rel=1e-10)


class TestFitGmm:
    def test_k1_closed_form(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((120, 4)) * [1, 2, 3, 4] + [5, 6, 7, 8]
        g = fit_gmm(X, K=1, n_init=1, seed=0)
        np.testing.assert_allclose(g.means[0], X.mean(axis=0), atol=1e-9)
        np.testing.assert_allclose(g.variances[0], X.var(axis=0), atol=1e-9)
        assert g.weights[0] == pytest.approx(1.0)

    def test_two_blobs_recovered(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((200, 3)) * 0.3 + 4.0
        b = rng.standard_normal((200, 3)) * 0.3 - 4.0
        g = fit_gmm(np.vstack([a, b]), K=2, n_init=3, seed=0)
        centers = g.means[np.argsort(g.means[:, 0])]
        assert np.abs(centers[0] - b.mean(axis=0)).max() < 0.1
        assert np.abs(centers[1] - a.mean(axis=0)).max() < 0.1

    def test_ll_trace_monotone(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((80, 5))
        g = fit_gmm(X, K=3, n_init=2, seed=0)
        assert np.all(np.diff(g.ll_trace) >= -1e-8)

    def test_invariants(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((60, 4))
        g = fit_gmm(X, K=4, n_init=2, seed=0)
        assert abs(g.weights.sum() - 1.0) <= 1e-9
        assert g.variances.min() >= 1e-6 * (1 - 1e-12)

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((50, 3))
        g1 = fit_gmm(X, K=2, n_init=3, seed=7)
        g2 = fit_gmm(X, K=2, n_init=3, seed=7)
        np.testing.assert_array_equal(g1.means, g2.means)
        np.testing.assert_array_equal(g1.ll_trace, g2.ll_trace)

    def test_too_few_points_rejected(self):
        with pytest.raises(MixtureError):
            fit_gmm(np.zeros((10, 2)), K=15)

    def test_weighted_matches_repetition(self):
        # weighting a point by 3 must equal repeating it 3 times
        rng = np.random.default_rng(5)
        X = rng.standard_normal((30, 2))
        w = np.ones(30)
        w[4] = 3.0
        Xrep = np.vstack([X, X[4], X[4]])
        g_w = fit_gmm(X, K=1, n_init=1, seed=0, weights=w)
        g_r = fit_gmm(Xrep, K=1, n_init=1, seed=0)
        np.testing.assert_allclose(g_w.means, g_r.means, atol=1e-9)
        np.testing.assert_allclose(g_w.variances, g_r.variances, atol=1e-9)


class TestFitMovmf:
    def test_k1_recovers_direction(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((300, 5)) * 0.1
        X[:, 0] += 1.0
        v = fit_movmf(X, K=1, n_init=2, seed=0)
        assert v.mean_directions[0, 0] > 0.99

    def test_antipodal_pairs_low_kappa(self):
        rng = np.random.default_rng(1)
        half = rng.standard_normal((100, 4))
        X = np.vstack([half, -half])  # perfect symmetry, zero resultant
        v = fit_movmf(X, K=1, n_init=1, seed=0)
        assert v.kappas[0] < 0.2

    def test_ll_trace_monotone(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((90, 6))
        v = fit_movmf(X, K=3, n_init=2, seed=0)
        assert np.all(np.diff(v.ll_trace) >= -1e-8)

    def test_invariants(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((70, 5))
        v = fit_movmf(X, K=4, n_init=2, seed=0)
        assert abs(v.weights.sum() - 1.0) <= 1e-9
        np.testing.assert_allclose(np.linalg.norm(v.mean_directions, axis=1), 1.0, atol=1e-9)
        assert v.kappas.min() > 0 and v.kappas.max() <= KAPPA_CAP

    def test_all_identical_points_capped_with_warning(self, caplog):
        X = np.tile([0.6, 0.8], (20, 1))
        with caplog.at_level(logging.WARNING, logger="fisherdoc"):
            v = fit_movmf(X, K=2, n_init=1, seed=0)
        assert any("identical" in r.message for r in caplog.records)
        np.testing.assert_allclose(v.kappas, KAPPA_CAP)
        np.testing.assert_allclose(v.mean_directions, [[0.6, 0.8], [0.6, 0.8]], atol=1e-12)

    def test_zero_rows_dropped(self, caplog):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((40, 3))
        X[5] = 0.0
        with caplog.at_level(logging.WARNING, logger="fisherdoc"):
            v = fit_movmf(X, K=2, n_init=1, seed=0)
        assert any("zero vectors" in r.message for r in caplog.records)
        assert v.K == 2

    def test_two_directional_clusters(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((150, 4)) * 0.1 + np.array([1, 0, 0, 0])
        b = rng.standard_normal((150, 4)) * 0.1 + np.array([0, 0, 0, 1])
        v = fit_movmf(np.vstack([a, b]), K=2, n_init=3, seed=0)
        # each target direction matched by some component
        cos_a = (v.mean_directions @ np.array([1, 0, 0, 0.0])).max()
        cos_b = (v.mean_directions @ np.array([0, 0, 0, 1.0])).max()
        assert cos_a > 0.95 and cos_b > 0.95


class TestResponsibilities:
    def test_k1_is_one(self):
        g = GaussianMixture(np.array([1.0]), np.zeros((1, 3)), np.ones((1, 3)))
        np.testing.assert_allclose(responsibilities(g, np.array([5.0, 1.0, -2.0])), [1.0])

    def test_symmetric_equidistant_half(self):
        g = GaussianMixture(
            np.array([0.5, 0.5]),
            np.array([[-1.0, 0.0], [1.0, 0.0]]),
            np.ones((2, 2)),
        )
        np.testing.assert_allclose(responsibilities(g, np.array([0.0, 3.0])), [0.5, 0.5],
                                   atol=1e-12)

    def test_hand_built_density_ratio(self):
        # two unit-variance 1-d Gaussians at 0 and 2, weights 0.3/0.7, x = 0.5
        g = GaussianMixture(
            np.array([0.3, 0.7]),
            np.array([[0.0], [2.0]]),
            np.ones((2, 1)),
        )
        x = 0.5
        p0 = 0.3 * math.exp(-0.5 * x ** 2)
        p1 = 0.7 * math.exp(-0.5 * (x - 2.0) ** 2)
        expected = np.array([p0, p1]) / (p0 + p1)
        np.testing.assert_allclose(responsibilities(g, np.array([x])), expected, atol=1e-12)

    def test_rows_sum_to_one_both_families(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((50, 4))
        g = fit_gmm(X, K=3, n_init=1, seed=0)
        v = fit_movmf(X, K=3, n_init=1, seed=0)
        for model in (g, v):
            R = responsibilities_batch(model, X)
            assert R.min() >= 0
            np.testing.assert_allclose(R.sum(axis=1), 1.0, atol=1e-9)

    def test_vmf_scaling_invariance(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((40, 3))
        v = fit_movmf(X, K=2, n_init=1, seed=0)
        x = rng.standard_normal(3)
        r1 = responsibilities(v, x)
        r2 = responsibilities(v, 37.5 * x)
        np.testing.assert_allclose(r1, r2, atol=1e-12)

    def test_extreme_kappa_log_space_stable(self):
        v = VmfMixture(
            np.array([0.5, 0.5]),
            np.array([[1.0, 0.0], [-1.0, 0.0]]),
            np.array([KAPPA_CAP, KAPPA_FLOOR]),
        )
        r = responsibilities(v, np.array([0.3, 0.4]))
        assert np.all(np.isfinite(r))
        assert r.sum() == pytest.approx(1.0, abs=1e-9)


class TestFittingSet:
    def test_unique_mode(self):
        from fisherdoc.embeddings import EmbeddingMatrix

        emb = EmbeddingMatrix(terms=["a", "b"], vectors=np.eye(2))
        X, w = mixture_fitting_set(emb)
        np.testing.assert_array_equal(X, np.eye(2))
        assert w is None

    def test_weighted_mode(self):
        from fisherdoc.embeddings import EmbeddingMatrix

        emb = EmbeddingMatrix(terms=["a", "b"], vectors=np.eye(2))
        X, w = mixture_fitting_set(emb, vocab_counts={"a": 3, "b": 5}, mode="weighted")
        np.testing.assert_array_equal(w, [3.0, 5.0])

    def test_weighted_mode_needs_counts(self):
        from fisherdoc.embeddings import EmbeddingMatrix

        emb = EmbeddingMatrix(terms=["a"], vectors=np.eye(1))
        with pytest.raises(MixtureError):
            mixture_fitting_set(emb, mode="weighted")


class TestSerialization:
    def test_gmm_round_trip(self, tmp_path):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((40, 3))
        g = fit_gmm(X, K=2, n_init=1, seed=0)
        p = tmp_path / "gmm.fdv"
        save_mixture(g, p)
        back = load_mixture(p)
        assert isinstance(back, GaussianMixture)
        np.testing.assert_array_equal(back.weights, g.weights)
        np.testing.assert_array_equal(back.means, g.means)
        np.testing.assert_array_equal(back.variances, g.variances)
        assert back.log_likelihood == g.log_likelihood
        np.testing.assert_array_equal(back.ll_trace, g.ll_trace)

    def test_vmf_round_trip(self, tmp_path):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((40, 3))
        v = fit_movmf(X, K=2, n_init=1, seed=0)
        p = tmp_path / "vmf.fdv"
        save_mixture(v, p)
        back = load_mixture(p)
        assert isinstance(back, VmfMixture)
        np.testing.assert_array_equal(back.mean_directions, v.mean_directions)
        np.testing.assert_array_equal(back.kappas, v.kappas)

    def test_family_tag_bytes(self, tmp_path):
        rng = np.random.default_rng(10)
        X = rng.standard_normal((40, 3))
        p = tmp_path / "m.fdv"
        save_mixture(fit_gmm(X, K=2, n_init=1, seed=0), p)
        assert p.read_bytes()[4] == 0x01
        save_mixture(fit_movmf(X, K=2, n_init=1, seed=0), p)
        assert p.read_bytes()[4] == 0x02

    def test_wrong_kind_rejected(self, tmp_path):
        from fisherdoc.container import KIND_TFIDF, write_container

        p = tmp_path / "x.fdv"
        write_container(p, KIND_TFIDF, {"a": np.zeros(1)}, {})
        with pytest.raises((MixtureError, ContainerError)):
            load_mixture(p)


class TestUnitRows:
    def test_normalizes(self):
        X = np.array([[3.0, 4.0], [0.0, 2.0]])
        U = unit_rows(X)
        np.testing.assert_allclose(np.linalg.norm(U, axis=1), 1.0)

    def test_strict_mode_rejects_zero(self):
        with pytest.raises(MixtureError):
            unit_rows(np.array([[0.0, 0.0]]), drop_zero=False)
