import numpy as np
import pytest

from sensortopics.errors import ConfigError, DataError
from sensortopics.lda import (
    LdaHyperparams,
    SamplerConfig,
    default_hyperparams,
    fit_hyperparams,
    fold_in,
    load_model,
    log_likelihood,
    save_model,
    train,
)
from sensortopics.words import BowCorpus, BowDocument, Vocabulary


def corpus_from(token_lists, v, labels=None):
    vocab = Vocabulary([f"w{i}" for i in range(v)])
    docs = [
        BowDocument(
            tokens=np.asarray(toks, dtype=np.int32),
            seq_index=i,
            label=None if labels is None else labels[i],
        )
        for i, toks in enumerate(token_lists)
    ]
    return BowCorpus(documents=docs, vocabulary=vocab)


def generated_corpus(rng, K=3, V=30, n_docs=200, doc_len=60, alpha=0.1, beta=0.01):
    """Sample a corpus from the LDA generative process; returns (corpus, phi)."""
    phi = rng.dirichlet([beta] * V, size=K)
    docs = []
    for _ in range(n_docs):
        theta = rng.dirichlet([alpha] * K)
        zs = rng.choice(K, size=doc_len, p=theta)
        words = [rng.choice(V, p=phi[z]) for z in zs]
        docs.append(words)
    return corpus_from(docs, V), phi


def best_permutation_cosines(phi_hat, phi_star):
    """Per-row cosine under the best topic permutation (K small: brute force)."""
    from itertools import permutations

    K = phi_star.shape[0]
    norm = lambda m: m / np.linalg.norm(m, axis=1, keepdims=True)
    a, b = norm(phi_hat), norm(phi_star)
    sim = a @ b.T
    best = None
    for perm in permutations(range(K)):
        cosines = [sim[i, perm[i]] for i in range(K)]
        if best is None or sum(cosines) > sum(best):
            best = cosines
    return best


class TestTrain:
    def test_two_cluster_separability(self):
        corpus = corpus_from([[0] * 50, [1] * 50], v=2)
        hp = LdaHyperparams(K=2, alpha=0.1, beta=0.01)
        model, theta = train(corpus, hp, SamplerConfig(iterations=200, burn_in=100), seed=3)
        phi = model.phi
        tops = [int(np.argmax(phi[k])) for k in range(2)]
        assert sorted(tops) == [0, 1]
        assert all(phi[k].max() >= 0.95 for k in range(2))
        # each document concentrates on its own topic
        assert np.argmax(theta[0]) != np.argmax(theta[1])

    def test_k1_degenerate(self):
        corpus = corpus_from([[0, 1, 2], [2, 2]], v=3)
        hp = LdaHyperparams(K=1, alpha=0.5, beta=0.01)
        _, theta = train(corpus, hp, SamplerConfig(iterations=5, burn_in=1), seed=0)
        np.testing.assert_allclose(theta, np.ones((2, 1)))

    def test_recovers_generator_topics(self):
        rng = np.random.default_rng(42)
        corpus, phi_star = generated_corpus(rng)
        hp = LdaHyperparams(K=3, alpha=0.1, beta=0.01)
        model, _ = train(corpus, hp, SamplerConfig(iterations=300, burn_in=200), seed=7)
        cosines = best_permutation_cosines(model.phi, phi_star)
        assert min(cosines) >= 0.9

    def test_empty_corpus_rejected(self):
        corpus = corpus_from([], v=3)
        with pytest.raises(DataError):
            train(corpus, LdaHyperparams(K=2, alpha=0.1, beta=0.01))

    def test_empty_document_is_legal(self):
        corpus = corpus_from([[0, 1], []], v=2)
        hp = LdaHyperparams(K=2, alpha=0.5, beta=0.01)
        _, theta = train(corpus, hp, SamplerConfig(iterations=10, burn_in=5), seed=1)
        np.testing.assert_allclose(theta[1], [0.5, 0.5])

    def test_bitwise_reproducibility(self):
        rng = np.random.default_rng(5)
        corpus, _ = generated_corpus(rng, n_docs=40, doc_len=30)
        hp = LdaHyperparams(K=3, alpha=0.1, beta=0.01)
        cfg = SamplerConfig(iterations=50, burn_in=20)
        m1, t1 = train(corpus, hp, cfg, seed=13)
        m2, t2 = train(corpus, hp, cfg, seed=13)
        np.testing.assert_array_equal(m1.n_kw, m2.n_kw)
        np.testing.assert_array_equal(t1, t2)

    def test_normalization(self):
        rng = np.random.default_rng(8)
        corpus, _ = generated_corpus(rng, n_docs=30, doc_len=20)
        hp = LdaHyperparams(K=3, alpha=0.1, beta=0.01)
        model, theta = train(corpus, hp, SamplerConfig(iterations=30, burn_in=10), seed=2)
        np.testing.assert_allclose(model.phi.sum(axis=1), 1.0, atol=1e-9)
        np.testing.assert_allclose(theta.sum(axis=1), 1.0, atol=1e-9)
        assert (model.phi > 0).all() and (theta > 0).all()

    def test_sample_averaging_mode(self):
        corpus = corpus_from([[0] * 30, [1] * 30], v=2)
        hp = LdaHyperparams(K=2, alpha=0.1, beta=0.01)
        cfg = SamplerConfig(iterations=100, burn_in=50, sample_lag=10)
        model, theta = train(corpus, hp, cfg, seed=4)
        np.testing.assert_allclose(model.phi.sum(axis=1), 1.0, atol=1e-9)
        assert model.phi.max() > 0.9

    def test_invalid_hyperparams(self):
        with pytest.raises(ConfigError):
            LdaHyperparams(K=0, alpha=0.1, beta=0.1)
        with pytest.raises(ConfigError):
            LdaHyperparams(K=2, alpha=0.0, beta=0.1)
        with pytest.raises(ConfigError):
            SamplerConfig(iterations=5, burn_in=5)


class TestCountConservation:
    def test_invariants_after_every_sweep(self):
        from sensortopics import _kernels

        rng = np.random.default_rng(3)
        corpus, _ = generated_corpus(rng, n_docs=20, doc_len=25)
        K, V = 3, len(corpus.vocabulary)
        doc_lens = np.asarray([len(d.tokens) for d in corpus.documents])
        tokens = np.concatenate([d.tokens for d in corpus.documents]).astype(np.int32)
        doc_ids = np.repeat(np.arange(len(doc_lens), dtype=np.int32), doc_lens)
        n_dk = np.zeros((len(doc_lens), K), dtype=np.int32)
        n_kw = np.zeros((K, V), dtype=np.int32)
        n_k = np.zeros(K, dtype=np.int32)
        z = np.zeros(len(tokens), dtype=np.int32)
        state = _kernels.init_assignments(tokens, doc_ids, z, n_dk, n_kw, n_k, 9)
        for _ in range(10):
            state = _kernels.sweep_train(
                tokens, doc_ids, z, n_dk, n_kw, n_k, 0.1, 0.01, state
            )
            np.testing.assert_array_equal(n_dk.sum(axis=1), doc_lens)
            np.testing.assert_array_equal(n_kw.sum(axis=1), n_k)
            assert n_k.sum() == len(tokens)
            assert (n_dk >= 0).all() and (n_kw >= 0).all()


class TestFoldIn:
    @pytest.fixture
    def model(self):
        corpus = corpus_from([[0] * 40 + [2] * 5, [1] * 40 + [2] * 5], v=3)
        hp = LdaHyperparams(K=2, alpha=0.1, beta=0.01)
        model, _ = train(corpus, hp, SamplerConfig(iterations=150, burn_in=50), seed=6)
        return model

    def test_single_word_document_matches_phi_argmax(self, model):
        phi = model.phi
        for w in range(2):
            doc = np.full(20, w, dtype=np.int32)
            theta = fold_in(model, doc, SamplerConfig(iterations=100, burn_in=0), seed=1)
            assert int(np.argmax(theta)) == int(np.argmax(phi[:, w]))

    def test_empty_document_uniform(self, model):
        with pytest.warns(UserWarning):
            theta = fold_in(model, np.empty(0, dtype=np.int32), seed=0)
        np.testing.assert_allclose(theta, [0.5, 0.5])

    def test_deterministic(self, model):
        doc = np.asarray([0, 1, 0, 2, 0], dtype=np.int32)
        cfg = SamplerConfig(iterations=50, burn_in=0)
        t1 = fold_in(model, doc, cfg, seed=77)
        t2 = fold_in(model, doc, cfg, seed=77)
        np.testing.assert_array_equal(t1, t2)

    def test_model_unchanged(self, model):
        before = model.n_kw.copy()
        fold_in(model, np.asarray([0, 1], dtype=np.int32),
                SamplerConfig(iterations=20, burn_in=0), seed=5)
        np.testing.assert_array_equal(model.n_kw, before)

    def test_order_independence_with_derived_seeds(self, model):
        from sensortopics._rng import derive_seed

        docs = [np.asarray(d, dtype=np.int32) for d in ([0, 0, 2], [1, 1], [0, 1, 2])]
        cfg = SamplerConfig(iterations=30, burn_in=0)
        thetas = {
            i: fold_in(model, doc, cfg, seed=derive_seed(9, "foldin", i))
            for i, doc in enumerate(docs)
        }
        for i in reversed(range(3)):
            again = fold_in(model, docs[i], cfg, seed=derive_seed(9, "foldin", i))
            np.testing.assert_array_equal(thetas[i], again)


class TestLogLikelihood:
    def test_single_token_formula(self):
        corpus = corpus_from([[0]], v=2)
        hp = LdaHyperparams(K=1, alpha=1.0, beta=0.01)
        model, theta = train(corpus, hp, SamplerConfig(iterations=2, burn_in=1), seed=0)
        expected = float(np.log(model.phi[0, 0]))
        assert log_likelihood(model, corpus, theta) == pytest.approx(expected)

    def test_doubling_corpus_doubles_value(self):
        rng = np.random.default_rng(10)
        corpus, _ = generated_corpus(rng, n_docs=10, doc_len=15)
        hp = LdaHyperparams(K=2, alpha=0.1, beta=0.01)
        model, theta = train(corpus, hp, SamplerConfig(iterations=20, burn_in=10), seed=3)
        doubled = corpus_from(
            [list(d.tokens) for d in corpus.documents] * 2, len(corpus.vocabulary)
        )
        theta2 = np.vstack([theta, theta])
        assert log_likelihood(model, doubled, theta2) == pytest.approx(
            2 * log_likelihood(model, corpus, theta)
        )

    def test_matched_k_beats_k1(self):
        rng = np.random.default_rng(11)
        corpus, _ = generated_corpus(rng, n_docs=100, doc_len=40)
        cfg = SamplerConfig(iterations=150, burn_in=100)
        m3, t3 = train(corpus, LdaHyperparams(K=3, alpha=0.1, beta=0.01), cfg, seed=1)
        m1, t1 = train(corpus, LdaHyperparams(K=1, alpha=0.1, beta=0.01), cfg, seed=1)
        assert log_likelihood(m3, corpus, t3) > log_likelihood(m1, corpus, t1)


class TestFitHyperparams:
    def test_disabled_passthrough(self):
        corpus = corpus_from([[0, 1]], v=2)
        hp = fit_hyperparams(corpus, K=2, enabled=False)
        assert hp == default_hyperparams(2)

    def test_sparse_corpus_shrinks_alpha(self):
        corpus = corpus_from([[0] * 50] * 5 + [[1] * 50] * 5, v=2)
        hp = fit_hyperparams(corpus, K=2, seed=4)
        assert hp.alpha < default_hyperparams(2).alpha

    def test_deterministic(self):
        corpus = corpus_from([[0] * 30, [1] * 30, [0, 1] * 10], v=2)
        a = fit_hyperparams(corpus, K=2, seed=9)
        b = fit_hyperparams(corpus, K=2, seed=9)
        assert a == b


class TestSerialization:
    def test_model_roundtrip(self, tmp_path):
        rng = np.random.default_rng(14)
        corpus, _ = generated_corpus(rng, n_docs=20, doc_len=15)
        hp = LdaHyperparams(K=3, alpha=0.1, beta=0.01)
        model, _ = train(corpus, hp, SamplerConfig(iterations=20, burn_in=10), seed=5)
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path, corpus.vocabulary)
        np.testing.assert_array_equal(loaded.n_kw, model.n_kw)
        np.testing.assert_array_equal(loaded.n_k, model.n_k)
        np.testing.assert_allclose(loaded.phi, model.phi)
        assert loaded.hyperparams == model.hyperparams

    def test_vocab_hash_guard(self, tmp_path):
        rng = np.random.default_rng(15)
        corpus, _ = generated_corpus(rng, n_docs=10, doc_len=10)
        hp = LdaHyperparams(K=2, alpha=0.1, beta=0.01)
        model, _ = train(corpus, hp, SamplerConfig(iterations=5, burn_in=1), seed=5)
        path = tmp_path / "model.json"
        save_model(model, path)
        other_vocab = Vocabulary(["a", "b", "c"])
        with pytest.raises(DataError):
            load_model(path, other_vocab)
