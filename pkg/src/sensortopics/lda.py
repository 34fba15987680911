"""LDA training by collapsed Gibbs sampling and fold-in inference for unseen
documents.

The per-token conditional is the standard collapsed form
``p(z_i = k) ∝ (n_dk + α) · (n_kw + β) / (n_k + V·β)`` with the token's own
assignment removed from the counts. Training is one sequential chain; fold-in
resamples only the document's assignments against the frozen topic-word
counts. Results are fully determined by (corpus, hyperparams, sampler config,
seed) regardless of the kernel backend.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import psi

from . import _kernels
from ._gibbs_py import _next_double
from .errors import ConfigError, DataError
from .words import BowCorpus, BowDocument, Vocabulary

_MASK64 = 0xFFFFFFFFFFFFFFFF

ALPHA_MIN, ALPHA_MAX = 1e-6, 1e3


@dataclass(frozen=True)
class LdaHyperparams:
    K: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigError("alpha and beta must be positive")


def default_hyperparams(K: int) -> LdaHyperparams:
    return LdaHyperparams(K=K, alpha=50.0 / K, beta=0.01)


@dataclass(frozen=True)
class SamplerConfig:
    iterations: int = 1000
    burn_in: int = 500
    sample_lag: int = 0  # 0: estimate from the final state; >0: average samples

    def __post_init__(self):
        if self.burn_in < 0 or self.iterations <= self.burn_in:
            raise ConfigError("need iterations > burn_in >= 0")
        if self.sample_lag < 0:
            raise ConfigError("sample_lag must be >= 0")


@dataclass
class LdaModel:
    hyperparams: LdaHyperparams
    vocabulary: Vocabulary
    n_kw: np.ndarray  # (K, V); float64 when sample-averaged, else counts
    n_k: np.ndarray  # (K,)
    sampler: SamplerConfig
    seed: int

    @property
    def phi(self) -> np.ndarray:
        """Row-stochastic (K, V) topic-word distributions with beta smoothing."""
        hp = self.hyperparams
        V = self.n_kw.shape[1]
        return (self.n_kw + hp.beta) / (self.n_k + V * hp.beta)[:, None]


def _flatten(corpus: BowCorpus) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    doc_lens = np.asarray([len(d.tokens) for d in corpus.documents], dtype=np.int64)
    tokens = (
        np.concatenate([d.tokens for d in corpus.documents])
        if doc_lens.sum()
        else np.empty(0, dtype=np.int32)
    ).astype(np.int32)
    doc_ids = np.repeat(
        np.arange(len(doc_lens), dtype=np.int32), doc_lens
    ).astype(np.int32)
    return tokens, doc_ids, doc_lens


def theta_from_counts(
    n_dk: np.ndarray, doc_lens: np.ndarray, alpha: float
) -> np.ndarray:
    K = n_dk.shape[1]
    return (n_dk + alpha) / (doc_lens + K * alpha)[:, None]


def train(
    corpus: BowCorpus,
    hp: LdaHyperparams,
    sampler: SamplerConfig | None = None,
    seed: int = 0,
    backend: str | None = None,
) -> tuple[LdaModel, np.ndarray]:
    """Run one Gibbs chain; returns the model and training-document thetas."""
    if corpus.n_documents == 0:
        raise DataError("cannot train on an empty corpus")
    sampler = sampler or SamplerConfig()
    kern = _kernels.get_backend(backend)
    K, V = hp.K, len(corpus.vocabulary)
    tokens, doc_ids, doc_lens = _flatten(corpus)
    D = len(doc_lens)

    n_dk = np.zeros((D, K), dtype=np.int32)
    n_kw = np.zeros((K, V), dtype=np.int32)
    n_k = np.zeros(K, dtype=np.int32)
    z = np.zeros(len(tokens), dtype=np.int32)

    state = seed & _MASK64
    state = kern.init_assignments(tokens, doc_ids, z, n_dk, n_kw, n_k, state)

    acc_dk = acc_kw = acc_k = None
    n_samples = 0
    for it in range(sampler.iterations):
        state = kern.sweep_train(
            tokens, doc_ids, z, n_dk, n_kw, n_k, hp.alpha, hp.beta, state
        )
        if (
            sampler.sample_lag > 0
            and it >= sampler.burn_in
            and (it - sampler.burn_in) % sampler.sample_lag == 0
        ):
            if acc_dk is None:
                acc_dk = np.zeros((D, K))
                acc_kw = np.zeros((K, V))
                acc_k = np.zeros(K)
            acc_dk += n_dk
            acc_kw += n_kw
            acc_k += n_k
            n_samples += 1

    if n_samples:
        est_dk, est_kw, est_k = (
            acc_dk / n_samples,
            acc_kw / n_samples,
            acc_k / n_samples,
        )
    else:
        est_dk, est_kw, est_k = n_dk, n_kw, n_k

    model = LdaModel(
        hyperparams=hp,
        vocabulary=corpus.vocabulary,
        n_kw=np.asarray(est_kw),
        n_k=np.asarray(est_k),
        sampler=sampler,
        seed=seed,
    )
    theta = theta_from_counts(np.asarray(est_dk), doc_lens, hp.alpha)
    return model, theta


def fold_in(
    model: LdaModel,
    document: BowDocument | np.ndarray,
    sampler: SamplerConfig | None = None,
    seed: int = 0,
    backend: str | None = None,
) -> np.ndarray:
    """Theta for one unseen document; topic-word counts stay frozen."""
    sampler = sampler or model.sampler
    kern = _kernels.get_backend(backend)
    hp = model.hyperparams
    K = hp.K
    tokens = np.asarray(
        document.tokens if isinstance(document, BowDocument) else document,
        dtype=np.int32,
    )
    if len(tokens) == 0:
        warnings.warn("fold_in: document has no in-vocabulary tokens; uniform theta")
        return np.full(K, 1.0 / K)
    phi = np.ascontiguousarray(model.phi)
    n_dk = np.zeros(K, dtype=np.int32)
    z = np.zeros(len(tokens), dtype=np.int32)
    # init in the wrapper so both kernel backends share one code path
    state = seed & _MASK64
    for i in range(len(tokens)):
        state, u = _next_double(state)
        k = int(u * K)
        if k >= K:
            k = K - 1
        z[i] = k
        n_dk[k] += 1
    for _ in range(sampler.iterations):
        state = kern.sweep_doc(tokens, z, n_dk, phi, hp.alpha, state)
    return (n_dk + hp.alpha) / (len(tokens) + K * hp.alpha)


def log_likelihood(model: LdaModel, corpus: BowCorpus, theta: np.ndarray) -> float:
    """Sum over tokens of log of the theta-phi mixture probability."""
    phi = model.phi
    total = 0.0
    for d, doc in enumerate(corpus.documents):
        if len(doc.tokens) == 0:
            continue
        probs = theta[d] @ phi[:, doc.tokens]
        total += float(np.log(probs).sum())
    return total


def fit_hyperparams(
    corpus: BowCorpus,
    K: int,
    seed: int = 0,
    enabled: bool = True,
    tol: float = 1e-4,
    max_rounds: int = 50,
) -> LdaHyperparams:
    """Symmetric alpha/beta by fixed-point (digamma) updates interleaved with
    short Gibbs runs; with ``enabled=False`` the defaults pass through."""
    hp = default_hyperparams(K)
    if not enabled:
        return hp
    if corpus.n_documents == 0:
        raise DataError("cannot fit hyperparameters on an empty corpus")
    kern = _kernels.get_backend(None)
    V = len(corpus.vocabulary)
    tokens, doc_ids, doc_lens = _flatten(corpus)
    D = len(doc_lens)
    n_dk = np.zeros((D, K), dtype=np.int32)
    n_kw = np.zeros((K, V), dtype=np.int32)
    n_k = np.zeros(K, dtype=np.int32)
    z = np.zeros(len(tokens), dtype=np.int32)
    state = seed & _MASK64
    state = kern.init_assignments(tokens, doc_ids, z, n_dk, n_kw, n_k, state)
    alpha, beta = hp.alpha, hp.beta
    for _ in range(20):  # warm-up sweeps before the first update
        state = kern.sweep_train(tokens, doc_ids, z, n_dk, n_kw, n_k, alpha, beta, state)

    nonempty = doc_lens > 0
    for _ in range(max_rounds):
        for _ in range(10):
            state = kern.sweep_train(
                tokens, doc_ids, z, n_dk, n_kw, n_k, alpha, beta, state
            )
        num = psi(n_dk[nonempty] + alpha).sum() - nonempty.sum() * K * psi(alpha)
        den = K * (
            psi(doc_lens[nonempty] + K * alpha).sum() - nonempty.sum() * psi(K * alpha)
        )
        new_alpha = _clamped(alpha * num / den, "alpha") if den > 0 else alpha
        num = psi(n_kw + beta).sum() - K * V * psi(beta)
        den = V * (psi(n_k + V * beta).sum() - K * psi(V * beta))
        new_beta = _clamped(beta * num / den, "beta") if den > 0 else beta
        converged = (
            abs(new_alpha - alpha) / alpha < tol and abs(new_beta - beta) / beta < tol
        )
        alpha, beta = new_alpha, new_beta
        if converged:
            break
    return LdaHyperparams(K=K, alpha=alpha, beta=beta)


def _clamped(value: float, name: str) -> float:
    if not np.isfinite(value) or value < ALPHA_MIN or value > ALPHA_MAX:
        clamped = float(min(max(value, ALPHA_MIN), ALPHA_MAX)) if np.isfinite(value) else ALPHA_MIN
        warnings.warn(f"fit_hyperparams: {name} update {value} clamped to {clamped}")
        return clamped
    return float(value)


def save_model(model: LdaModel, path: str | Path) -> None:
    """JSON model dump; phi is recomputable from the stored counts."""
    kk, ww = np.nonzero(model.n_kw)
    doc = {
        "hyperparams": {
            "K": model.hyperparams.K,
            "alpha": model.hyperparams.alpha,
            "beta": model.hyperparams.beta,
        },
        "vocab_hash": model.vocabulary.content_hash(),
        "vocab_size": len(model.vocabulary),
        "n_kw": [
            [int(k), int(w), float(model.n_kw[k, w])] for k, w in zip(kk, ww)
        ],
        "n_k": [float(x) for x in model.n_k],
        "sampler": {
            "iterations": model.sampler.iterations,
            "burn_in": model.sampler.burn_in,
            "sample_lag": model.sampler.sample_lag,
        },
        "seed": model.seed,
    }
    Path(path).write_text(json.dumps(doc))


def load_model(path: str | Path, vocabulary: Vocabulary) -> LdaModel:
    doc = json.loads(Path(path).read_text())
    if doc["vocab_hash"] != vocabulary.content_hash():
        raise DataError(f"{path}: model was trained against a different vocabulary")
    hp = LdaHyperparams(**doc["hyperparams"])
    V = doc["vocab_size"]
    n_kw = np.zeros((hp.K, V))
    for k, w, val in doc["n_kw"]:
        n_kw[k, w] = val
    n_k = np.asarray(doc["n_k"])
    if np.all(n_kw == np.floor(n_kw)) and np.all(n_k == np.floor(n_k)):
        n_kw = n_kw.astype(np.int32)
        n_k = n_k.astype(np.int32)
    return LdaModel(
        hyperparams=hp,
        vocabulary=vocabulary,
        n_kw=n_kw,
        n_k=n_k,
        sampler=SamplerConfig(**doc["sampler"]),
        seed=doc["seed"],
    )
