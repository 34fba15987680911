"""End-to-end orchestration: dataset -> codebooks -> corpus -> LDA -> report.

Used by the CLI and by tests. Every stage draws its seed from the single run
seed via labeled derivation, so a run is reproducible from (config, seed)
alone and fold-in of one document does not depend on the others.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import derive_seed
from .codebook import (
    CodebookSet,
    KMeansConfig,
    WindowConfig,
    load_codebooks,
    save_codebooks,
    train_codebooks,
)
from .dataset import (
    MultiSensorDataset,
    SyntheticConfig,
    generate_synthetic,
    load_ucihar,
)
from .errors import ConfigError, DataError
from .evaluate import (
    EvalReport,
    assign_classes,
    compute_report,
    contingency_matrix,
    corpus_statistics,
    map_topics,
    map_topics_optimal,
    save_confusion_csv,
    save_report,
    save_theta_csv,
)
from .lda import (
    LdaHyperparams,
    LdaModel,
    SamplerConfig,
    fit_hyperparams,
    fold_in,
    load_model,
    save_model,
    train,
)
from .words import BowCorpus, Vocabulary, build_corpus, load_vocabulary, save_vocabulary


@dataclass
class RunConfig:
    """Resolved parameters of one pipeline run.

    File form is flat JSON with these field names; CLI flags override file
    values. ``data`` is either a UCI-HAR root directory or a synthetic-config
    JSON file; ``k`` defaults to the number of ground-truth classes.
    """

    data: str = ""
    p: int = 30
    v: int = 29
    k: int = 0  # 0: take the labeled class count
    alpha: float = 0.0  # 0: default 50/K (or fitted when fit_priors)
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 500
    sample_lag: int = 0
    fold_iterations: int = 200
    seed: int = 0
    mapping: str = "greedy"  # or "optimal"
    fit_priors: bool = False
    kmeans_restarts: int = 1
    remove_top: int = 0

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict | None = None) -> "RunConfig":
        raw = json.loads(Path(path).read_text())
        return cls.resolve(raw, overrides)

    @classmethod
    def resolve(cls, raw: dict, overrides: dict | None = None) -> "RunConfig":
        merged = dict(raw)
        for key, value in (overrides or {}).items():
            if value is not None:
                merged[key] = value
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(merged) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(
            iterations=self.iterations,
            burn_in=self.burn_in,
            sample_lag=self.sample_lag,
        )

    def stage_seeds(self) -> dict[str, int]:
        return {
            "codebook": self.seed,  # train_codebooks derives per channel
            "lda": derive_seed(self.seed, "lda"),
            "foldin": derive_seed(self.seed, "foldin"),
        }


def load_dataset(source: str | Path, split: str, data_seed: int | None = None) -> MultiSensorDataset:
    """UCI-HAR root directory or synthetic-config JSON file."""
    path = Path(source)
    if path.is_dir():
        return load_ucihar(path, split)
    if path.is_file():
        raw = json.loads(path.read_text())
        config = SyntheticConfig.from_dict(raw)
        seed = data_seed if data_seed is not None else int(raw.get("seed", 0))
        # a different stream per split keeps train/test disjoint
        return generate_synthetic(config, derive_seed(seed, "synthetic", split))
    raise DataError(f"data source not found: {source}")


@dataclass
class Bundle:
    """Everything cmd_train persists: discretizer, vocabulary, model, mapping."""

    config: RunConfig
    codebooks: CodebookSet
    vocabulary: Vocabulary
    model: LdaModel
    mapping: dict[int, int]
    label_names: tuple[str, ...] | None

    def save(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_codebooks(self.codebooks, out / "codebooks.json")
        save_vocabulary(self.vocabulary, out / "vocab.json")
        save_model(self.model, out / "model.json")
        (out / "mapping.json").write_text(
            json.dumps(
                {
                    "topic_to_class": {str(t): c for t, c in self.mapping.items()},
                    "label_names": list(self.label_names or []),
                    "config": self.config.to_dict(),
                }
            )
        )

    @classmethod
    def load(cls, bundle_dir: str | Path) -> "Bundle":
        out = Path(bundle_dir)
        for name in ("codebooks.json", "vocab.json", "model.json", "mapping.json"):
            if not (out / name).is_file():
                raise DataError(f"bundle is missing {out / name}")
        vocabulary = load_vocabulary(out / "vocab.json")
        meta = json.loads((out / "mapping.json").read_text())
        return cls(
            config=RunConfig.resolve(meta["config"]),
            codebooks=load_codebooks(out / "codebooks.json"),
            vocabulary=vocabulary,
            model=load_model(out / "model.json", vocabulary),
            mapping={int(t): c for t, c in meta["topic_to_class"].items()},
            label_names=tuple(meta["label_names"]) or None,
        )


@dataclass
class TrainResult:
    bundle: Bundle
    corpus: BowCorpus
    theta: np.ndarray
    report: EvalReport | None


def run_train(
    dataset: MultiSensorDataset,
    config: RunConfig,
    codebooks: CodebookSet | None = None,
) -> TrainResult:
    """Full training pass over one dataset; pass ``codebooks`` to reuse an
    already-trained discretizer (the ablation loop does)."""
    from .words import remove_top_words

    if codebooks is None:
        window = WindowConfig(p=config.p)
        codebooks = train_codebooks(
            dataset,
            window,
            config.v,
            KMeansConfig(restarts=config.kmeans_restarts),
            seed=config.seed,
        )
    corpus = build_corpus(dataset, codebooks)
    if config.remove_top:
        corpus = remove_top_words(corpus, config.remove_top)

    k = config.k or (dataset.n_classes() if dataset.labels is not None else 0)
    if k < 1:
        raise ConfigError("k must be given for unlabeled data")
    lda_seed = derive_seed(config.seed, "lda")
    if config.fit_priors:
        hp = fit_hyperparams(corpus, k, seed=derive_seed(config.seed, "priors"))
    else:
        alpha = config.alpha if config.alpha > 0 else 50.0 / k
        hp = LdaHyperparams(K=k, alpha=alpha, beta=config.beta)
    model, theta = train(corpus, hp, config.sampler(), seed=lda_seed)

    mapping: dict[int, int] = {}
    report = None
    labels = corpus.labels()
    if labels is not None:
        topics = assign_classes(theta)
        cont = contingency_matrix(topics, labels, k, int(labels.max()) + 1)
        mapper = map_topics_optimal if config.mapping == "optimal" else map_topics
        mapping = mapper(cont)
        report = compute_report(
            topics,
            labels,
            mapping,
            corpus_statistics(corpus, k),
            corpus.label_names,
        )
    bundle = Bundle(
        config=config,
        codebooks=codebooks,
        vocabulary=corpus.vocabulary,
        model=model,
        mapping=mapping,
        label_names=corpus.label_names,
    )
    return TrainResult(bundle=bundle, corpus=corpus, theta=theta, report=report)


@dataclass
class ApplyResult:
    corpus: BowCorpus
    theta: np.ndarray
    report: EvalReport | None


def run_apply(
    bundle: Bundle,
    dataset: MultiSensorDataset,
    seed: int | None = None,
    remap: bool = False,
) -> ApplyResult:
    """Fold unseen data into a frozen bundle; the bundle is not modified.

    The training-time topic->class mapping is reused unless ``remap`` asks
    for a fresh mapping from this dataset's own labels.
    """
    if set(dataset.channel_keys) != set(bundle.codebooks.per_channel.keys()):
        raise DataError("dataset channels are incompatible with the bundle")
    config = bundle.config
    seed = config.seed if seed is None else seed
    corpus = build_corpus(dataset, bundle.codebooks, vocab=bundle.vocabulary)
    fold_sampler = SamplerConfig(iterations=config.fold_iterations, burn_in=0)
    K = bundle.model.hyperparams.K
    theta = np.empty((corpus.n_documents, K))
    for d, doc in enumerate(corpus.documents):
        theta[d] = fold_in(
            bundle.model,
            doc,
            fold_sampler,
            seed=derive_seed(seed, "foldin", d),
        )
    report = None
    labels = corpus.labels()
    if labels is not None:
        topics = assign_classes(theta)
        mapping = bundle.mapping
        if remap or not mapping:
            cont = contingency_matrix(topics, labels, K, int(labels.max()) + 1)
            mapper = map_topics_optimal if config.mapping == "optimal" else map_topics
            mapping = mapper(cont)
        report = compute_report(
            topics,
            labels,
            mapping,
            corpus_statistics(corpus, K),
            corpus.label_names,
        )
    return ApplyResult(corpus=corpus, theta=theta, report=report)


def write_run_outputs(
    out_dir: str | Path,
    config: RunConfig,
    theta: np.ndarray,
    report: EvalReport | None,
    labels: np.ndarray | None = None,
) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    predicted = None
    if report is not None:
        save_report(report, out / "report.json")
        save_confusion_csv(report, out / "confusion.csv")
    topics = assign_classes(theta)
    if report is not None and report.mapping:
        predicted = np.asarray([report.mapping[int(t)] for t in topics])
    save_theta_csv(theta, labels, predicted, out / "theta.csv")
    log = {
        "config": config.to_dict(),
        "stage_seeds": config.stage_seeds(),
    }
    if report is not None:
        log["macro_f1"] = report.macro_f1
    (out / "run.log").write_text(json.dumps(log, indent=2))
