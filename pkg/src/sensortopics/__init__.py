"""Latent activity discovery in multi-sensor time series.

Pipeline: sliding-window discretization into per-channel character codebooks,
per-axis word composition, then LDA by collapsed Gibbs sampling. The Gibbs
kernels come in a compiled (Cython) and a pure-Python flavor with identical
output; see ``sensortopics._kernels.BACKEND`` for which one is active.
"""

from ._kernels import BACKEND as kernel_backend
from .codebook import (
    ChannelCodebook,
    CodebookSet,
    KMeansConfig,
    WindowConfig,
    assign_character,
    extract_subsequences,
    train_codebooks,
)
from .dataset import (
    Axis,
    ChannelKey,
    MultiSensorDataset,
    Sensor,
    SyntheticConfig,
    generate_synthetic,
    load_ucihar,
)
from .errors import ConfigError, DataError, SensorTopicsError
from .evaluate import (
    assign_classes,
    compute_report,
    corpus_statistics,
    map_topics,
    map_topics_optimal,
)
from .lda import (
    LdaHyperparams,
    LdaModel,
    SamplerConfig,
    fit_hyperparams,
    fold_in,
    log_likelihood,
    train,
)
from .pipeline import Bundle, RunConfig, run_apply, run_train
from .words import (
    BowCorpus,
    SensoryWord,
    Vocabulary,
    build_corpus,
    compose_words,
    remove_top_words,
    word_frequencies,
)

__version__ = "0.1.0"
