"""Sliding-window discretization: per-channel k-means codebooks.

Each channel of the training data is cut into 50%-overlap windows of length p
and clustered into v centroids (the "characters" of the discrete alphabet).
Unseen windows are assigned to the nearest centroid by squared Euclidean
distance, ties to the lowest centroid index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import SplitMix64, derive_seed
from .dataset import ChannelKey, MultiSensorDataset
from .errors import ConfigError, DataError


@dataclass(frozen=True)
class WindowConfig:
    """Window length p with the fixed 50%-overlap stride floor(p/2)."""

    p: int
    stride: int = 0  # 0 means "derive from p"

    def __post_init__(self):
        if self.p < 2:
            raise ConfigError(f"window size p must be >= 2, got {self.p}")
        if self.stride == 0:
            object.__setattr__(self, "stride", self.p // 2)
        if self.stride != self.p // 2:
            raise ConfigError("stride must equal floor(p/2) (50% overlap)")

    def n_windows(self, t: int) -> int:
        if self.p > t:
            raise ConfigError(f"window size {self.p} exceeds sequence length {t}")
        return (t - self.p) // self.stride + 1

    def offsets(self, t: int) -> np.ndarray:
        return np.arange(self.n_windows(t)) * self.stride


@dataclass(frozen=True)
class Subsequence:
    values: np.ndarray
    seq_index: int
    channel: ChannelKey
    offset: int


def extract_subsequences(
    series: np.ndarray, window: WindowConfig, seq_index: int = 0,
    channel: ChannelKey | None = None,
) -> list[Subsequence]:
    """All full windows of ``series`` at offsets 0, stride, 2*stride, ...

    Trailing samples that do not fill a window are dropped.
    """
    t = len(series)
    return [
        Subsequence(series[off : off + window.p], seq_index, channel, int(off))
        for off in window.offsets(t)
    ]


def window_matrix(series: np.ndarray, window: WindowConfig) -> np.ndarray:
    """(n_windows, p) view of all full windows; same offsets as
    extract_subsequences."""
    offs = window.offsets(len(series))
    return np.stack([series[o : o + window.p] for o in offs]) if len(offs) else \
        np.empty((0, window.p))


@dataclass(frozen=True)
class KMeansConfig:
    max_iter: int = 300
    tol: float = 1e-6  # max squared centroid shift declaring convergence
    restarts: int = 1


def _nearest_sq(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Squared distance to nearest centroid and its index (lowest index wins ties).

    Expanded form keeps memory at (n, k) instead of (n, k, p)."""
    p2 = (points**2).sum(axis=1)
    c2 = (centroids**2).sum(axis=1)
    d2 = p2[:, None] - 2.0 * (points @ centroids.T) + c2[None, :]
    np.maximum(d2, 0.0, out=d2)
    idx = np.argmin(d2, axis=1)
    return d2[np.arange(len(points)), idx], idx


def _kmeans_pp_init(points: np.ndarray, v: int, rng: SplitMix64) -> np.ndarray:
    n = len(points)
    centroids = np.empty((v, points.shape[1]))
    centroids[0] = points[rng.next_below(n)]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, v):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining points coincide with a chosen centroid
            centroids[j] = points[rng.next_below(n)]
            continue
        r = rng.next_double() * total
        cum = np.cumsum(d2)
        pick = int(np.searchsorted(cum, r, side="right"))
        pick = min(pick, n - 1)
        centroids[j] = points[pick]
        d2 = np.minimum(d2, ((points - centroids[j]) ** 2).sum(axis=1))
    return centroids


def lloyd(
    points: np.ndarray, v: int, cfg: KMeansConfig, seed: int
) -> tuple[np.ndarray, list[float]]:
    """One k-means++ / Lloyd run. Returns (centroids, per-iteration objective).

    The objective (within-cluster sum of squared distances) is recorded after
    each assignment step and is non-increasing. Empty clusters are reseeded
    with the point currently farthest from its assigned centroid.
    """
    rng = SplitMix64(seed)
    centroids = _kmeans_pp_init(points, v, rng)
    history: list[float] = []
    for _ in range(cfg.max_iter):
        d2, assign = _nearest_sq(points, centroids)
        history.append(float(d2.sum()))
        new_centroids = centroids.copy()
        for j in range(v):
            members = points[assign == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
        # reseed empties from the globally worst-fit points
        taken = d2.copy()
        for j in range(v):
            if not np.any(assign == j):
                far = int(np.argmax(taken))
                new_centroids[j] = points[far]
                taken[far] = -1.0
        shift = ((new_centroids - centroids) ** 2).sum(axis=1).max()
        centroids = new_centroids
        if shift < cfg.tol:
            break
    d2, _ = _nearest_sq(points, centroids)
    history.append(float(d2.sum()))
    return centroids, history


def kmeans(
    points: np.ndarray, v: int, cfg: KMeansConfig, seed: int
) -> tuple[np.ndarray, list[float]]:
    """Best of ``cfg.restarts`` Lloyd runs (restart seeds derived from seed)."""
    best = None
    for r in range(cfg.restarts):
        run_seed = seed if cfg.restarts == 1 else derive_seed(seed, "restart", r)
        centroids, history = lloyd(points, v, cfg, run_seed)
        if best is None or history[-1] < best[1][-1]:
            best = (centroids, history)
    return best


@dataclass(frozen=True)
class ChannelCodebook:
    channel: ChannelKey
    centroids: np.ndarray  # (v, p)

    @property
    def v(self) -> int:
        return self.centroids.shape[0]

    @property
    def p(self) -> int:
        return self.centroids.shape[1]


@dataclass(frozen=True)
class CodebookSet:
    per_channel: dict[ChannelKey, ChannelCodebook]
    window: WindowConfig

    @property
    def v(self) -> int:
        return next(iter(self.per_channel.values())).v

    def codebook(self, key: ChannelKey) -> ChannelCodebook:
        try:
            return self.per_channel[key]
        except KeyError as exc:
            raise DataError(f"no codebook for channel {key}") from exc


def train_codebooks(
    dataset: MultiSensorDataset,
    window: WindowConfig,
    v: int,
    kmeans_cfg: KMeansConfig | None = None,
    seed: int = 0,
) -> CodebookSet:
    """Cluster each channel's pooled training windows independently.

    Per-channel seeds are derived from (seed, sensor, axis), so the result for
    one channel does not depend on which other channels exist.
    """
    if v < 2:
        raise ConfigError(f"codebook size v must be >= 2, got {v}")
    cfg = kmeans_cfg or KMeansConfig()
    per_channel: dict[ChannelKey, ChannelCodebook] = {}
    for ci, key in enumerate(dataset.channel_keys):
        pooled = np.concatenate(
            [window_matrix(dataset.data[i, ci], window) for i in range(dataset.n_sequences)]
        )
        distinct = len(np.unique(pooled, axis=0))
        if distinct < v:
            raise DataError(
                f"channel {key}: only {distinct} distinct windows for v={v}"
            )
        ch_seed = derive_seed(seed, "codebook", key.sensor.label, key.axis.label)
        centroids, _ = kmeans(pooled, v, cfg, ch_seed)
        per_channel[key] = ChannelCodebook(channel=key, centroids=centroids)
    return CodebookSet(per_channel=per_channel, window=window)


def assign_character(codebook: ChannelCodebook, values: np.ndarray) -> int:
    """Index of the nearest centroid (squared Euclidean, lowest index on ties)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (codebook.p,):
        raise DataError(
            f"subsequence length {values.shape} does not match centroid length "
            f"{codebook.p}"
        )
    d2 = ((codebook.centroids - values) ** 2).sum(axis=1)
    return int(np.argmin(d2))


def assign_characters(codebook: ChannelCodebook, windows: np.ndarray) -> np.ndarray:
    """Vectorized assign_character over a (n, p) window matrix."""
    if windows.shape[1] != codebook.p:
        raise DataError("window width does not match centroid length")
    _, idx = _nearest_sq(windows, codebook.centroids)
    return idx


def save_codebooks(codebooks: CodebookSet, path: str | Path) -> None:
    doc = {
        "window": {"p": codebooks.window.p, "stride": codebooks.window.stride},
        "channels": [
            {
                "channel": str(key),
                "centroids": [[float(x) for x in row] for row in cb.centroids],
            }
            for key, cb in codebooks.per_channel.items()
        ],
    }
    Path(path).write_text(json.dumps(doc))


def load_codebooks(path: str | Path) -> CodebookSet:
    doc = json.loads(Path(path).read_text())
    window = WindowConfig(p=doc["window"]["p"], stride=doc["window"]["stride"])
    per_channel = {}
    for entry in doc["channels"]:
        key = ChannelKey.parse(entry["channel"])
        per_channel[key] = ChannelCodebook(
            channel=key, centroids=np.asarray(entry["centroids"], dtype=np.float64)
        )
    return CodebookSet(per_channel=per_channel, window=window)
