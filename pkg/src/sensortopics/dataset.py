"""Multi-sensor dataset types, the UCI-HAR inertial-signals loader, and a
synthetic generator for offline tests.

A dataset is a dense float64 array of shape (N, channels, t) plus an ordered
list of channel keys and optional integer activity labels. Channel order is
canonical everywhere: sensors in (acc, gyro) order, axes in (x, y, z) order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DataError


class Axis(IntEnum):
    X = 0
    Y = 1
    Z = 2

    @property
    def label(self) -> str:
        return self.name.lower()


class Sensor(IntEnum):
    ACC = 0
    GYRO = 1

    @property
    def label(self) -> str:
        return "acc" if self is Sensor.ACC else "gyro"


class ChannelKey(NamedTuple):
    sensor: Sensor
    axis: Axis

    def __str__(self) -> str:
        return f"{self.sensor.label}_{self.axis.label}"

    @classmethod
    def parse(cls, text: str) -> "ChannelKey":
        try:
            sensor_s, axis_s = text.rsplit("_", 1)
            sensor = {"acc": Sensor.ACC, "gyro": Sensor.GYRO}[sensor_s]
            axis = Axis[axis_s.upper()]
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad channel key {text!r}") from exc
        return cls(sensor, axis)


#: The six UCI-HAR channels in canonical order.
UCIHAR_CHANNELS: tuple[ChannelKey, ...] = tuple(
    ChannelKey(s, a) for s in Sensor for a in Axis
)

#: Canonical activity names, in the order of label-file values 1..6.
UCIHAR_ACTIVITY_NAMES: tuple[str, ...] = ("WA", "WU", "WD", "SI", "ST", "LA")


@dataclass(frozen=True)
class MultiSensorDataset:
    """N data sequences over a fixed channel set, all of equal length t."""

    data: np.ndarray  # (N, channels, t) float64
    channel_keys: tuple[ChannelKey, ...]
    labels: np.ndarray | None = None  # (N,) int, 0-based class ids
    label_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.data.ndim != 3:
            raise DataError("dataset array must be (N, channels, t)")
        n, c, t = self.data.shape
        if n < 1:
            raise DataError("dataset needs at least one sequence")
        if c != len(self.channel_keys):
            raise DataError(
                f"channel axis has {c} rows but {len(self.channel_keys)} keys"
            )
        if t < 2:
            raise DataError("sequence length t must be >= 2")
        if not np.isfinite(self.data).all():
            raise DataError("dataset contains non-finite samples")
        if self.labels is not None and len(self.labels) != n:
            raise DataError("label count does not match sequence count")

    @property
    def n_sequences(self) -> int:
        return self.data.shape[0]

    @property
    def t(self) -> int:
        return self.data.shape[2]

    def channel_index(self, key: ChannelKey) -> int:
        try:
            return self.channel_keys.index(key)
        except ValueError as exc:
            raise DataError(f"dataset has no channel {key}") from exc

    def channel(self, seq: int, key: ChannelKey) -> np.ndarray:
        return self.data[seq, self.channel_index(key)]

    def n_classes(self) -> int:
        if self.labels is None:
            raise DataError("dataset is unlabeled")
        return int(self.labels.max()) + 1


def _signal_path(root: Path, split: str, key: ChannelKey) -> Path:
    body = f"body_{key.sensor.label}_{key.axis.label}_{split}.txt"
    return root / split / "Inertial Signals" / body


def _read_float_table(path: Path) -> np.ndarray:
    """Parse a whitespace-delimited float matrix, validating row widths."""
    if not path.is_file():
        raise DataError(f"missing data file: {path}")
    rows: list[list[float]] = []
    width = None
    with open(path) as fh:
        for i, line in enumerate(fh):
            tokens = line.split()
            if not tokens:
                continue
            try:
                values = [float(tok) for tok in tokens]
            except ValueError as exc:
                raise DataError(f"{path}: non-numeric token in row {i}") from exc
            if any(not math.isfinite(v) for v in values):
                raise DataError(f"{path}: non-finite value in row {i}")
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataError(
                    f"{path}: row {i} has {len(values)} values, expected {width}"
                )
            rows.append(values)
    if not rows:
        raise DataError(f"{path}: empty file")
    return np.asarray(rows, dtype=np.float64)


def load_ucihar(root_dir: str | Path, split: str) -> MultiSensorDataset:
    """Load one UCI-HAR split (gravity-filtered body signals, 6 channels).

    Expects ``<root>/<split>/Inertial Signals/body_{acc,gyro}_{x,y,z}_<split>.txt``
    and ``<root>/<split>/y_<split>.txt`` with 1-based labels.
    """
    if split not in ("train", "test"):
        raise ConfigError(f"split must be 'train' or 'test', got {split!r}")
    root = Path(root_dir)
    blocks = []
    n_rows = None
    for key in UCIHAR_CHANNELS:
        path = _signal_path(root, split, key)
        block = _read_float_table(path)
        if n_rows is None:
            n_rows, t = block.shape
        elif block.shape != (n_rows, t):
            raise DataError(
                f"{path}: shape {block.shape} disagrees with other signal files "
                f"({n_rows}, {t})"
            )
        blocks.append(block)

    label_path = root / split / f"y_{split}.txt"
    if not label_path.is_file():
        raise DataError(f"missing data file: {label_path}")
    raw_labels = np.loadtxt(label_path, dtype=np.int64).reshape(-1)
    if len(raw_labels) != n_rows:
        raise DataError(
            f"{label_path}: {len(raw_labels)} labels for {n_rows} sequences"
        )
    if raw_labels.min() < 1 or raw_labels.max() > len(UCIHAR_ACTIVITY_NAMES):
        raise DataError(f"{label_path}: label values outside 1..6")

    data = np.stack(blocks, axis=1)  # (N, 6, t)
    return MultiSensorDataset(
        data=data,
        channel_keys=UCIHAR_CHANNELS,
        labels=raw_labels - 1,
        label_names=UCIHAR_ACTIVITY_NAMES,
    )


def save_ucihar(dataset: MultiSensorDataset, root_dir: str | Path, split: str) -> None:
    """Write a dataset back out in the UCI-HAR layout (round-trip exact)."""
    root = Path(root_dir)
    (root / split / "Inertial Signals").mkdir(parents=True, exist_ok=True)
    for ci, key in enumerate(dataset.channel_keys):
        path = _signal_path(root, split, key)
        with open(path, "w") as fh:
            for row in dataset.data[:, ci, :]:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
    if dataset.labels is not None:
        with open(root / split / f"y_{split}.txt", "w") as fh:
            for lab in dataset.labels:
                fh.write(f"{int(lab) + 1}\n")


@dataclass(frozen=True)
class Archetype:
    """Per-channel sinusoid parameters for one synthetic class."""

    freq: float  # cycles over the whole sequence
    amp: float = 1.0
    phase: float = 0.0


@dataclass(frozen=True)
class SyntheticConfig:
    """Declarative synthetic-dataset description.

    File form is flat JSON with keys: n, t, classes, noise, seed (optional),
    archetypes (optional; one ``{channel: {freq, amp, phase}}`` map per class).
    Without explicit archetypes, each class gets a distinct base frequency.
    """

    n: int
    t: int
    classes: int
    noise: float = 0.0
    channel_keys: tuple[ChannelKey, ...] = UCIHAR_CHANNELS
    archetypes: tuple[dict[ChannelKey, Archetype], ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("synthetic config: n must be >= 1")
        if self.t < 2:
            raise ConfigError("synthetic config: t must be >= 2")
        if self.classes < 1:
            raise ConfigError("synthetic config: classes must be >= 1")
        if self.archetypes is not None and len(self.archetypes) != self.classes:
            raise ConfigError("synthetic config: one archetype map per class")

    @classmethod
    def from_dict(cls, raw: dict) -> "SyntheticConfig":
        keys = tuple(
            ChannelKey.parse(c) for c in raw.get("channels", [])
        ) or UCIHAR_CHANNELS
        archetypes = None
        if "archetypes" in raw:
            archetypes = tuple(
                {
                    ChannelKey.parse(ch): Archetype(**params)
                    for ch, params in per_class.items()
                }
                for per_class in raw["archetypes"]
            )
        return cls(
            n=int(raw["n"]),
            t=int(raw["t"]),
            classes=int(raw["classes"]),
            noise=float(raw.get("noise", 0.0)),
            channel_keys=keys,
            archetypes=archetypes,
        )

    def archetype(self, cls_id: int, key: ChannelKey) -> Archetype:
        if self.archetypes is not None:
            return self.archetypes[cls_id][key]
        ci = self.channel_keys.index(key)
        # distinct base frequency per class, mild per-channel variation
        return Archetype(
            freq=(cls_id + 1) * 2.0 + 0.3 * ci,
            amp=1.0 + 0.1 * ci,
            phase=0.7 * ci,
        )


def generate_synthetic(config: SyntheticConfig, seed: int) -> MultiSensorDataset:
    """Deterministic labeled dataset of noisy per-class sinusoids."""
    rng = np.random.default_rng(seed)
    n, t = config.n, config.t
    labels = np.arange(n) % config.classes
    x = np.arange(t) / t
    data = np.empty((n, len(config.channel_keys), t), dtype=np.float64)
    for i in range(n):
        for ci, key in enumerate(config.channel_keys):
            arch = config.archetype(int(labels[i]), key)
            clean = arch.amp * np.sin(2.0 * np.pi * arch.freq * x + arch.phase)
            noise = rng.normal(0.0, config.noise, size=t) if config.noise > 0 else 0.0
            data[i, ci] = clean + noise
    names = tuple(f"C{c}" for c in range(config.classes))
    return MultiSensorDataset(
        data=data, channel_keys=config.channel_keys, labels=labels, label_names=names
    )
