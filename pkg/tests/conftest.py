import numpy as np
import pytest

from sensortopics.dataset import (
    MultiSensorDataset,
    SyntheticConfig,
    UCIHAR_CHANNELS,
    generate_synthetic,
    save_ucihar,
)


@pytest.fixture
def small_dataset() -> MultiSensorDataset:
    return generate_synthetic(
        SyntheticConfig(n=24, t=64, classes=3, noise=0.1), seed=11
    )


@pytest.fixture
def noiseless_dataset() -> MultiSensorDataset:
    return generate_synthetic(SyntheticConfig(n=10, t=64, classes=2), seed=3)


def make_ucihar_tree(root, split="train", n=6, t=128, seed=0, labels=None):
    """Write a small random dataset in the UCI-HAR file layout."""
    rng = np.random.default_rng(seed)
    data = rng.normal(size=(n, len(UCIHAR_CHANNELS), t))
    if labels is None:
        labels = np.arange(n) % 6
    ds = MultiSensorDataset(
        data=data,
        channel_keys=UCIHAR_CHANNELS,
        labels=np.asarray(labels),
        label_names=("WA", "WU", "WD", "SI", "ST", "LA"),
    )
    save_ucihar(ds, root, split)
    return ds
