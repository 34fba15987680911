"""Composition of per-axis words from channel characters, vocabulary
management, and bag-of-words corpus construction.

A word is the tuple of each sensor's character at one (axis, window offset),
tagged with the axis. Rendered form is ``"x:acc=2|gyro=5"`` with sensors in
canonical order. The vocabulary is frozen after the training build; test-time
words outside it are tallied per document as OOV and excluded from token
lists (a frozen topic model has no column for them).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, NamedTuple

import numpy as np

from .codebook import CodebookSet, assign_characters, window_matrix
from .dataset import Axis, ChannelKey, MultiSensorDataset, Sensor
from .errors import ConfigError, DataError


class SensoryWord(NamedTuple):
    axis: Axis
    characters: tuple[tuple[Sensor, int], ...]  # sorted by sensor

    def render(self) -> str:
        parts = "|".join(f"{s.label}={c}" for s, c in self.characters)
        return f"{self.axis.label}:{parts}"

    @classmethod
    def parse(cls, text: str) -> "SensoryWord":
        axis_s, rest = text.split(":", 1)
        chars = []
        for part in rest.split("|"):
            sensor_s, idx = part.split("=")
            sensor = {"acc": Sensor.ACC, "gyro": Sensor.GYRO}[sensor_s]
            chars.append((sensor, int(idx)))
        return cls(Axis[axis_s.upper()], tuple(chars))


class Vocabulary:
    """Bijective token <-> id map; ids are contiguous from 0 in
    first-occurrence order."""

    def __init__(self, tokens: list[str] | None = None):
        self._id_to_token: list[str] = []
        self._token_to_id: dict[str, int] = {}
        for tok in tokens or []:
            self.add(tok)

    def add(self, token: str) -> int:
        wid = self._token_to_id.get(token)
        if wid is None:
            wid = len(self._id_to_token)
            self._token_to_id[token] = wid
            self._id_to_token.append(token)
        return wid

    def id_of(self, token: str) -> int | None:
        return self._token_to_id.get(token)

    def token_of(self, wid: int) -> str:
        return self._id_to_token[wid]

    def __len__(self) -> int:
        return len(self._id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    def tokens(self) -> list[str]:
        return list(self._id_to_token)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._id_to_token == other._id_to_token

    def content_hash(self) -> str:
        import hashlib

        h = hashlib.blake2b(digest_size=16)
        for tok in self._id_to_token:
            h.update(tok.encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()


@dataclass(frozen=True)
class BowDocument:
    tokens: np.ndarray  # int32 word ids, in extraction order
    seq_index: int
    label: int | None = None
    oov_count: int = 0


@dataclass
class BowCorpus:
    documents: list[BowDocument]
    vocabulary: Vocabulary
    label_names: tuple[str, ...] | None = None

    @property
    def n_documents(self) -> int:
        return len(self.documents)

    @property
    def n_tokens(self) -> int:
        return sum(len(d.tokens) for d in self.documents)

    @property
    def oov_total(self) -> int:
        return sum(d.oov_count for d in self.documents)

    def labels(self) -> np.ndarray | None:
        if any(d.label is None for d in self.documents):
            return None
        return np.asarray([d.label for d in self.documents], dtype=np.int64)


def compose_words(
    channels: Mapping[ChannelKey, np.ndarray], codebooks: CodebookSet
) -> list[SensoryWord]:
    """Words of one sequence: for every (axis, window offset), the tuple of
    each sensor's nearest character, offsets synchronized across sensors."""
    keys = set(channels.keys())
    if keys != set(codebooks.per_channel.keys()):
        raise DataError(
            f"sequence channels {sorted(map(str, keys))} do not match codebook "
            f"channels {sorted(map(str, codebooks.per_channel.keys()))}"
        )
    window = codebooks.window
    sensors = sorted({k.sensor for k in keys})
    axes = sorted({k.axis for k in keys})
    # chars[axis][sensor] -> (n_windows,) character indices
    chars: dict[Axis, dict[Sensor, np.ndarray]] = {}
    n_windows = None
    for key in keys:
        wm = window_matrix(np.asarray(channels[key], dtype=np.float64), window)
        idx = assign_characters(codebooks.codebook(key), wm)
        chars.setdefault(key.axis, {})[key.sensor] = idx
        n_windows = len(idx)
    words = []
    for axis in axes:
        per_sensor = chars[axis]
        for w in range(n_windows):
            chs = tuple((s, int(per_sensor[s][w])) for s in sensors)
            words.append(SensoryWord(axis, chs))
    return words


def _dataset_char_table(
    dataset: MultiSensorDataset, codebooks: CodebookSet
) -> tuple[dict[ChannelKey, np.ndarray], int]:
    """Per channel, (N, n_windows) character assignments for all sequences."""
    window = codebooks.window
    table: dict[ChannelKey, np.ndarray] = {}
    n_windows = window.n_windows(dataset.t)
    for ci, key in enumerate(dataset.channel_keys):
        cb = codebooks.codebook(key)
        rows = np.empty((dataset.n_sequences, n_windows), dtype=np.int64)
        for i in range(dataset.n_sequences):
            rows[i] = assign_characters(cb, window_matrix(dataset.data[i, ci], window))
        table[key] = rows
    return table, n_windows


def build_corpus(
    dataset: MultiSensorDataset,
    codebooks: CodebookSet,
    vocab: Vocabulary | None = None,
) -> BowCorpus:
    """Convert a dataset to bag-of-words documents.

    With ``vocab=None`` this is a training build: the vocabulary is the set of
    distinct observed words, ids in first-occurrence order. With a frozen
    vocabulary, unseen words are counted per document as OOV and dropped from
    the token list.
    """
    if set(dataset.channel_keys) != set(codebooks.per_channel.keys()):
        raise DataError("dataset channels do not match codebook channels")
    table, n_windows = _dataset_char_table(dataset, codebooks)
    sensors = sorted({k.sensor for k in dataset.channel_keys})
    axes = sorted({k.axis for k in dataset.channel_keys})
    freeze = vocab is not None
    vocabulary = vocab if freeze else Vocabulary()

    documents = []
    for i in range(dataset.n_sequences):
        ids = []
        oov = 0
        for axis in axes:
            per_sensor = [table[ChannelKey(s, axis)][i] for s in sensors]
            for w in range(n_windows):
                chs = tuple((s, int(per_sensor[si][w])) for si, s in enumerate(sensors))
                token = SensoryWord(axis, chs).render()
                if freeze:
                    wid = vocabulary.id_of(token)
                    if wid is None:
                        oov += 1
                        continue
                else:
                    wid = vocabulary.add(token)
                ids.append(wid)
        label = int(dataset.labels[i]) if dataset.labels is not None else None
        documents.append(
            BowDocument(
                tokens=np.asarray(ids, dtype=np.int32),
                seq_index=i,
                label=label,
                oov_count=oov,
            )
        )
    return BowCorpus(
        documents=documents,
        vocabulary=vocabulary,
        label_names=dataset.label_names,
    )


def word_frequencies(corpus: BowCorpus) -> list[tuple[int, int]]:
    """(word id, count) over all documents, sorted by count desc then id asc."""
    counts: Counter[int] = Counter()
    for doc in corpus.documents:
        counts.update(int(w) for w in doc.tokens)
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def remove_top_words(corpus: BowCorpus, n: int) -> BowCorpus:
    """Corpus with the n most frequent words stripped and the vocabulary
    re-indexed; the input corpus is left untouched."""
    v = len(corpus.vocabulary)
    if n < 0 or n > v:
        raise ConfigError(f"cannot remove {n} words from a vocabulary of {v}")
    if n == 0:
        return corpus
    removed = {wid for wid, _ in word_frequencies(corpus)[:n]}
    new_vocab = Vocabulary(
        [corpus.vocabulary.token_of(w) for w in range(v) if w not in removed]
    )
    remap = {
        old: new_vocab.id_of(corpus.vocabulary.token_of(old))
        for old in range(v)
        if old not in removed
    }
    documents = []
    for doc in corpus.documents:
        kept = [remap[int(w)] for w in doc.tokens if int(w) not in removed]
        documents.append(
            BowDocument(
                tokens=np.asarray(kept, dtype=np.int32),
                seq_index=doc.seq_index,
                label=doc.label,
                oov_count=doc.oov_count,
            )
        )
    return BowCorpus(
        documents=documents, vocabulary=new_vocab, label_names=corpus.label_names
    )


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps({tok: i for i, tok in enumerate(vocab.tokens())})
    )


def load_vocabulary(path: str | Path) -> Vocabulary:
    mapping = json.loads(Path(path).read_text())
    tokens = [None] * len(mapping)
    for tok, wid in mapping.items():
        tokens[wid] = tok
    if any(t is None for t in tokens):
        raise DataError(f"{path}: vocabulary ids are not contiguous from 0")
    return Vocabulary(tokens)


def export_corpus(corpus: BowCorpus, path: str | Path) -> None:
    """One document per line, rendered tokens space-separated."""
    with open(path, "w") as fh:
        for doc in corpus.documents:
            fh.write(
                " ".join(corpus.vocabulary.token_of(int(w)) for w in doc.tokens) + "\n"
            )
