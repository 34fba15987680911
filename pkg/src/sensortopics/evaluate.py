"""Topic-to-class mapping, recognition metrics, and corpus statistics.

Topics are matched to ground-truth classes greedily: bind the largest
remaining contingency cell, drop its row and column, repeat. An optimal
(Hungarian) mapping is available for comparison. Metrics are per-class
precision/recall/F1 with unweighted macro averages; the confusion matrix is
rows = actual class, columns = predicted class.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DataError
from .words import BowCorpus


def assign_classes(theta: np.ndarray) -> np.ndarray:
    """Per-document argmax topic; ties go to the lowest topic index."""
    theta = np.atleast_2d(np.asarray(theta))
    return np.argmax(theta, axis=1)


def contingency_matrix(
    topics: np.ndarray, labels: np.ndarray, K: int, C: int
) -> np.ndarray:
    """(K, C) counts of documents per (assigned topic, true class)."""
    if len(topics) != len(labels):
        raise DataError("topic and label lists differ in length")
    m = np.zeros((K, C), dtype=np.int64)
    for t, c in zip(topics, labels):
        m[t, c] += 1
    return m


def map_topics(contingency: np.ndarray) -> dict[int, int]:
    """Greedy bijection topic -> class from the largest remaining cell.

    Ties break on the larger cell value first, then lower topic index, then
    lower class index. Requires a square matrix (K = C).
    """
    K, C = contingency.shape
    if K != C:
        raise DataError(f"need as many topics as classes, got {K} x {C}")
    remaining = contingency.astype(np.int64).copy()
    free_rows = set(range(K))
    free_cols = set(range(C))
    mapping: dict[int, int] = {}
    while free_rows:
        best = None
        for t in sorted(free_rows):
            for c in sorted(free_cols):
                if best is None or remaining[t, c] > best[0]:
                    best = (remaining[t, c], t, c)
        _, t, c = best
        mapping[t] = c
        free_rows.remove(t)
        free_cols.remove(c)
    return mapping


def map_topics_optimal(contingency: np.ndarray) -> dict[int, int]:
    """Maximum-agreement bijection via the Hungarian algorithm."""
    K, C = contingency.shape
    if K != C:
        raise DataError(f"need as many topics as classes, got {K} x {C}")
    rows, cols = linear_sum_assignment(-contingency)
    return {int(t): int(c) for t, c in zip(rows, cols)}


def mapping_accuracy(contingency: np.ndarray, mapping: dict[int, int]) -> float:
    total = contingency.sum()
    agree = sum(contingency[t, c] for t, c in mapping.items())
    return agree / total if total else 0.0


@dataclass(frozen=True)
class CorpusStats:
    D: int
    N: int
    B: int  # mean tokens per document, rounded
    V: int
    K: int


def corpus_statistics(corpus: BowCorpus, K: int) -> CorpusStats:
    if corpus.n_documents == 0:
        raise DataError("empty corpus has no statistics")
    D = corpus.n_documents
    N = corpus.n_tokens
    return CorpusStats(D=D, N=N, B=round(N / D), V=len(corpus.vocabulary), K=K)


@dataclass
class EvalReport:
    class_names: tuple[str, ...]
    precision: np.ndarray  # per class
    recall: np.ndarray
    f1: np.ndarray
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float
    confusion: np.ndarray  # (C, C), rows actual, cols predicted
    mapping: dict[int, int] = field(default_factory=dict)
    corpus_stats: CorpusStats | None = None

    def to_dict(self) -> dict:
        d = {
            "class_names": list(self.class_names),
            "per_class": {
                name: {
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                }
                for i, name in enumerate(self.class_names)
            },
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "confusion": self.confusion.tolist(),
            "topic_to_class": {str(t): c for t, c in self.mapping.items()},
        }
        if self.corpus_stats is not None:
            s = self.corpus_stats
            d["corpus_stats"] = {"D": s.D, "N": s.N, "B": s.B, "V": s.V, "K": s.K}
        return d


def compute_report(
    predictions: np.ndarray,
    labels: np.ndarray,
    mapping: dict[int, int] | None = None,
    corpus_stats: CorpusStats | None = None,
    class_names: tuple[str, ...] | None = None,
) -> EvalReport:
    """Metrics for predicted topics against true classes.

    ``predictions`` are topic indices; ``mapping`` translates them to class
    ids (identity when omitted). F1 of a class with zero precision and recall
    is 0.
    """
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise DataError(
            f"{len(predictions)} predictions for {len(labels)} labels"
        )
    C = int(labels.max()) + 1 if len(labels) else 0
    if mapping is not None:
        C = max(C, max(mapping.values()) + 1)
        predicted = np.asarray([mapping[int(t)] for t in predictions])
    else:
        predicted = predictions
        C = max(C, int(predicted.max()) + 1 if len(predicted) else 0)
    if class_names is None:
        class_names = tuple(f"class{c}" for c in range(C))

    confusion = np.zeros((C, C), dtype=np.int64)
    for a, p in zip(labels, predicted):
        confusion[a, p] += 1

    tp = np.diag(confusion).astype(np.float64)
    pred_totals = confusion.sum(axis=0).astype(np.float64)
    true_totals = confusion.sum(axis=1).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(pred_totals > 0, tp / pred_totals, 0.0)
        recall = np.where(true_totals > 0, tp / true_totals, 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / denom, 0.0)

    return EvalReport(
        class_names=class_names,
        precision=precision,
        recall=recall,
        f1=f1,
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        accuracy=float(tp.sum() / len(labels)) if len(labels) else 0.0,
        confusion=confusion,
        mapping=dict(mapping or {}),
        corpus_stats=corpus_stats,
    )


def save_report(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2))


def save_confusion_csv(report: EvalReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["actual\\predicted"] + list(report.class_names))
        for i, name in enumerate(report.class_names):
            writer.writerow([name] + [int(x) for x in report.confusion[i]])


def save_theta_csv(
    theta: np.ndarray,
    labels: np.ndarray | None,
    predicted: np.ndarray | None,
    path: str | Path,
) -> None:
    """Per-document topic-mixture table (plot-ready)."""
    theta = np.atleast_2d(theta)
    K = theta.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["doc_id", "true_label", "predicted_class"]
            + [f"theta_{k}" for k in range(K)]
        )
        for d in range(theta.shape[0]):
            writer.writerow(
                [
                    d,
                    int(labels[d]) if labels is not None else "",
                    int(predicted[d]) if predicted is not None else "",
                ]
                + [repr(float(x)) for x in theta[d]]
            )


def save_frequencies_csv(
    frequencies: list[tuple[int, int]], corpus: BowCorpus, path: str | Path
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word_id", "token", "count"])
        for wid, count in frequencies:
            writer.writerow([wid, corpus.vocabulary.token_of(wid), count])
