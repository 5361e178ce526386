"""Binary classification metrics from confusion counts.

Malware is the positive class. All derived metrics are recomputed from
the four counts, never taken from a framework, so the identities
accuracy = (TP+TN)/total, precision = TP/(TP+FP), recall = TP/(TP+FN) and
f1 = 2PR/(P+R) hold by construction.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass

import numpy as np


class EmptyTestSetError(Exception):
    pass


@dataclass(frozen=True)
class MetricsReport:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total

    @property
    def precision(self) -> float:
        denominator = self.tp + self.fp
        return self.tp / denominator if denominator else 0.0

    @property
    def recall(self) -> float:
        denominator = self.tp + self.fn
        return self.tp / denominator if denominator else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "total": self.total,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }

    def confusion_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(["", "pred_malware", "pred_goodware"])
        writer.writerow(["true_malware", self.tp, self.fn])
        writer.writerow(["true_goodware", self.fp, self.tn])
        return buffer.getvalue()


def confusion_from_scores(y_true, malware_prob, threshold: float = 0.5) -> MetricsReport:
    """Threshold malware probabilities (>= threshold predicts malware)."""
    y_true = np.asarray(y_true, dtype=np.int64)
    predicted = (np.asarray(malware_prob, dtype=np.float64) >= threshold).astype(np.int64)
    if y_true.size == 0:
        raise EmptyTestSetError("no test samples")
    tp = int(((predicted == 1) & (y_true == 1)).sum())
    tn = int(((predicted == 0) & (y_true == 0)).sum())
    fp = int(((predicted == 1) & (y_true == 0)).sum())
    fn = int(((predicted == 0) & (y_true == 1)).sum())
    return MetricsReport(tp=tp, tn=tn, fp=fp, fn=fn)
