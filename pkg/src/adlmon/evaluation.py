"""Confusion matrices, accuracy/precision/recall and prediction tables.

Matrix layout: rows are predicted classes, columns are true classes.
Precision and recall return ``None`` when their denominator is zero.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.classes)
        if counts.shape != (k, k):
            raise ValidationError(f"counts must be {k}x{k}, got {counts.shape}")
        if (counts < 0).any():
            raise ValidationError("counts must be non-negative")
        if len(set(self.classes)) != k:
            raise ValidationError("classes must be distinct")
        counts.setflags(write=False)
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "counts", counts)

    @property
    def total(self):
        return int(self.counts.sum())

    def index(self, cls):
        try:
            return self.classes.index(cls)
        except ValueError:
            raise ValidationError(f"unknown class {cls!r}") from None

    def __eq__(self, other):
        return (isinstance(other, ConfusionMatrix) and self.classes == other.classes
                and np.array_equal(self.counts, other.counts))

    def to_dict(self):
        return {"classes": list(self.classes), "rows": "predicted", "columns": "true",
                "counts": self.counts.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data["classes"]), np.asarray(data["counts"]))


def confusion(true_labels: Sequence, predicted_labels: Sequence, classes: Sequence) -> ConfusionMatrix:
    if len(true_labels) != len(predicted_labels):
        raise ValidationError("true and predicted label lists differ in length")
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(true_labels, predicted_labels):
        if t not in index or p not in index:
            raise ValidationError(f"label not in classes: {t if t not in index else p!r}")
        counts[index[p], index[t]] += 1
    return ConfusionMatrix(classes, counts)


def accuracy(cm: ConfusionMatrix) -> float:
    """Trace over total; the two-class case is (TP + TN) / all."""
    if cm.total == 0:
        raise ValidationError("accuracy of an empty confusion matrix is undefined")
    return float(np.trace(cm.counts)) / cm.total


def precision(cm: ConfusionMatrix, cls) -> Optional[float]:
    i = cm.index(cls)
    row = int(cm.counts[i, :].sum())
    return None if row == 0 else int(cm.counts[i, i]) / row


def recall(cm: ConfusionMatrix, cls) -> Optional[float]:
    i = cm.index(cls)
    col = int(cm.counts[:, i].sum())
    return None if col == 0 else int(cm.counts[i, i]) / col


@dataclass(frozen=True)
class MetricsReport:
    overall_accuracy: float
    precision: dict
    recall: dict

    def to_dict(self):
        return {"accuracy": self.overall_accuracy, "precision": self.precision,
                "recall": self.recall}


def metrics_report(cm: ConfusionMatrix) -> MetricsReport:
    return MetricsReport(
        overall_accuracy=accuracy(cm),
        precision={c: precision(cm, c) for c in cm.classes},
        recall={c: recall(cm, c) for c in cm.classes},
    )


def _pct(value):
    return "undefined" if value is None else f"{100 * value:.2f}%"


def format_confusion(cm: ConfusionMatrix) -> str:
    """Plain-text matrix with class precision per row and class recall per column."""
    report = metrics_report(cm)
    header = [""] + [f"true {c}" for c in cm.classes] + ["class precision"]
    body = [[f"pred. {c}"] + [str(v) for v in cm.counts[i]] + [_pct(report.precision[c])]
            for i, c in enumerate(cm.classes)]
    body.append(["class recall"] + [_pct(report.recall[c]) for c in cm.classes] + [""])
    table = [header] + body
    widths = [max(len(r[j]) for r in table) for j in range(len(header))]
    lines = [f"accuracy: {_pct(report.overall_accuracy)}"]
    lines += ["  ".join(cell.rjust(w) if j else cell.ljust(w) for j, (cell, w) in
                        enumerate(zip(row, widths))).rstrip() for row in table]
    return "\n".join(lines) + "\n"


# -- prediction tables --------------------------------------------------------

def prediction_table(true_labels, predictions, classes, label_name="Activity") -> list:
    """One dict per test row: row number, actual, predicted, one confidence per class."""
    if len(true_labels) != len(predictions):
        raise ValidationError("true labels and predictions differ in length")
    rows = []
    for i, (t, pred) in enumerate(zip(true_labels, predictions), start=1):
        row = {"Row No.": i, label_name: t, f"prediction({label_name})": pred.label}
        for c in classes:
            row[f"confidence({c})"] = pred.confidences.get(c, 0.0)
        rows.append(row)
    return rows


def table_columns(classes, label_name="Activity"):
    return ["Row No.", label_name, f"prediction({label_name})"] + [f"confidence({c})" for c in classes]


def _fmt_cell(v):
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def table_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt_cell(row[c]) for c in columns])
    return buf.getvalue()


def table_to_text(rows, columns) -> str:
    cells = [list(columns)] + [[_fmt_cell(r[c]) for c in columns] for r in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(columns))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells) + "\n"


def save_confusion(cm, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cm.to_dict(), fh, indent=2)
        fh.write("\n")
