"""Binary classification metrics computed from confusion-matrix counts.

Seven metrics are reported: accuracy, sensitivity, specificity, precision,
F1 score, Matthews correlation coefficient, and Cohen's kappa. All are
plain functions of the four counts (tp, fn, fp, tn) for one designated
positive class.

Zero-denominator conventions: sensitivity, specificity, precision, and F1
return 0 when their denominator is 0; MCC returns 0 when any factor under
the square root is 0; kappa returns 0 when random accuracy equals 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DataError

__all__ = ["ConfusionMatrix", "MetricsReport", "confusion", "metrics_report"]


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts for one positive class: tp/fn split the true positives,
    fp/tn split the true negatives."""

    tp: int
    fn: int
    fp: int
    tn: int
    positive_class: str

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise DataError("confusion-matrix counts must be non-negative")


@dataclass(frozen=True)
class MetricsReport:
    """The seven metric values plus the counts they came from.

    All values are fractions in their natural range (acc, sen, spe, pre,
    f1 in [0, 1]; mcc in [-1, 1]); rendering as percentages is a display
    concern.
    """

    acc: float
    sen: float
    spe: float
    pre: float
    f1: float
    mcc: float
    kappa: float
    matrix: ConfusionMatrix

    def to_dict(self) -> dict:
        """JSON-ready representation: metric fractions plus raw counts."""
        return {
            "acc": self.acc,
            "sen": self.sen,
            "spe": self.spe,
            "pre": self.pre,
            "f1": self.f1,
            "mcc": self.mcc,
            "kappa": self.kappa,
            "counts": {
                "tp": self.matrix.tp,
                "fn": self.matrix.fn,
                "fp": self.matrix.fp,
                "tn": self.matrix.tn,
            },
            "positive_class": self.matrix.positive_class,
        }

    def to_text(self) -> str:
        """Aligned text block with metrics as percentages (2 decimals)."""
        rows = [
            ("ACC", self.acc),
            ("SEN", self.sen),
            ("SPE", self.spe),
            ("PRE", self.pre),
            ("F1-score", self.f1),
            ("MCC", self.mcc),
            ("Kappa", self.kappa),
        ]
        cm = self.matrix
        lines = [
            f"positive class: {cm.positive_class}",
            f"counts: tp={cm.tp} fn={cm.fn} fp={cm.fp} tn={cm.tn} (total {cm.total})",
        ]
        lines += [f"{name:<10} {100.0 * value:>7.2f}" for name, value in rows]
        return "\n".join(lines)


def confusion(preds: list[str], truth: list[str], positive_class: str) -> ConfusionMatrix:
    """Tally tp/fn/fp/tn between predicted and true labels.

    Both lists must have the same nonzero length and the positive class
    must occur in their combined label set.
    """
    if len(preds) != len(truth):
        raise DataError(
            f"prediction/truth length mismatch: {len(preds)} vs {len(truth)}"
        )
    if len(truth) == 0:
        raise DataError("cannot tally an empty label list")
    if positive_class not in set(preds) | set(truth):
        raise DataError(f"positive class {positive_class!r} not in label set")

    tp = fn = fp = tn = 0
    for p, t in zip(preds, truth):
        if t == positive_class:
            if p == positive_class:
                tp += 1
            else:
                fn += 1
        else:
            if p == positive_class:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fn=fn, fp=fp, tn=tn, positive_class=positive_class)


def metrics_report(cm: ConfusionMatrix) -> MetricsReport:
    """Compute all seven metrics from one confusion matrix."""
    tp, fn, fp, tn = cm.tp, cm.fn, cm.fp, cm.tn
    total = cm.total
    if total < 1:
        raise DataError("confusion matrix is empty")

    acc = (tp + tn) / total
    sen = tp / (tp + fn) if tp + fn > 0 else 0.0
    spe = tn / (tn + fp) if tn + fp > 0 else 0.0
    pre = tp / (tp + fp) if tp + fp > 0 else 0.0
    f1 = 2 * tp / (2 * tp + fn + fp) if 2 * tp + fn + fp > 0 else 0.0

    mcc_den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / math.sqrt(mcc_den) if mcc_den > 0 else 0.0

    # random accuracy: chance agreement from the marginal label frequencies
    ra = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / total**2
    kappa = (acc - ra) / (1.0 - ra) if ra != 1.0 else 0.0

    return MetricsReport(
        acc=acc, sen=sen, spe=spe, pre=pre, f1=f1, mcc=mcc, kappa=kappa, matrix=cm
    )
