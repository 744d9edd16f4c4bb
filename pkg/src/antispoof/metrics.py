"""Confusion scores, classification reports and ROC analysis.

``fake`` (label 1) is the positive class and higher scores mean "more fake".
Any 0/0 ratio is reported as 0.

ROC CSV layout::

    threshold,fpr,tpr
    inf,0,0
    0.90000000000000002,0,0.5
    ...
    # auc=0.75
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyInput, IoError, LengthMismatch, OneClassOnly

CLASS_NAMES = ("real", "fake")


def _labels(y_true, y_pred):
    t = np.asarray(y_true).ravel()
    p = np.asarray(y_pred).ravel()
    if t.shape != p.shape:
        raise LengthMismatch(f"{t.size} true labels vs {p.size} predictions")
    if t.size == 0:
        raise EmptyInput("no samples")
    for a in (t, p):
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("labels must be 0 or 1")
    return t.astype(np.int64), p.astype(np.int64)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(y_true, y_pred) -> ConfusionMatrix:
    t, p = _labels(y_true, y_pred)
    return ConfusionMatrix(
        tp=int(np.sum((t == 1) & (p == 1))),
        fp=int(np.sum((t == 0) & (p == 1))),
        tn=int(np.sum((t == 0) & (p == 0))),
        fn=int(np.sum((t == 1) & (p == 0))),
    )


def _ratio(a, b) -> float:
    return a / b if b else 0.0


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    real: ClassScores
    fake: ClassScores
    accuracy: float
    macro_avg: tuple  # (precision, recall, f1)
    weighted_avg: tuple
    model_id: str = ""
    threshold: float = 0.5
    auc: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def support(self) -> int:
        return self.real.support + self.fake.support

    def to_text(self) -> str:
        """Aligned table: Real, Fake, Accuracy, Macro avg., Weighted avg."""
        head = f"model: {self.model_id}  threshold: {self.threshold:g}"
        for k in sorted(self.extra):
            head += f"  {k}: {self.extra[k]}"
        lines = [head, f"{'':<14}{'precision':>10}{'recall':>10}{'f1-score':>10}{'support':>10}"]
        for name, s in (("Real", self.real), ("Fake", self.fake)):
            lines.append(f"{name:<14}{s.precision:>10.4f}{s.recall:>10.4f}{s.f1:>10.4f}{s.support:>10d}")
        lines.append(f"{'Accuracy':<14}{'':>10}{'':>10}{self.accuracy:>10.4f}{self.support:>10d}")
        for name, (p, r, f) in (("Macro avg.", self.macro_avg), ("Weighted avg.", self.weighted_avg)):
            lines.append(f"{name:<14}{p:>10.4f}{r:>10.4f}{f:>10.4f}{self.support:>10d}")
        if self.auc is not None:
            lines.append(f"AUC: {self.auc:.6f}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["macro_avg"] = list(self.macro_avg)
        d["weighted_avg"] = list(self.weighted_avg)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        return cls(ClassScores(**d["real"]), ClassScores(**d["fake"]), d["accuracy"],
                   tuple(d["macro_avg"]), tuple(d["weighted_avg"]), d.get("model_id", ""),
                   d.get("threshold", 0.5), d.get("auc"), dict(d.get("extra", {})))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


def _class_scores(t, p, positive: int) -> ClassScores:
    tp = int(np.sum((t == positive) & (p == positive)))
    fp = int(np.sum((t != positive) & (p == positive)))
    fn = int(np.sum((t == positive) & (p != positive)))
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    return ClassScores(precision, recall, f1, int(np.sum(t == positive)))


def evaluate(y_true, y_pred, model_id: str = "", threshold: float = 0.5) -> EvalReport:
    t, p = _labels(y_true, y_pred)
    real = _class_scores(t, p, 0)
    fake = _class_scores(t, p, 1)
    n = t.size
    accuracy = int(np.sum(t == p)) / n
    per = [(real.precision, real.recall, real.f1), (fake.precision, fake.recall, fake.f1)]
    macro = tuple((a + b) / 2 for a, b in zip(*per))
    weighted = tuple((a * real.support + b * fake.support) / n for a, b in zip(*per))
    # recall * support is the per-class hit count; keep the identity with accuracy exact
    weighted = (weighted[0], int(np.sum(t == p)) / n, weighted[2])
    return EvalReport(real, fake, accuracy, macro, weighted, model_id, threshold)


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray  # first entry is +inf
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def to_csv(self) -> str:
        lines = ["threshold,fpr,tpr"]
        for th, f, t in zip(self.thresholds, self.fpr, self.tpr):
            lines.append(f"{format(float(th), '.17g')},{format(float(f), '.17g')},{format(float(t), '.17g')}")
        lines.append(f"# auc={format(self.auc, '.17g')}")
        return "\n".join(lines) + "\n"


def _check_scores(scores, y_true):
    s = np.asarray(scores, dtype=np.float64).ravel()
    t = np.asarray(y_true).ravel()
    if s.shape != t.shape:
        raise LengthMismatch(f"{s.size} scores vs {t.size} labels")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    n_pos = int(np.sum(t == 1))
    n_neg = int(np.sum(t == 0))
    if n_pos + n_neg != t.size:
        raise ValueError("labels must be 0 or 1")
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly("ROC needs both positive and negative labels")
    return s, t.astype(np.int64), n_pos, n_neg


def roc(scores, y_true) -> RocCurve:
    """ROC over the unique observed scores (plus a +inf start), trapezoidal AUC."""
    s, t, n_pos, n_neg = _check_scores(scores, y_true)
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    t_sorted = t[order]
    tps = np.cumsum(t_sorted == 1)
    fps = np.cumsum(t_sorted == 0)
    # last position of each run of equal scores
    last = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    tpr = np.r_[0, tps[last]] / n_pos
    fpr = np.r_[0, fps[last]] / n_neg
    thresholds = np.r_[np.inf, s_sorted[last]]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, thresholds, auc)


def auc_oracle_check(scores, y_true) -> float:
    """AUC as the mean pairwise concordance over (positive, negative) pairs."""
    s, t, _, _ = _check_scores(scores, y_true)
    pos = s[t == 1][:, None]
    neg = s[t == 0][None, :]
    return float(np.mean(np.where(pos > neg, 1.0, np.where(pos == neg, 0.5, 0.0))))


def save_roc(curve: RocCurve, path) -> None:
    _write(path, curve.to_csv())


def save_report(report: EvalReport, text_path, json_path=None) -> None:
    _write(text_path, report.to_text())
    if json_path is not None:
        _write(json_path, report.to_json())


def load_report(json_path) -> EvalReport:
    try:
        return EvalReport.from_dict(json.loads(Path(json_path).read_text()))
    except OSError as exc:
        raise IoError(f"{json_path}: {exc.strerror or exc}") from exc


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
