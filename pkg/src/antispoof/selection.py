"""Standard recursive feature elimination driven by boosted-tree split gain."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gbdt
from .dataset import FeatureTable
from .errors import BadK, CorruptModel, IndexOutOfRange, IoError

DEFAULT_TARGET_K = 24
DEFAULT_RFE_PRESET = "preset-b"


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple  # ascending original indices
    ranking: tuple  # survivors first, earliest eliminated last
    per_round: tuple  # (round, surviving indices, importances aligned with them)
    target_k: int
    feature_names: tuple = ()
    step: int = 1
    mode: str = "paper-order"  # or "train-only"

    @property
    def selected_names(self) -> list[str]:
        return [self.feature_names[i] for i in self.selected] if self.feature_names else []

    def to_dict(self) -> dict:
        return {
            "target_k": self.target_k,
            "step": self.step,
            "mode": self.mode,
            "selected": list(self.selected),
            "selected_names": self.selected_names,
            "ranking": list(self.ranking),
            "feature_names": list(self.feature_names),
            "rounds": [{"round": r, "surviving": list(s), "importance": [float(v) for v in imp]}
                       for r, s, imp in self.per_round],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SelectionResult":
        try:
            rounds = tuple((int(x["round"]), tuple(x["surviving"]), tuple(x["importance"]))
                           for x in d.get("rounds", []))
            return cls(tuple(int(i) for i in d["selected"]), tuple(int(i) for i in d["ranking"]),
                       rounds, int(d["target_k"]), tuple(d.get("feature_names", ())),
                       int(d.get("step", 1)), str(d.get("mode", "paper-order")))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptModel(f"invalid selection file: {exc}") from exc


def rfe_arrays(X, y, target_k: int = DEFAULT_TARGET_K, step: int = 1,
               hyperparams: gbdt.Hyperparams | None = None, feature_names=()) -> SelectionResult:
    X = np.asarray(X, dtype=np.float64)
    n_features = X.shape[1]
    if not 1 <= target_k <= n_features:
        raise BadK(f"target_k must be in [1, {n_features}], got {target_k}")
    if step < 1:
        raise ValueError("step must be >= 1")
    hp = hyperparams or gbdt.get_preset(DEFAULT_RFE_PRESET)

    surviving = list(range(n_features))
    eliminated = []
    rounds = []
    last_imp = None
    while len(surviving) > target_k:
        model = gbdt.train(X[:, surviving], y, hp)
        imp = gbdt.feature_importance(model)
        rounds.append((len(rounds), tuple(surviving), tuple(float(v) for v in imp)))
        n_drop = min(step, len(surviving) - target_k)
        # weakest first; equal importance -> higher original index goes first
        order = sorted(range(len(surviving)), key=lambda j: (imp[j], -surviving[j]))
        drop = set(order[:n_drop])
        eliminated.extend(surviving[j] for j in order[:n_drop])
        keep = [j for j in range(len(surviving)) if j not in drop]
        last_imp = {surviving[j]: imp[j] for j in keep}
        surviving = [surviving[j] for j in keep]

    if last_imp is None:
        survivors = sorted(surviving)
    else:
        survivors = sorted(surviving, key=lambda i: (-last_imp[i], i))
    ranking = tuple(survivors + eliminated[::-1])
    return SelectionResult(tuple(sorted(surviving)), ranking, tuple(rounds), target_k,
                           tuple(feature_names), step)


def rfe(table: FeatureTable, target_k: int = DEFAULT_TARGET_K, step: int = 1,
        hyperparams: gbdt.Hyperparams | None = None) -> SelectionResult:
    """Eliminate the lowest-gain features until ``target_k`` remain.

    Each round retrains on the surviving columns and drops
    ``min(step, surviving - target_k)`` features. Deterministic.
    """
    return rfe_arrays(table.rows, table.labels, target_k, step, hyperparams, table.feature_names)


def apply_selection(table: FeatureTable, result: SelectionResult) -> FeatureTable:
    idx = list(result.selected)
    bad = [i for i in idx if not 0 <= i < len(table.feature_names)]
    if bad:
        raise IndexOutOfRange(f"selected indices {bad} outside 0..{len(table.feature_names) - 1}")
    return FeatureTable(table.rows[:, idx], table.labels,
                        [table.feature_names[i] for i in idx], table.source_paths)


def save_selection(result: SelectionResult, path) -> None:
    try:
        Path(path).write_text(json.dumps(result.to_dict(), indent=1) + "\n")
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def load_selection(path) -> SelectionResult:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return SelectionResult.from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"{path}: not valid JSON ({exc})") from exc
