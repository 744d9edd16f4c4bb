"""Manifest ingestion, feature tables, cleaning, exploration and splitting.

Labels are encoded 0 = real, 1 = fake; fake is the positive class.

Feature-table CSV: header ``path,label,<feature names...>``, one row per
clip, label written as ``real``/``fake`` and values with 17 significant
digits so a save/load round trip is exact.
"""
from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import load_wav
from .errors import (AllRowsDropped, BadLabel, DegenerateSplit, EmptyManifest,
                     FileError, IoError, SchemaMismatch)
from .features import FEATURE_NAMES, FeatureConfig, extract_features, feature_names

log = logging.getLogger(__name__)

LABEL_NAMES = ("real", "fake")
LABELS = {"real": 0, "fake": 1}


def parse_label(text: str, where: str = "") -> int:
    key = text.strip().lower()
    if key in LABELS:
        return LABELS[key]
    if key in ("0", "1"):
        return int(key)
    raise BadLabel(f"{where}bad label {text!r} (expected 'real' or 'fake')")


@dataclass(frozen=True)
class Manifest:
    entries: list  # (path as written, label)
    base_dir: str = "."

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p


def load_manifest(path) -> Manifest:
    """Read a ``path,label`` CSV. Relative audio paths resolve against the
    manifest's directory."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != ["path", "label"]:
        raise BadLabel(f"{path}: header must be 'path,label', got {header!r}")
    entries = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise BadLabel(f"{path}: row {lineno}: expected 2 fields, got {len(row)}")
        entries.append((row[0].strip(), parse_label(row[1], f"{path}: row {lineno}: ")))
    if not entries:
        raise EmptyManifest(f"{path}: no entries")
    return Manifest(entries, str(Path(path).parent))


@dataclass(frozen=True)
class FeatureTable:
    rows: np.ndarray
    labels: np.ndarray
    feature_names: tuple = FEATURE_NAMES
    source_paths: tuple = ()
    dropped: tuple = field(default=(), compare=False)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim == 1 and rows.size == 0:
            rows = rows.reshape(0, len(self.feature_names))
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "source_paths", tuple(self.source_paths))
        if rows.ndim != 2 or rows.shape[1] != len(self.feature_names):
            raise SchemaMismatch(
                f"rows of shape {rows.shape} do not match {len(self.feature_names)} feature names")
        if not (len(labels) == rows.shape[0] == len(self.source_paths)):
            raise SchemaMismatch("rows, labels and source_paths differ in length")

    def __len__(self):
        return self.rows.shape[0]

    def subset(self, index) -> "FeatureTable":
        index = np.asarray(index, dtype=np.int64)
        return FeatureTable(self.rows[index], self.labels[index], self.feature_names,
                            [self.source_paths[i] for i in index])

    def __eq__(self, other):
        if not isinstance(other, FeatureTable):
            return NotImplemented
        return (self.feature_names == other.feature_names
                and self.source_paths == other.source_paths
                and np.array_equal(self.labels, other.labels)
                and np.array_equal(self.rows, other.rows, equal_nan=True))


def _extract_one(args):
    path, config = args
    return extract_features(load_wav(path), config)


def build_table(manifest: Manifest, config: FeatureConfig | None = None,
                jobs: int = 1) -> FeatureTable:
    """One feature row per manifest entry, in manifest order."""
    config = config or FeatureConfig()
    resolved = [manifest.resolve(p) for p, _ in manifest.entries]
    missing = [p for (p, _), r in zip(manifest.entries, resolved)
               if not (r.is_file() and os.access(r, os.R_OK))]
    if missing:
        raise FileError(missing)
    work = [(r, config) for r in resolved]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_extract_one, work))
    else:
        rows = [_extract_one(w) for w in work]
    names = feature_names(config.n_mfcc)
    rows = np.vstack(rows) if rows else np.zeros((0, len(names)))
    return FeatureTable(rows, [lab for _, lab in manifest.entries], names,
                        [p for p, _ in manifest.entries])


def clean(table: FeatureTable) -> FeatureTable:
    """Drop rows holding any NaN/inf; ``dropped`` names the removed paths."""
    ok = np.all(np.isfinite(table.rows), axis=1)
    if len(table) and not ok.any():
        raise AllRowsDropped(f"all {len(table)} rows contain non-finite values")
    if ok.all():
        return table
    kept = table.subset(np.flatnonzero(ok))
    dropped = tuple(table.source_paths[i] for i in np.flatnonzero(~ok))
    for p in dropped:
        log.warning("dropping row with non-finite features: %s", p)
    return FeatureTable(kept.rows, kept.labels, kept.feature_names, kept.source_paths,
                        table.dropped + dropped)


@dataclass(frozen=True)
class ExplorationReport:
    n_rows: int
    class_counts: dict
    balance: dict
    feature_stats: list  # (name, min, max, mean, std)
    duplicates: list

    def to_text(self) -> str:
        out = [f"rows: {self.n_rows}"]
        for name in LABEL_NAMES:
            out.append(f"class {name}: {self.class_counts[name]} ({self.balance[name]:.4f})")
        for p in self.duplicates:
            out.append(f"warning: duplicate path {p}")
        out.append("")
        out.append(f"{'feature':<16} {'min':>14} {'max':>14} {'mean':>14} {'std':>14}")
        for name, lo, hi, mean, std in self.feature_stats:
            out.append(f"{name:<16} {lo:>14.6g} {hi:>14.6g} {mean:>14.6g} {std:>14.6g}")
        return "\n".join(out) + "\n"


def explore(table: FeatureTable) -> ExplorationReport:
    n = len(table)
    counts = {name: int(np.sum(table.labels == code)) for name, code in LABELS.items()}
    balance = {name: (c / n if n else 0.0) for name, c in counts.items()}
    stats = []
    for j, name in enumerate(table.feature_names):
        col = table.rows[:, j]
        if n and col.min() == col.max():
            v = float(col[0])
            stats.append((name, v, v, v, 0.0))
        elif n:
            stats.append((name, float(col.min()), float(col.max()), float(col.mean()), float(col.std())))
        else:
            stats.append((name, 0.0, 0.0, 0.0, 0.0))
    seen, dups = set(), []
    for p in table.source_paths:
        if p in seen and p not in dups:
            dups.append(p)
        seen.add(p)
    return ExplorationReport(n, counts, balance, stats, dups)


@dataclass(frozen=True)
class SplitResult:
    train_index: np.ndarray
    test_index: np.ndarray
    seed: int
    test_fraction: float
    table: FeatureTable = field(repr=False)

    @property
    def X_train(self):
        return self.table.rows[self.train_index]

    @property
    def y_train(self):
        return self.table.labels[self.train_index]

    @property
    def X_test(self):
        return self.table.rows[self.test_index]

    @property
    def y_test(self):
        return self.table.labels[self.test_index]

    def train_table(self) -> FeatureTable:
        return self.table.subset(self.train_index)

    def test_table(self) -> FeatureTable:
        return self.table.subset(self.test_index)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def split(table: FeatureTable, test_fraction: float = 0.2, seed: int = 42) -> SplitResult:
    """Stratified train/test split.

    Shuffling uses numpy's PCG64 generator (``np.random.default_rng(seed)``),
    permuting the real rows first, then the fake rows. The first
    round(count * test_fraction) of each class go to test.
    """
    if not 0 <= test_fraction < 1:
        raise ValueError("test_fraction must be in [0, 1)")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for code in (0, 1):
        idx = np.flatnonzero(table.labels == code)
        if test_fraction > 0 and idx.size == 0:
            raise DegenerateSplit(f"no '{LABEL_NAMES[code]}' rows to stratify")
        n_test = _round_half_up(idx.size * test_fraction)
        if idx.size and n_test >= idx.size:
            raise DegenerateSplit(
                f"class '{LABEL_NAMES[code]}' has {idx.size} rows; "
                f"test_fraction {test_fraction} leaves none for training")
        perm = rng.permutation(idx)
        test.append(perm[:n_test])
        train.append(perm[n_test:])
    train_idx = np.sort(np.concatenate(train)).astype(np.int64)
    test_idx = np.sort(np.concatenate(test)).astype(np.int64)
    return SplitResult(train_idx, test_idx, seed, test_fraction, table)


def table_to_csv(table: FeatureTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["path", "label", *table.feature_names])
    for path, label, row in zip(table.source_paths, table.labels, table.rows):
        w.writerow([path, LABEL_NAMES[label], *(format(float(v), ".17g") for v in row)])
    return buf.getvalue()


def save_table(table: FeatureTable, path) -> None:
    try:
        Path(path).write_text(table_to_csv(table))
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def load_table(path, feature_names=FEATURE_NAMES) -> FeatureTable:
    """Read a feature-table CSV; the header must list exactly ``feature_names``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    expected = ["path", "label", *feature_names]
    if header != expected:
        missing = [n for n in expected if header is None or n not in header]
        extra = [n for n in (header or []) if n not in expected]
        raise SchemaMismatch(f"{path}: unexpected header (missing {missing}, extra {extra})")
    paths, labels, rows = [], [], []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(expected):
            raise SchemaMismatch(f"{path}: line {lineno} has {len(rec)} fields, expected {len(expected)}")
        paths.append(rec[0])
        labels.append(parse_label(rec[1], f"{path}: line {lineno}: "))
        try:
            rows.append([float(v) for v in rec[2:]])
        except ValueError as exc:
            raise SchemaMismatch(f"{path}: line {lineno}: {exc}") from exc
    arr = np.array(rows, dtype=np.float64).reshape(len(rows), len(feature_names))
    return FeatureTable(arr, labels, tuple(feature_names), paths)
