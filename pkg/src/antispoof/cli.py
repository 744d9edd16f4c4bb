"""Command-line pipeline: extract -> select -> train -> eval, plus infer.

Each stage reads and writes files, so stages can be cached and rerun
independently. Results go to stdout, diagnostics to stderr; the exit status
is non-zero exactly when an error was reported.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import dataset, gbdt, metrics, selection, synth
from .audio_io import load_wav
from .errors import AntispoofError, SchemaMismatch
from .features import FEATURE_NAMES, FeatureConfig, extract_features
from .kvconfig import coerce, read_kv

log = logging.getLogger("antispoof")

SELECTION_MODES = ("paper-order", "train-only")
DEEP_TABULAR_ROW = "deep-tabular"


@dataclass(frozen=True)
class RunConfig:
    """Run-level settings. Config files mix these keys with FeatureConfig keys."""

    test_fraction: float = 0.2
    seed: int = 42
    target_k: int = selection.DEFAULT_TARGET_K
    step: int = 1
    rfe_preset: str = selection.DEFAULT_RFE_PRESET
    preset: str = "preset-a"
    selection_mode: str = "paper-order"
    threshold: float = 0.5
    features: FeatureConfig = field(default_factory=FeatureConfig)

    def __post_init__(self):
        if not 0 <= self.test_fraction < 1:
            raise ValueError("test_fraction must be in [0, 1)")
        if self.selection_mode not in SELECTION_MODES:
            raise ValueError(f"selection_mode must be one of {SELECTION_MODES}")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0, 1)")
        gbdt.get_preset(self.preset)
        gbdt.get_preset(self.rfe_preset)

    @classmethod
    def from_values(cls, values: dict) -> "RunConfig":
        feature_keys = {f.name for f in dataclasses.fields(FeatureConfig)}
        run_keys = {f.name for f in dataclasses.fields(cls)} - {"features"}
        unknown = set(values) - feature_keys - run_keys
        if unknown:
            raise KeyError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        feats = coerce(FeatureConfig, {k: v for k, v in values.items() if k in feature_keys})
        run = coerce(cls, {k: v for k, v in values.items() if k in run_keys})
        return dataclasses.replace(run, features=feats)


def _resolve_config(args) -> RunConfig:
    values = read_kv(args.config) if getattr(args, "config", None) else {}
    cfg = RunConfig.from_values(values)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "preset", None) is not None:
        name = args.preset if args.preset.startswith("preset-") else f"preset-{args.preset}"
        gbdt.get_preset(name)
        overrides["preset"] = name
    if getattr(args, "select_on_train_only", False):
        overrides["selection_mode"] = "train-only"
    if getattr(args, "threshold", None) is not None:
        overrides["threshold"] = args.threshold
    if getattr(args, "k", None) is not None:
        overrides["target_k"] = args.k
    if getattr(args, "step", None) is not None:
        overrides["step"] = args.step
    return dataclasses.replace(cfg, **overrides)


def _load_selected_table(table_path, selection_path) -> tuple[dataset.FeatureTable, str]:
    table = dataset.load_table(table_path)
    if not selection_path:
        return table, "none"
    sel = selection.load_selection(selection_path)
    if sel.feature_names and tuple(sel.feature_names) != table.feature_names:
        raise SchemaMismatch(f"{selection_path}: feature names do not match {table_path}")
    return selection.apply_selection(table, sel), sel.mode


def _columns_for_model(table: dataset.FeatureTable, model: gbdt.GbdtModel) -> np.ndarray:
    pos = {name: i for i, name in enumerate(table.feature_names)}
    missing = [n for n in model.feature_names if n not in pos]
    if missing:
        raise SchemaMismatch(f"table lacks model features: {', '.join(missing)}")
    return table.rows[:, [pos[n] for n in model.feature_names]]


def _accuracy(model, X, y, threshold) -> float | None:
    if len(y) == 0:
        return None
    return float(np.mean(gbdt.predict_label(model, X, threshold) == y))


# -- subcommands ------------------------------------------------------------

def cmd_extract(args) -> int:
    cfg = _resolve_config(args)
    manifest = dataset.load_manifest(args.manifest)
    raw = dataset.build_table(manifest, cfg.features, jobs=args.jobs)
    table = dataset.clean(raw)
    dataset.save_table(table, args.out)
    report_path = args.report or f"{args.out}.explore.txt"
    Path(report_path).write_text(dataset.explore(table).to_text())
    print(f"rows={len(table)} dropped={len(raw) - len(table)}")
    for p in table.dropped:
        print(f"dropped {p}", file=sys.stderr)
    return 0


def cmd_select(args) -> int:
    cfg = _resolve_config(args)
    table = dataset.load_table(args.table)
    source = table
    if cfg.selection_mode == "train-only":
        source = dataset.split(table, cfg.test_fraction, cfg.seed).train_table()
    result = selection.rfe(source, cfg.target_k, cfg.step, gbdt.get_preset(cfg.rfe_preset))
    result = dataclasses.replace(result, mode=cfg.selection_mode)
    selection.save_selection(result, args.out)
    for name in result.selected_names:
        print(name)
    return 0


def cmd_train(args) -> int:
    cfg = _resolve_config(args)
    table, mode = _load_selected_table(args.table, args.selection)
    sp = dataset.split(table, cfg.test_fraction, cfg.seed)
    presets = [cfg.preset] + ([p for p in gbdt.PRESETS if p != cfg.preset] if args.compare else [])
    rows = []
    for name in presets:
        meta = {"preset": name, "selection_mode": mode, "seed": cfg.seed,
                "test_fraction": cfg.test_fraction}
        model = gbdt.train(sp.X_train, sp.y_train, gbdt.get_preset(name),
                           table.feature_names, meta)
        if name == cfg.preset:
            gbdt.save_model(model, args.out)
        rows.append((name, _accuracy(model, sp.X_train, sp.y_train, cfg.threshold),
                     _accuracy(model, sp.X_test, sp.y_test, cfg.threshold)))

    def fmt(v):
        return "n/a" if v is None else f"{v:.4f}"

    print(f"{'model':<16}{'train_acc':>12}{'test_acc':>12}")
    for name, tr, te in sorted(rows):
        print(f"{name:<16}{fmt(tr):>12}{fmt(te):>12}")
    print(f"{DEEP_TABULAR_ROW:<16}{'not implemented':>24}")
    return 0


def cmd_eval(args) -> int:
    cfg = _resolve_config(args)
    model = gbdt.load_model(args.model)
    table = dataset.load_table(args.table)
    if args.selection:
        sel = selection.load_selection(args.selection)
        if list(sel.selected_names) and list(sel.selected_names) != list(model.feature_names):
            raise SchemaMismatch(f"{args.selection} does not match the model's features")
    if args.all_rows:
        part = table
    else:
        part = dataset.split(table, cfg.test_fraction, cfg.seed).test_table()
    X = _columns_for_model(part, model)
    scores = gbdt.predict_proba(model, X)
    pred = (scores >= cfg.threshold).astype(np.int64)
    curve = metrics.roc(scores, part.labels)
    model_id = model.metadata.get("preset", Path(args.model).stem)
    report = metrics.evaluate(part.labels, pred, model_id, cfg.threshold)
    report = dataclasses.replace(
        report, auc=curve.auc,
        extra={"selection_mode": model.metadata.get("selection_mode", "none"),
               "rows": "all" if args.all_rows else "test"})
    metrics.save_report(report, args.report, args.report_json or f"{args.report}.json")
    metrics.save_roc(curve, args.roc)
    sys.stdout.write(report.to_text())
    print(f"auc={format(curve.auc, '.17g')}")
    return 0


def cmd_infer(args) -> int:
    cfg = _resolve_config(args)
    model = gbdt.load_model(args.model)
    vec = extract_features(load_wav(args.audio), cfg.features)
    names = list(FEATURE_NAMES)
    if args.selection:
        sel = selection.load_selection(args.selection)
        if list(sel.selected_names) != list(model.feature_names):
            raise SchemaMismatch(f"{args.selection} does not match the model's features")
    pos = {n: i for i, n in enumerate(names)}
    missing = [n for n in model.feature_names if n not in pos]
    if missing:
        raise SchemaMismatch(f"model expects unknown features: {', '.join(missing)}")
    x = vec[[pos[n] for n in model.feature_names]]
    p = gbdt.predict_proba(model, x)
    label = dataset.LABEL_NAMES[int(p >= cfg.threshold)]
    print(f"label={label} proba_fake={p:.6f}")
    return 0


def cmd_synth(args) -> int:
    cfg = _resolve_config(args)
    manifest = synth.write_corpus(args.out_dir, args.n_real, args.n_fake, args.duration,
                                  cfg.features.sample_rate, cfg.seed)
    print(manifest)
    return 0


# -- argument parsing -------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a flag given before the subcommand from being reset after it
    g = p.add_argument_group("global options")
    g.add_argument("--config", default=argparse.SUPPRESS, help="key = value config file")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--preset", default=argparse.SUPPRESS, help="a or b")
    g.add_argument("--select-on-train-only", action="store_true", default=argparse.SUPPRESS)
    g.add_argument("--all-rows", action="store_true", default=argparse.SUPPRESS)
    g.add_argument("--threshold", type=float, default=argparse.SUPPRESS)
    g.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="antispoof", parents=[common],
                                     description="Deepfake speech detection pipeline.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("extract", parents=[common], help="manifest -> feature table CSV")
    p.add_argument("manifest")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--report", help="exploration report path (default: OUT.explore.txt)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("select", parents=[common], help="recursive feature elimination")
    p.add_argument("table")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("-k", type=int, default=None, help="features to keep")
    p.add_argument("--step", type=int, default=None)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("train", parents=[common], help="train and save a model")
    p.add_argument("table")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--selection")
    p.add_argument("--no-compare", dest="compare", action="store_false",
                   help="train only the chosen preset")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", parents=[common], help="score a model on the test split")
    p.add_argument("model")
    p.add_argument("table")
    p.add_argument("--selection")
    p.add_argument("--report", required=True)
    p.add_argument("--report-json")
    p.add_argument("--roc", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("infer", parents=[common], help="classify one WAV file")
    p.add_argument("model")
    p.add_argument("audio")
    p.add_argument("--selection")
    p.set_defaults(func=cmd_infer)

    # fixture generator, not advertised in --help
    p = sub.add_parser("synth-corpus", parents=[common])
    p.add_argument("out_dir")
    p.add_argument("--n-real", type=int, default=100)
    p.add_argument("--n-fake", type=int, default=100)
    p.add_argument("--duration", type=float, default=2.0)
    p.set_defaults(func=cmd_synth)
    sub._choices_actions = [a for a in sub._choices_actions if a.dest != "synth-corpus"]
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("all_rows", "select_on_train_only", "verbose"):
        if not hasattr(args, name):
            setattr(args, name, False)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (AntispoofError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
