"""Desk-scale end-to-end experiment on the synthetic corpus.

Generates the corpus, extracts features, runs RFE, trains both presets and
evaluates the chosen one on the held-out split. With --both-modes the
selection is repeated on the training rows only, to show how much the
default (selection on all rows) leaks.

    python3 scripts/run_experiment.py --out runs/desk
"""
import argparse
import sys
import time
from pathlib import Path

from antispoof.cli import main as cli
from antispoof.metrics import load_report


def stage(argv):
    t = time.perf_counter()
    if cli(argv) != 0:
        sys.exit(f"stage failed: {' '.join(argv)}")
    return time.perf_counter() - t


def run(out: Path, args, train_only: bool):
    tag = "train-only" if train_only else "paper-order"
    sel = out / f"selection.{tag}.json"
    model = out / f"model.{tag}.json"
    extra = ["--select-on-train-only"] if train_only else []
    timings = {
        "select": stage(["select", str(out / "features.csv"), "-o", str(sel), "-k", str(args.k),
                         "--seed", str(args.seed), *extra]),
        "train": stage(["train", str(out / "features.csv"), "--selection", str(sel),
                        "-o", str(model), "--preset", args.preset, "--seed", str(args.seed)]),
        "eval": stage(["eval", str(model), str(out / "features.csv"), "--selection", str(sel),
                       "--report", str(out / f"report.{tag}.txt"),
                       "--report-json", str(out / f"report.{tag}.json"),
                       "--roc", str(out / f"roc.{tag}.csv"), "--seed", str(args.seed)]),
    }
    return tag, load_report(out / f"report.{tag}.json"), timings


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/desk"))
    ap.add_argument("--n-real", type=int, default=100)
    ap.add_argument("--n-fake", type=int, default=100)
    ap.add_argument("--duration", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("-k", type=int, default=24)
    ap.add_argument("--preset", default="a")
    ap.add_argument("--both-modes", action="store_true")
    args = ap.parse_args()

    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    t_synth = stage(["synth-corpus", str(out / "corpus"), "--n-real", str(args.n_real),
                     "--n-fake", str(args.n_fake), "--duration", str(args.duration),
                     "--seed", str(args.seed)])
    t_extract = stage(["extract", str(out / "corpus" / "manifest.csv"),
                       "-o", str(out / "features.csv")])

    results = [run(out, args, False)]
    if args.both_modes:
        results.append(run(out, args, True))

    print()
    print(f"synth {t_synth:.1f}s  extract {t_extract:.1f}s")
    print(f"{'selection':<14}{'test_acc':>10}{'auc':>10}{'select_s':>10}{'train_s':>10}")
    for tag, rep, t in results:
        print(f"{tag:<14}{rep.accuracy:>10.4f}{rep.auc:>10.4f}{t['select']:>10.2f}{t['train']:>10.2f}")


if __name__ == "__main__":
    main()
