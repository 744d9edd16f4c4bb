import json

import pytest

from antispoof.cli import build_parser, main
from antispoof.dataset import load_table
from antispoof.gbdt import load_model


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    assert main(["synth-corpus", str(d), "--n-real", "16", "--n-fake", "16",
                 "--duration", "1.0", "--seed", "3"]) == 0
    return d


@pytest.fixture(scope="module")
def pipeline(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    table, sel, model = out / "t.csv", out / "sel.json", out / "m.json"
    assert main(["extract", str(corpus / "manifest.csv"), "-o", str(table)]) == 0
    assert main(["select", str(table), "-o", str(sel), "-k", "6", "--step", "8"]) == 0
    assert main(["train", str(table), "--selection", str(sel), "-o", str(model),
                 "--no-compare"]) == 0
    return out


def test_pipeline_files(pipeline, capsys):
    t = load_table(pipeline / "t.csv")
    assert len(t) == 32
    assert (pipeline / "t.csv.explore.txt").read_text().startswith("rows: 32")
    sel = json.loads((pipeline / "sel.json").read_text())
    assert len(sel["selected"]) == 6 and sel["mode"] == "paper-order"
    m = load_model(pipeline / "m.json")
    assert m.feature_names == sel["selected_names"]
    assert m.metadata["preset"] == "preset-a" and m.metadata["selection_mode"] == "paper-order"


def test_eval_and_infer(pipeline, corpus, capsys):
    rc = main(["eval", str(pipeline / "m.json"), str(pipeline / "t.csv"),
               "--report", str(pipeline / "r.txt"), "--roc", str(pipeline / "roc.csv")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "Weighted avg." in out and "auc=" in out
    assert (pipeline / "r.txt.json").exists()
    assert (pipeline / "roc.csv").read_text().startswith("threshold,fpr,tpr\ninf,0,0\n")
    assert main(["infer", str(pipeline / "m.json"), str(corpus / "fake_0000.wav")]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("label=") and "proba_fake=" in line


def test_train_compares_presets(pipeline, capsys):
    assert main(["train", str(pipeline / "t.csv"), "-o", str(pipeline / "m2.json"),
                 "--preset", "b"]) == 0
    out = capsys.readouterr().out
    assert "preset-a" in out and "preset-b" in out and "deep-tabular" in out
    assert load_model(pipeline / "m2.json").metadata["preset"] == "preset-b"


def test_train_only_selection_mode(pipeline):
    sel = pipeline / "sel_train.json"
    assert main(["select", str(pipeline / "t.csv"), "-o", str(sel), "-k", "4", "--step", "10",
                 "--select-on-train-only"]) == 0
    assert json.loads(sel.read_text())["mode"] == "train-only"


def test_extract_deterministic(corpus, tmp_path):
    for name in ("a.csv", "b.csv"):
        assert main(["extract", str(corpus / "manifest.csv"), "-o", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_bad_label_names_row(tmp_path, capsys):
    (tmp_path / "m.csv").write_text("path,label\na.wav,real\nb.wav,human\n")
    assert main(["extract", str(tmp_path / "m.csv"), "-o", str(tmp_path / "t.csv")]) != 0
    err = capsys.readouterr().err
    assert "BadLabel" in err and "row 3" in err


def test_missing_audio_named(tmp_path, capsys):
    (tmp_path / "m.csv").write_text("path,label\nnowhere.wav,real\n")
    assert main(["extract", str(tmp_path / "m.csv"), "-o", str(tmp_path / "t.csv")]) == 1
    assert "nowhere.wav" in capsys.readouterr().err


def test_corrupt_wav(corpus, tmp_path, capsys):
    (tmp_path / "bad.wav").write_bytes(b"RIFF\x00\x00\x00\x00WAVEjunk")
    (tmp_path / "m.csv").write_text("path,label\nbad.wav,fake\n")
    assert main(["extract", str(tmp_path / "m.csv"), "-o", str(tmp_path / "t.csv")]) == 1
    assert "MalformedWav" in capsys.readouterr().err


def test_single_class_training(pipeline, tmp_path, capsys):
    text = (pipeline / "t.csv").read_text().splitlines()
    real_only = [text[0]] + [ln for ln in text[1:] if ",real," in ln]
    (tmp_path / "real.csv").write_text("\n".join(real_only) + "\n")
    rc = main(["train", str(tmp_path / "real.csv"), "-o", str(tmp_path / "m.json"),
               "--no-compare"])
    assert rc == 1
    assert "DegenerateSplit" in capsys.readouterr().err
    assert not (tmp_path / "m.json").exists()


def test_single_class_training_without_split(pipeline, tmp_path, capsys):
    text = (pipeline / "t.csv").read_text().splitlines()
    real_only = [text[0]] + [ln for ln in text[1:] if ",real," in ln]
    (tmp_path / "real.csv").write_text("\n".join(real_only) + "\n")
    (tmp_path / "cfg.txt").write_text("test_fraction = 0\n")
    rc = main(["train", str(tmp_path / "real.csv"), "-o", str(tmp_path / "m.json"),
               "--no-compare", "--config", str(tmp_path / "cfg.txt")])
    assert rc == 1
    assert "SingleClass" in capsys.readouterr().err


def test_missing_table(tmp_path, capsys):
    assert main(["select", str(tmp_path / "none.csv"), "-o", str(tmp_path / "s.json")]) == 1
    assert "IoError" in capsys.readouterr().err


def test_config_file_and_unknown_key(pipeline, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run settings\nseed = 7\ntarget_k = 5\nrfe_preset = preset-b\n")
    assert main(["select", str(pipeline / "t.csv"), "-o", str(tmp_path / "s.json"),
                 "--config", str(cfg), "--step", "10"]) == 0
    assert len(json.loads((tmp_path / "s.json").read_text())["selected"]) == 5
    cfg.write_text("colour = blue\n")
    assert main(["select", str(pipeline / "t.csv"), "-o", str(tmp_path / "s.json"),
                 "--config", str(cfg)]) == 1
    assert "colour" in capsys.readouterr().err


def test_synth_hidden_from_help():
    text = build_parser().format_help()
    assert "synth-corpus" not in text
    for cmd in ("extract", "select", "train", "eval", "infer"):
        assert cmd in text
