import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antispoof.audio_io import write_wav
from antispoof.dataset import (FeatureTable, build_table, clean, explore, load_manifest,
                               load_table, parse_label, save_table, split)
from antispoof.errors import (AllRowsDropped, BadLabel, DegenerateSplit, EmptyManifest,
                              FileError, SchemaMismatch)
from antispoof.features import FEATURE_NAMES

from conftest import SR, sine


def _table(n_real, n_fake, d=3, rng=None, seed=0):
    rng = rng or np.random.default_rng(seed)
    n = n_real + n_fake
    names = tuple(f"f{i}" for i in range(d))
    return FeatureTable(rng.standard_normal((n, d)), [0] * n_real + [1] * n_fake, names,
                        [f"clip_{i}.wav" for i in range(n)])


def _manifest(tmp_path, body):
    p = tmp_path / "manifest.csv"
    p.write_text("path,label\n" + body)
    return p


# -- manifest ---------------------------------------------------------------------

def test_parse_label_forms():
    assert [parse_label(s) for s in ("real", "FAKE", " Real ", "0", "1")] == [0, 1, 0, 0, 1]
    with pytest.raises(BadLabel):
        parse_label("bonafide")


def test_manifest_relative_paths(tmp_path):
    m = load_manifest(_manifest(tmp_path, "a.wav,real\nsub/b.wav,Fake\n"))
    assert m.entries == [("a.wav", 0), ("sub/b.wav", 1)]
    assert m.resolve("sub/b.wav") == tmp_path / "sub" / "b.wav"


def test_manifest_bad_label_names_row(tmp_path):
    with pytest.raises(BadLabel, match="row 3"):
        load_manifest(_manifest(tmp_path, "a.wav,real\nb.wav,spoof\n"))


def test_manifest_empty(tmp_path):
    with pytest.raises(EmptyManifest):
        load_manifest(_manifest(tmp_path, ""))


def test_manifest_bad_header(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("file,class\na.wav,real\n")
    with pytest.raises(BadLabel):
        load_manifest(p)


def test_missing_file_is_named(tmp_path):
    write_wav(tmp_path / "here.wav", sine(200.0, 0.2), SR)
    m = load_manifest(_manifest(tmp_path, "here.wav,real\ngone.wav,fake\n"))
    with pytest.raises(FileError) as info:
        build_table(m)
    assert info.value.paths == ["gone.wav"]
    assert "gone.wav" in str(info.value) and "here.wav" not in str(info.value)


def test_build_table_keeps_order_and_duplicates(tmp_path):
    write_wav(tmp_path / "a.wav", sine(150.0, 0.3), SR)
    write_wav(tmp_path / "b.wav", sine(250.0, 0.3), SR)
    m = load_manifest(_manifest(tmp_path, "a.wav,real\nb.wav,fake\na.wav,real\n"))
    t = build_table(m)
    assert t.rows.shape == (3, 48)
    assert t.feature_names == FEATURE_NAMES
    assert list(t.labels) == [0, 1, 0]
    np.testing.assert_array_equal(t.rows[0], t.rows[2])
    assert explore(t).duplicates == ["a.wav"]


def test_build_table_parallel_matches_serial(tmp_path):
    for i in range(4):
        write_wav(tmp_path / f"c{i}.wav", sine(120.0 + 30 * i, 0.3), SR)
    m = load_manifest(_manifest(tmp_path, "".join(f"c{i}.wav,{'real' if i % 2 else 'fake'}\n"
                                                  for i in range(4))))
    assert build_table(m, jobs=2) == build_table(m, jobs=1)


# -- cleaning -------------------------------------------------------------------------

def test_clean_identity_on_finite():
    t = _table(5, 5)
    assert clean(t) is t


def test_clean_drops_nonfinite_rows():
    t = _table(4, 4)
    rows = t.rows.copy()
    rows[1, 0] = np.nan
    rows[6, 2] = np.inf
    dirty = FeatureTable(rows, t.labels, t.feature_names, t.source_paths)
    c = clean(dirty)
    assert len(c) == 6
    assert c.dropped == ("clip_1.wav", "clip_6.wav")
    assert "clip_1.wav" not in c.source_paths
    assert clean(c) == c


def test_clean_everything_dropped():
    t = _table(2, 2)
    with pytest.raises(AllRowsDropped):
        clean(FeatureTable(np.full_like(t.rows, np.nan), t.labels, t.feature_names,
                           t.source_paths))


@given(st.lists(st.booleans(), min_size=1, max_size=30), st.integers(0, 2**32 - 1))
def test_clean_idempotent(bad, seed):
    rng = np.random.default_rng(seed)
    rows = rng.standard_normal((len(bad), 2))
    rows[np.array(bad), 0] = np.nan
    t = FeatureTable(rows, [0] * len(bad), ("a", "b"), [str(i) for i in range(len(bad))])
    if all(bad):
        with pytest.raises(AllRowsDropped):
            clean(t)
        return
    once = clean(t)
    assert clean(once) == once
    assert np.all(np.isfinite(once.rows))
    assert len(once) + len(once.dropped) == len(bad)


# -- exploration -------------------------------------------------------------------------

def test_explore_counts_and_constant_column():
    t = _table(60, 40)
    rows = t.rows.copy()
    rows[:, 1] = 0.1
    t = FeatureTable(rows, t.labels, t.feature_names, t.source_paths)
    rep = explore(t)
    assert rep.n_rows == 100
    assert rep.class_counts == {"real": 60, "fake": 40}
    assert rep.balance == {"real": 0.6, "fake": 0.4}
    name, lo, hi, mean, std = rep.feature_stats[1]
    assert (name, lo, hi, mean, std) == ("f1", 0.1, 0.1, 0.1, 0.0)
    assert rep.duplicates == []
    assert rep.to_text() == explore(t).to_text()
    assert "class real: 60 (0.6000)" in rep.to_text()


# -- splitting ------------------------------------------------------------------------------

def test_split_ten_rows():
    t = _table(5, 5)
    s = split(t, 0.2, seed=42)
    assert list(np.bincount(s.y_train)) == [4, 4]
    assert list(np.bincount(s.y_test)) == [1, 1]
    assert sorted(np.concatenate([s.train_index, s.test_index])) == list(range(10))


def test_split_fraction_zero():
    s = split(_table(3, 3), 0.0)
    assert len(s.test_index) == 0 and list(s.train_index) == list(range(6))


def test_split_deterministic_and_seed_sensitive():
    t = _table(50, 50)
    a, b = split(t, 0.2, 7), split(t, 0.2, 7)
    assert np.array_equal(a.test_index, b.test_index)
    assert any(not np.array_equal(a.test_index, split(t, 0.2, s).test_index) for s in range(8, 12))


def test_split_degenerate():
    with pytest.raises(DegenerateSplit):
        split(_table(1, 5), 0.5)
    with pytest.raises(DegenerateSplit):
        split(_table(0, 5), 0.2)
    with pytest.raises(ValueError):
        split(_table(5, 5), 1.0)


@given(n_real=st.integers(2, 60), n_fake=st.integers(2, 60),
       frac=st.floats(0.05, 0.45), seed=st.integers(0, 2**32 - 1))
def test_split_properties(n_real, n_fake, frac, seed):
    t = _table(n_real, n_fake)
    try:
        s = split(t, frac, seed)
    except DegenerateSplit:
        # only when rounding would leave a class without training rows
        assert min(n_real, n_fake) * frac + 0.5 >= min(n_real, n_fake)
        return
    tr, te = set(s.train_index.tolist()), set(s.test_index.tolist())
    assert not tr & te and tr | te == set(range(n_real + n_fake))
    for code, count in ((0, n_real), (1, n_fake)):
        assert np.sum(s.y_test == code) == int(np.floor(count * frac + 0.5))
    assert np.all(np.diff(s.train_index) > 0) and np.all(np.diff(s.test_index) > 0)
    assert s.train_table() == t.subset(s.train_index)


# -- persistence ------------------------------------------------------------------------------

def test_table_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(3)
    names = FEATURE_NAMES
    t = FeatureTable(rng.standard_normal((7, 48)) * 10.0 ** rng.integers(-12, 12, (7, 48)),
                     rng.integers(0, 2, 7), names, [f"x,{i}.wav" for i in range(7)])
    save_table(t, tmp_path / "t.csv")
    back = load_table(tmp_path / "t.csv")
    assert back == t
    assert back.rows.tobytes() == t.rows.tobytes()


def test_table_missing_column(tmp_path):
    t = _table(2, 2)
    save_table(t, tmp_path / "t.csv")
    with pytest.raises(SchemaMismatch):
        load_table(tmp_path / "t.csv", ("f0", "f1", "f2", "f3"))
    with pytest.raises(SchemaMismatch):
        load_table(tmp_path / "t.csv")


def test_header_only_table(tmp_path):
    empty = FeatureTable(np.zeros((0, 3)), [], ("a", "b", "c"), [])
    save_table(empty, tmp_path / "e.csv")
    back = load_table(tmp_path / "e.csv", ("a", "b", "c"))
    assert len(back) == 0 and back.rows.shape == (0, 3)
