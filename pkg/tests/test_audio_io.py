import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antispoof.audio_io import (AudioClip, frame, hann, load_wav, n_frames,
                                resample, write_wav)
from antispoof.errors import MalformedWav, UnsupportedFormat
from antispoof.features import extract_features, pitch_track

from conftest import sine


def test_mono_pcm16_roundtrip(tmp_path):
    x = sine(440.0)
    write_wav(tmp_path / "a.wav", x, 16000)
    clip = load_wav(tmp_path / "a.wav")
    assert clip.sample_rate == 16000
    assert len(clip.samples) == 16000
    assert np.max(np.abs(clip.samples - x)) < 1.0 / 32768 * 1.01


def test_float32_is_clamped(tmp_path):
    x = np.array([0.0, 0.5, 1.5, -2.0])
    write_wav(tmp_path / "f.wav", x, 8000, fmt="float32")
    clip = load_wav(tmp_path / "f.wav")
    np.testing.assert_array_equal(clip.samples, [0.0, 0.5, 1.0, -1.0])


def test_pcm16_scaling(tmp_path):
    body = np.array([-32768, 0, 16384], dtype="<i2").tobytes()
    fmt = struct.pack("<HHIIHH", 1, 1, 8000, 16000, 2, 16)
    data = b"fmt " + struct.pack("<I", 16) + fmt + b"data" + struct.pack("<I", len(body)) + body
    (tmp_path / "s.wav").write_bytes(b"RIFF" + struct.pack("<I", 4 + len(data)) + b"WAVE" + data)
    np.testing.assert_array_equal(load_wav(tmp_path / "s.wav").samples, [-1.0, 0.0, 0.5])


def test_stereo_opposite_channels_cancel(tmp_path):
    x = sine(300.0, 0.1)
    write_wav(tmp_path / "st.wav", np.stack([x, -x], axis=1), 16000)
    clip = load_wav(tmp_path / "st.wav")
    assert np.all(clip.samples == 0.0)


def test_stereo_identical_channels_reproduce_channel(tmp_path):
    x = sine(300.0, 0.1)
    write_wav(tmp_path / "mono.wav", x, 16000)
    write_wav(tmp_path / "dup.wav", np.stack([x, x], axis=1), 16000)
    np.testing.assert_array_equal(load_wav(tmp_path / "dup.wav").samples,
                                  load_wav(tmp_path / "mono.wav").samples)


def test_truncated_data_chunk(tmp_path):
    write_wav(tmp_path / "t.wav", sine(200.0, 0.1), 16000)
    raw = (tmp_path / "t.wav").read_bytes()
    (tmp_path / "t.wav").write_bytes(raw[:-100])
    with pytest.raises(MalformedWav):
        load_wav(tmp_path / "t.wav")


def test_not_riff(tmp_path):
    (tmp_path / "x.wav").write_bytes(b"hello world, not audio")
    with pytest.raises(MalformedWav):
        load_wav(tmp_path / "x.wav")


@pytest.mark.parametrize("code,bits", [(1, 8), (1, 24), (2, 16), (3, 64)])
def test_unsupported_formats(tmp_path, code, bits):
    fmt = struct.pack("<HHIIHH", code, 1, 8000, 8000 * bits // 8, bits // 8, bits)
    body = b"\x00" * 16
    data = b"fmt " + struct.pack("<I", 16) + fmt + b"data" + struct.pack("<I", len(body)) + body
    (tmp_path / "u.wav").write_bytes(b"RIFF" + struct.pack("<I", 4 + len(data)) + b"WAVE" + data)
    with pytest.raises(UnsupportedFormat):
        load_wav(tmp_path / "u.wav")


def test_resample_identity_and_length():
    clip = AudioClip(sine(100.0), 16000)
    assert resample(clip, 16000) is clip
    low = AudioClip(sine(100.0, sr=8000), 8000)
    assert len(resample(low, 16000).samples) == 16000


def test_resampled_sine_keeps_pitch():
    clip48 = AudioClip(sine(100.0, sr=48000), 48000)
    clip16 = resample(clip48, 16000)
    assert clip16.sample_rate == 16000 and len(clip16.samples) == 16000
    track = pitch_track(clip16)
    assert track.voiced.all()
    assert np.all(np.abs(track.f0 - 100.0) <= 2.0)
    # the full vector resamples internally before tracking pitch
    assert abs(extract_features(clip48)[0] - 100.0) <= 2.0


def test_frame_counts():
    clip = AudioClip(np.zeros(1000), 16000)
    assert frame(clip, 400, 160).n_frames == 4
    assert frame(AudioClip(np.zeros(400), 16000), 400, 160).n_frames == 1
    assert frame(AudioClip(np.zeros(399), 16000), 400, 160).n_frames == 0


def test_rectangular_frame_is_identity(rng):
    x = rng.uniform(-1, 1, 2000)
    fm = frame(AudioClip(x, 16000), 512, 256, "rectangular")
    np.testing.assert_array_equal(fm.frames[0], x[:512])
    np.testing.assert_array_equal(fm.frames[2], x[512:1024])


def test_hann_window_shape():
    w = hann(5)
    np.testing.assert_allclose(w, [0.0, 0.5, 1.0, 0.5, 0.0], atol=1e-15)
    fm = frame(AudioClip(np.ones(10), 16000), 5, 5, "hann")
    np.testing.assert_allclose(fm.frames, np.vstack([w, w]))


@given(length=st.integers(0, 3000), n=st.integers(2, 600), hop=st.integers(1, 400))
def test_frame_count_formula(length, n, hop):
    fm = frame(AudioClip(np.zeros(length), 16000), n, hop, "rectangular")
    expected = (length - n) // hop + 1 if length >= n else 0
    assert fm.n_frames == expected == n_frames(length, n, hop)
    assert fm.frames.shape == (expected, n)


def test_load_resample_frame_deterministic(tmp_path, rng):
    write_wav(tmp_path / "d.wav", rng.uniform(-0.5, 0.5, 5000), 16000)
    runs = [frame(resample(load_wav(tmp_path / "d.wav"), 16000), 512, 256).frames
            for _ in range(2)]
    assert runs[0].tobytes() == runs[1].tobytes()


def test_clip_is_immutable():
    clip = AudioClip(np.zeros(10), 8000)
    with pytest.raises(ValueError):
        clip.samples[0] = 1.0
