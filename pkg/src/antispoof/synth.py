"""Synthetic real/fake voice corpus.

"Real" clips are harmonic voices whose f0 carries vibrato and random
cycle-scale jitter, whose amplitude carries shimmer and a syllabic envelope,
with a little breath noise. "Fake" clips are sterile resynthesized tones:
the same kind of harmonic spectrum on a fixed f0 with a flat envelope.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio_io import write_wav


def _smooth_noise(rng: np.random.Generator, n: int, sr: int, rate: float) -> np.ndarray:
    """Unit-variance noise held at ``rate`` Hz and linearly interpolated."""
    n_ctrl = int(np.ceil(n / sr * rate)) + 2
    ctrl = rng.standard_normal(n_ctrl)
    return np.interp(np.arange(n) * rate / sr, np.arange(n_ctrl), ctrl)


def _formant_gain(freqs: np.ndarray, centers, widths) -> np.ndarray:
    g = np.full_like(freqs, 0.02)
    for c, w in zip(centers, widths):
        g += np.exp(-0.5 * ((freqs - c) / w) ** 2)
    return g


def _harmonics(phase: np.ndarray, f0_max: float, sr: int, centers, widths, tilt: float,
               f0_ref: float) -> np.ndarray:
    out = np.zeros_like(phase)
    h = 1
    while h * f0_max < 0.45 * sr:
        amp = h ** -tilt * _formant_gain(np.array([h * f0_ref]), centers, widths)[0]
        out += amp * np.sin(h * phase)
        h += 1
    return out


def synth_voice(rng: np.random.Generator, kind: str, duration: float = 2.0,
                sample_rate: int = 16000) -> np.ndarray:
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    f0_base = rng.uniform(100.0, 220.0)
    centers = (rng.uniform(500, 900), rng.uniform(1000, 2000), rng.uniform(2300, 3200))
    widths = (rng.uniform(60, 120), rng.uniform(80, 150), rng.uniform(100, 200))
    tilt = rng.uniform(0.6, 1.2)

    if kind == "real":
        vib_rate = rng.uniform(4.5, 6.5)
        vib_depth = rng.uniform(0.01, 0.03)
        jitter = rng.uniform(0.01, 0.02) * _smooth_noise(rng, n, sample_rate, 60.0)
        f0 = f0_base * (1.0 + vib_depth * np.sin(2 * np.pi * vib_rate * t
                                                 + rng.uniform(0, 2 * np.pi)) + jitter)
        shimmer = rng.uniform(0.08, 0.15) * _smooth_noise(rng, n, sample_rate, 40.0)
        syllable = 0.75 + 0.25 * np.sin(2 * np.pi * rng.uniform(2.0, 4.0) * t
                                        + rng.uniform(0, 2 * np.pi))
        env = np.clip(syllable * (1.0 + shimmer), 0.05, None)
        breath = rng.uniform(0.005, 0.02)
    elif kind == "fake":
        f0 = np.full(n, f0_base)
        env = np.ones(n)
        breath = 0.0
    else:
        raise ValueError(f"kind must be 'real' or 'fake', got {kind!r}")

    phase = 2 * np.pi * np.cumsum(f0) / sample_rate
    x = _harmonics(phase, f0.max(), sample_rate, centers, widths, tilt, f0_base) * env
    if breath:
        x += breath * np.abs(x).max() * rng.standard_normal(n)
    fade = min(n // 2, int(0.01 * sample_rate))
    ramp = np.linspace(0.0, 1.0, fade)
    x[:fade] *= ramp
    x[n - fade:] *= ramp[::-1]
    return x / np.abs(x).max() * rng.uniform(0.4, 0.8)


def write_corpus(out_dir, n_real: int = 100, n_fake: int = 100, duration: float = 2.0,
                 sample_rate: int = 16000, seed: int = 42) -> Path:
    """Write WAV clips plus ``manifest.csv`` into ``out_dir``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    root = np.random.SeedSequence(seed)
    kinds = ["real"] * n_real + ["fake"] * n_fake
    streams = root.spawn(len(kinds))
    lines = ["path,label"]
    counters = {"real": 0, "fake": 0}
    for kind, ss in zip(kinds, streams):
        name = f"{kind}_{counters[kind]:04d}.wav"
        counters[kind] += 1
        x = synth_voice(np.random.default_rng(ss), kind, duration, sample_rate)
        write_wav(out / name, x, sample_rate)
        lines.append(f"{name},{kind}")
    manifest = out / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest


def planted_table(seed: int, n_rows: int = 400, n_features: int = 48, n_informative: int = 3):
    """Gaussian table whose label is the majority sign of a few hidden columns.

    Returns (X, y, informative) with ``informative`` the sorted planted indices.
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_rows, n_features))
    informative = np.sort(rng.choice(n_features, n_informative, replace=False))
    votes = (X[:, informative] > 0).sum(axis=1)
    y = (2 * votes > n_informative).astype(np.int64)
    return X, y, informative
