"""Autocorrelation pitch tracking and frame-level jitter/shimmer."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..audio_io import AudioClip, frame


@dataclass(frozen=True)
class PitchTrack:
    f0: np.ndarray  # Hz, 0 where unvoiced
    voiced: np.ndarray
    peak_amp: np.ndarray
    frame_length: int
    hop_length: int
    sample_rate: int


def autocorrelation(frames: np.ndarray, max_lag: int) -> np.ndarray:
    """Raw autocorrelation r[0..max_lag] of each row, via zero-padded FFT."""
    n = frames.shape[1]
    nfft = 1 << int(math.ceil(math.log2(2 * n)))
    spec = np.fft.rfft(frames, n=nfft, axis=1)
    return np.fft.irfft(spec.real ** 2 + spec.imag ** 2, n=nfft, axis=1)[:, :max_lag + 1]


def lag_range(sample_rate: int, f0_min: float, f0_max: float) -> tuple[int, int]:
    return int(math.ceil(sample_rate / f0_max)), int(math.floor(sample_rate / f0_min))


def pitch_track(clip: AudioClip, frame_length: int = 1024, hop_length: int = 256,
                f0_min: float = 50.0, f0_max: float = 500.0,
                voicing_threshold: float = 0.5, energy_gate: float = 1e-4) -> PitchTrack:
    """Per-frame f0 from the peak of r[lag] / r[0] over the allowed lag range.

    A frame is voiced when that normalized peak reaches ``voicing_threshold``
    and the frame RMS reaches ``energy_gate``. The peak lag is refined by a
    parabola through its two neighbours.
    """
    fm = frame(clip, frame_length, hop_length, window="rectangular")
    x = fm.frames
    sr = clip.sample_rate
    lo, hi = lag_range(sr, f0_min, f0_max)
    if hi + 1 >= frame_length or lo < 1:
        raise ValueError("lag range does not fit inside the pitch frame")

    count = x.shape[0]
    f0 = np.zeros(count)
    voiced = np.zeros(count, dtype=bool)
    peak_amp = np.abs(x).max(axis=1) if count else np.zeros(0)
    if count == 0:
        return PitchTrack(f0, voiced, peak_amp, frame_length, hop_length, sr)

    r = autocorrelation(x, hi + 1)
    r0 = r[:, 0]
    rms = np.sqrt(np.mean(x * x, axis=1))
    live = (r0 > 0) & (rms >= energy_gate)
    norm = np.zeros_like(r)
    norm[live] = r[live] / r0[live, None]

    window = norm[:, lo:hi + 1]
    best = np.argmax(window, axis=1) + lo
    rows = np.arange(count)
    peak = norm[rows, best]
    voiced = live & (peak >= voicing_threshold)

    left = norm[rows, best - 1]
    right = norm[rows, best + 1]
    curv = left - 2.0 * peak + right
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(curv < 0, 0.5 * (left - right) / curv, 0.0)
    shift = np.clip(shift, -0.5, 0.5)
    est = sr / (best + shift)
    f0 = np.where(voiced, np.clip(est, f0_min, f0_max), 0.0)
    return PitchTrack(f0, voiced, peak_amp, frame_length, hop_length, sr)


def voiced_runs(voiced: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of consecutive voiced frames as half-open (start, stop)."""
    v = np.concatenate([[False], np.asarray(voiced, dtype=bool), [False]])
    edges = np.flatnonzero(v[1:] != v[:-1])
    return list(zip(edges[::2].tolist(), edges[1::2].tolist()))


def _stats(values: list[np.ndarray]) -> tuple[float, float]:
    if not values:
        return 0.0, 0.0
    v = np.concatenate(values)
    return float(v.mean()), float(v.std())


def jitter_shimmer(track: PitchTrack) -> tuple[float, float, float, float]:
    """(jitter_mean, jitter_std, shimmer_mean, shimmer_std).

    Within each voiced run, consecutive period and peak-amplitude differences
    are scaled by the run's mean period / mean amplitude; statistics pool all
    runs. Returns zeros when no run has two frames.
    """
    jit, shim = [], []
    for start, stop in voiced_runs(track.voiced):
        if stop - start < 2:
            continue
        periods = 1.0 / track.f0[start:stop]
        jit.append(np.abs(np.diff(periods)) / periods.mean())
        amps = track.peak_amp[start:stop]
        mean_amp = amps.mean()
        if mean_amp > 0:
            shim.append(np.abs(np.diff(amps)) / mean_amp)
        else:
            shim.append(np.zeros(stop - start - 1))
    return _stats(jit) + _stats(shim)
