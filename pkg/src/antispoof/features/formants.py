"""LPC formant estimation (Levinson-Durbin + polynomial roots)."""
from __future__ import annotations

import numpy as np

from ..audio_io import AudioClip, frame
from .pitch import PitchTrack


def levinson_durbin(r: np.ndarray, order: int) -> tuple[np.ndarray, float]:
    """Solve the autocorrelation normal equations for an order-``order`` predictor.

    Returns ``(a, err)`` where ``a = [1, a1, ..., ap]`` is the inverse filter
    A(z) = 1 + sum_k a_k z^-k and ``err`` the final prediction error power.
    Recursion stops early (remaining coefficients zero) if the error power
    collapses to zero.
    """
    r = np.asarray(r, dtype=np.float64)
    if len(r) < order + 1:
        raise ValueError("need order + 1 autocorrelation lags")
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    if err <= 0:
        return a, 0.0
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1:0:-1])
        k = -acc / err
        a[1:i] = a[1:i] + k * a[i - 1:0:-1]
        a[i] = k
        err *= 1.0 - k * k
        if err <= 0:
            break
    return a, float(err)


def lpc(x: np.ndarray, order: int) -> np.ndarray:
    n = len(x)
    r = np.correlate(x, x, mode="full")[n - 1:n + order]
    if len(r) < order + 1:
        r = np.concatenate([r, np.zeros(order + 1 - len(r))])
    return levinson_durbin(r, order)[0]


def lpc_order(sample_rate: int) -> int:
    return 2 + sample_rate // 1000


def frame_formants(a: np.ndarray, sample_rate: int, min_freq: float = 90.0,
                   edge_margin: float = 50.0, max_bandwidth: float = 400.0) -> np.ndarray:
    """Candidate formant frequencies (ascending) from LPC coefficients."""
    roots = np.roots(a)
    roots = roots[roots.imag > 0]
    if roots.size == 0:
        return np.zeros(0)
    freqs = np.angle(roots) * sample_rate / (2.0 * np.pi)
    with np.errstate(divide="ignore"):
        bws = -(sample_rate / np.pi) * np.log(np.abs(roots))
    ok = (freqs > min_freq) & (freqs < sample_rate / 2.0 - edge_margin) & (bws < max_bandwidth)
    return np.sort(freqs[ok])


def formants(clip: AudioClip, track: PitchTrack, pre_emphasis: float = 0.97,
             min_freq: float = 90.0, edge_margin: float = 50.0,
             max_bandwidth: float = 400.0) -> tuple[float, float, float, float]:
    """Utterance-level (F1, F2, F3, F4): per-slot medians over voiced frames.

    Each voiced pitch frame is pre-emphasized and fitted with an LPC model of
    order 2 + rate/1000. Slots nobody filled are 0.
    """
    sr = clip.sample_rate
    x = clip.samples
    if not track.voiced.any() or len(x) == 0:
        return 0.0, 0.0, 0.0, 0.0
    y = np.empty_like(x)
    y[0] = x[0]
    y[1:] = x[1:] - pre_emphasis * x[:-1]
    emph = AudioClip(y, sr, clip.source_path)
    frames = frame(emph, track.frame_length, track.hop_length, window="rectangular").frames
    order = lpc_order(sr)

    slots: list[list[float]] = [[], [], [], []]
    for i in np.flatnonzero(track.voiced[:len(frames)]):
        a = lpc(frames[i], order)
        found = frame_formants(a, sr, min_freq, edge_margin, max_bandwidth)
        for k, f in enumerate(found[:4]):
            slots[k].append(f)
    return tuple(float(np.median(s)) if s else 0.0 for s in slots)
