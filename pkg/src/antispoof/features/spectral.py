"""STFT-based descriptors: chroma, centroid/bandwidth/rolloff, MFCC, plus the
time-domain RMS and zero-crossing rate."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from ..audio_io import FrameMatrix


@dataclass(frozen=True)
class Spectrogram:
    magnitudes: np.ndarray  # (n_frames, n_bins), n_bins = N // 2 + 1
    bin_freqs: np.ndarray
    frame_length: int
    hop_length: int
    sample_rate: int

    @property
    def power(self) -> np.ndarray:
        return self.magnitudes ** 2


def stft(frames: FrameMatrix) -> Spectrogram:
    """Magnitude spectrum of each (already windowed) frame."""
    n = frames.frame_length
    mags = np.abs(np.fft.rfft(frames.frames, n=n, axis=1))
    freqs = np.arange(n // 2 + 1) * (frames.sample_rate / n)
    return Spectrogram(mags, freqs, n, frames.hop_length, frames.sample_rate)


def pitch_class(freqs: np.ndarray) -> np.ndarray:
    """Pitch class 0..11 (0 = A) of positive frequencies."""
    return np.mod(np.round(12.0 * np.log2(freqs / 440.0)).astype(np.int64), 12)


def chroma(spec: Spectrogram) -> np.ndarray:
    """Per-frame 12-bin chroma, each row normalized to sum 1.

    Silent frames get the uniform vector.
    """
    keep = spec.bin_freqs > 0
    classes = pitch_class(spec.bin_freqs[keep])
    fold = np.zeros((classes.size, 12))
    fold[np.arange(classes.size), classes] = 1.0
    c = spec.power[:, keep] @ fold
    total = c.sum(axis=1, keepdims=True)
    out = np.full_like(c, 1.0 / 12.0)
    np.divide(c, total, out=out, where=total[:, 0:1] > 0)
    return out


def chroma_stats(spec: Spectrogram) -> tuple[float, float]:
    c = chroma(spec)
    if c.size == 0:
        return 1.0 / 12.0, 0.0
    return float(c.mean()), float(c.std())


def spectral_descriptors(spec: Spectrogram, rolloff_fraction: float = 0.85):
    """Per-frame (centroid, bandwidth, rolloff) in Hz; zeros for silent frames."""
    if not 0 < rolloff_fraction <= 1:
        raise ValueError("rolloff_fraction must be in (0, 1]")
    m = spec.magnitudes
    f = spec.bin_freqs
    cum = np.cumsum(m, axis=1)
    total = cum[:, -1] if m.shape[1] else np.zeros(m.shape[0])
    live = total > 0
    safe = np.where(live, total, 1.0)

    centroid = (m @ f) / safe
    spread = (m * (f[None, :] - centroid[:, None]) ** 2).sum(axis=1) / safe
    bandwidth = np.sqrt(np.maximum(spread, 0.0))
    idx = np.argmax(cum >= rolloff_fraction * total[:, None], axis=1)
    rolloff = f[idx]

    zero = ~live
    centroid[zero] = 0.0
    bandwidth[zero] = 0.0
    rolloff = np.where(zero, 0.0, rolloff)
    return centroid, bandwidth, rolloff


def time_descriptors(frames: FrameMatrix):
    """Per-frame (rms, zcr) on unwindowed frames.

    A zero sample inherits the sign of the last nonzero sample before it, so
    touching zero without crossing is not counted.
    """
    x = frames.frames
    n = frames.frame_length
    rms = np.sqrt(np.mean(x * x, axis=1)) if x.size else np.zeros(0)
    s = np.sign(x)
    idx = np.where(s != 0, np.arange(n)[None, :], 0)
    np.maximum.accumulate(idx, axis=1, out=idx)
    s = np.take_along_axis(s, idx, axis=1)
    crossings = np.count_nonzero(s[:, 1:] * s[:, :-1] < 0, axis=1)
    return rms, crossings / (n - 1)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, bin_freqs: np.ndarray, sample_rate: int) -> np.ndarray:
    """Triangular filters (n_mels, n_bins) evenly spaced in mel from 0 to Nyquist."""
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_mels + 2))
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    f = bin_freqs[None, :]
    rising = (f - lo) / (mid - lo)
    falling = (hi - f) / (hi - mid)
    return np.maximum(0.0, np.minimum(rising, falling))


def mfcc(spec: Spectrogram, n_mels: int = 40, n_mfcc: int = 13,
         log_floor: float = 1e-10) -> np.ndarray:
    """Per-frame MFCCs, shape (n_frames, n_mfcc)."""
    fb = mel_filterbank(n_mels, spec.bin_freqs, spec.sample_rate)
    energies = spec.power @ fb.T
    logs = np.log(np.maximum(energies, log_floor))
    if logs.shape[0] == 0:
        return np.zeros((0, n_mfcc))
    return scipy.fft.dct(logs, type=2, norm="ortho", axis=1)[:, :n_mfcc]
