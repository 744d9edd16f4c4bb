"""Clip-level feature vector assembly."""
from __future__ import annotations

import numpy as np

from ..audio_io import AudioClip, frame, resample
from .config import FeatureConfig
from .formants import formants
from .pitch import jitter_shimmer, pitch_track
from .spectral import chroma_stats, mfcc, spectral_descriptors, stft, time_descriptors

_SCALAR_HEAD = [
    "pitch_mean", "pitch_std",
    "jitter_mean", "jitter_std",
    "shimmer_mean", "shimmer_std",
    "formant_f1", "formant_f2", "formant_f3", "formant_f4",
    "chroma_mean", "chroma_std",
    "rms_mean", "rms_std",
    "centroid_mean", "centroid_std",
    "bandwidth_mean", "bandwidth_std",
    "rolloff_mean", "rolloff_std",
    "zcr_mean", "zcr_std",
]


def feature_names(n_mfcc: int = 13) -> list[str]:
    return (_SCALAR_HEAD
            + [f"mfcc_mean_{i}" for i in range(n_mfcc)]
            + [f"mfcc_std_{i}" for i in range(n_mfcc)])


FEATURE_NAMES = tuple(feature_names(13))
N_FEATURES = len(FEATURE_NAMES)


def _mean_std(v: np.ndarray) -> tuple[float, float]:
    if v.size == 0:
        return 0.0, 0.0
    if np.all(v == v[0]):
        # exact for constant input; summation would leave ~1e-14 residue
        return float(v[0]), 0.0
    return float(v.mean()), float(v.std())


def _column_stats(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean, std = m.mean(axis=0), m.std(axis=0)
    const = np.all(m == m[:1], axis=0)
    mean[const] = m[0, const]
    std[const] = 0.0
    return mean, std


def extract_features(clip: AudioClip, config: FeatureConfig | None = None) -> np.ndarray:
    """Fixed-order feature vector (see :data:`FEATURE_NAMES`) for one clip.

    The clip is resampled to ``config.sample_rate``; clips shorter than the
    pitch frame are zero-padded to one full frame. STDs are population STDs.
    """
    cfg = config or FeatureConfig()
    clip = resample(clip, cfg.sample_rate)
    need = max(cfg.pitch_frame_length, cfg.spectral_frame_length)
    if len(clip.samples) < need:
        padded = np.zeros(need)
        padded[:len(clip.samples)] = clip.samples
        clip = AudioClip(padded, clip.sample_rate, clip.source_path)

    track = pitch_track(clip, cfg.pitch_frame_length, cfg.pitch_hop_length,
                        cfg.f0_min, cfg.f0_max, cfg.voicing_threshold, cfg.energy_gate)
    pitch = _mean_std(track.f0[track.voiced])
    jitter_shimmer_stats = jitter_shimmer(track)
    f1_f4 = formants(clip, track, cfg.pre_emphasis, cfg.formant_min_freq,
                     cfg.formant_edge_margin, cfg.formant_max_bandwidth)

    spec = stft(frame(clip, cfg.spectral_frame_length, cfg.spectral_hop_length, "hann"))
    centroid, bandwidth, rolloff = spectral_descriptors(spec, cfg.rolloff_fraction)
    raw = frame(clip, cfg.spectral_frame_length, cfg.spectral_hop_length, "rectangular")
    rms, zcr = time_descriptors(raw)
    coeffs = mfcc(spec, cfg.n_mels, cfg.n_mfcc, cfg.log_floor)

    values = [
        *pitch, *jitter_shimmer_stats, *f1_f4,
        *chroma_stats(spec),
        *_mean_std(rms),
        *_mean_std(centroid),
        *_mean_std(bandwidth),
        *_mean_std(rolloff),
        *_mean_std(zcr),
    ]
    out = np.concatenate([values, *_column_stats(coeffs)])
    if not np.all(np.isfinite(out)):
        raise FloatingPointError(f"non-finite feature for {clip.source_path}")
    return out
