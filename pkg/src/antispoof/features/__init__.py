"""Acoustic feature extraction."""
from .config import FeatureConfig
from .extract import FEATURE_NAMES, N_FEATURES, extract_features, feature_names
from .formants import formants, levinson_durbin, lpc
from .pitch import PitchTrack, jitter_shimmer, pitch_track
from .spectral import (Spectrogram, chroma_stats, mel_filterbank, mfcc,
                       spectral_descriptors, stft, time_descriptors)

__all__ = [
    "FEATURE_NAMES", "N_FEATURES", "FeatureConfig", "PitchTrack", "Spectrogram",
    "chroma_stats", "extract_features", "feature_names", "formants",
    "jitter_shimmer", "levinson_durbin", "lpc", "mel_filterbank", "mfcc",
    "pitch_track", "spectral_descriptors", "stft", "time_descriptors",
]
