from __future__ import annotations

from dataclasses import dataclass

from ..kvconfig import coerce, format_kv, read_kv


@dataclass(frozen=True)
class FeatureConfig:
    """Analysis parameters for :func:`extract_features`.

    Frame sizes are in samples at ``sample_rate``. ``n_mfcc`` other than 13
    changes the feature vector length away from the canonical 48.
    """

    sample_rate: int = 16000
    spectral_frame_length: int = 512
    spectral_hop_length: int = 256
    pitch_frame_length: int = 1024
    pitch_hop_length: int = 256
    f0_min: float = 50.0
    f0_max: float = 500.0
    voicing_threshold: float = 0.5
    energy_gate: float = 1e-4
    pre_emphasis: float = 0.97
    formant_min_freq: float = 90.0
    formant_edge_margin: float = 50.0
    formant_max_bandwidth: float = 400.0
    rolloff_fraction: float = 0.85
    n_mels: int = 40
    n_mfcc: int = 13
    log_floor: float = 1e-10

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.spectral_frame_length < 2 or self.pitch_frame_length < 2:
            raise ValueError("frame lengths must be >= 2")
        if self.spectral_hop_length < 1 or self.pitch_hop_length < 1:
            raise ValueError("hop lengths must be >= 1")
        if not 0 < self.f0_min < self.f0_max:
            raise ValueError("need 0 < f0_min < f0_max")
        if self.sample_rate / self.f0_min >= self.pitch_frame_length - 1:
            raise ValueError("pitch frame too short for f0_min")
        if not 0 < self.rolloff_fraction <= 1:
            raise ValueError("rolloff_fraction must be in (0, 1]")
        if not 1 <= self.n_mfcc <= self.n_mels:
            raise ValueError("need 1 <= n_mfcc <= n_mels")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")

    @classmethod
    def from_file(cls, path, strict: bool = False) -> "FeatureConfig":
        return coerce(cls, read_kv(path), strict=strict)

    def to_text(self) -> str:
        return format_kv(self)
