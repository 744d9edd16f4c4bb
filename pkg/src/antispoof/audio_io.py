"""WAV decoding, linear resampling and short-time framing."""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import IoError, MalformedWav, UnsupportedFormat

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class AudioClip:
    """Mono signal in [-1, 1] with its sample rate."""

    samples: np.ndarray
    sample_rate: int
    source_path: str = ""

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", _frozen(self.samples))

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class FrameMatrix:
    frames: np.ndarray  # (n_frames, frame_length)
    frame_length: int
    hop_length: int
    sample_rate: int

    def __post_init__(self):
        object.__setattr__(self, "frames", _frozen(self.frames))

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


def load_wav(path) -> AudioClip:
    """Decode a RIFF/WAVE file holding PCM16 or float32 samples.

    Stereo input is averaged to mono. Raises :class:`MalformedWav` for broken
    containers and :class:`UnsupportedFormat` for anything other than 16-bit
    PCM or 32-bit float with one or two channels.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc

    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWav(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body_start = pos + 8
        body_end = body_start + size
        if body_end > len(data):
            raise MalformedWav(
                f"{path}: chunk {chunk_id!r} declares {size} bytes, "
                f"only {len(data) - body_start} present")
        if chunk_id == b"fmt ":
            if size < 16:
                raise MalformedWav(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", data, body_start)
            if fmt[0] == WAVE_FORMAT_EXTENSIBLE:
                if size < 26:
                    raise MalformedWav(f"{path}: truncated extensible fmt chunk")
                (sub,) = struct.unpack_from("<H", data, body_start + 24)
                fmt = (sub,) + fmt[1:]
        elif chunk_id == b"data":
            payload = data[body_start:body_end]
            if fmt is not None:
                break
        pos = body_end + (size & 1)

    if fmt is None:
        raise MalformedWav(f"{path}: missing fmt chunk")
    if payload is None:
        raise MalformedWav(f"{path}: missing data chunk")

    code, channels, rate, _, block_align, bits = fmt
    if code == WAVE_FORMAT_PCM and bits == 16:
        dtype = np.dtype("<i2")
    elif code == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype = np.dtype("<f4")
    else:
        raise UnsupportedFormat(f"{path}: format code {code:#x} with {bits}-bit samples")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{path}: {channels} channels")
    if rate <= 0:
        raise MalformedWav(f"{path}: sample rate {rate}")

    frame_bytes = channels * dtype.itemsize
    n = len(payload) // frame_bytes
    if n == 0:
        raise MalformedWav(f"{path}: empty data chunk")
    raw = np.frombuffer(payload[:n * frame_bytes], dtype=dtype).reshape(n, channels)
    x = raw.astype(np.float64)
    if dtype.kind == "i":
        x /= 32768.0
    else:
        if not np.all(np.isfinite(x)):
            raise MalformedWav(f"{path}: non-finite float samples")
        np.clip(x, -1.0, 1.0, out=x)
    mono = x.mean(axis=1) if channels == 2 else x[:, 0]
    return AudioClip(mono, int(rate), str(path))


def write_wav(path, samples, sample_rate: int, fmt: str = "pcm16") -> None:
    """Write a WAV file.

    ``samples`` is (n,) for mono or (n, channels). ``fmt`` is ``"pcm16"`` or
    ``"float32"``.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    channels = x.shape[1]
    if fmt == "pcm16":
        body = np.clip(np.round(x * 32767.0), -32768, 32767).astype("<i2").tobytes()
        code, bits = WAVE_FORMAT_PCM, 16
    elif fmt == "float32":
        body = x.astype("<f4").tobytes()
        code, bits = WAVE_FORMAT_IEEE_FLOAT, 32
    else:
        raise ValueError(f"unknown sample format {fmt!r}")
    block_align = channels * bits // 8
    header = struct.pack("<HHIIHH", code, channels, sample_rate,
                         sample_rate * block_align, block_align, bits)
    chunks = (b"fmt " + struct.pack("<I", len(header)) + header
              + b"data" + struct.pack("<I", len(body)) + body)
    if len(body) & 1:
        chunks += b"\x00"
    try:
        Path(path).write_bytes(b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks)
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Linear-interpolation resampling to ``target_rate``."""
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate == clip.sample_rate:
        return clip
    n_in = len(clip.samples)
    n_out = int(np.floor(n_in * target_rate / clip.sample_rate + 0.5))
    t = np.arange(n_out) * (clip.sample_rate / target_rate)
    out = np.interp(t, np.arange(n_in), clip.samples)
    return AudioClip(out, int(target_rate), clip.source_path)


def hann(n: int) -> np.ndarray:
    # symmetric: w[n] = 0.5 - 0.5 cos(2 pi n / (N - 1))
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / (n - 1))


def n_frames(length: int, frame_length: int, hop_length: int) -> int:
    if length < frame_length:
        return 0
    return (length - frame_length) // hop_length + 1


def frame(clip: AudioClip, frame_length: int, hop_length: int,
          window: str = "hann") -> FrameMatrix:
    if frame_length < 2:
        raise ValueError("frame_length must be >= 2")
    if hop_length < 1:
        raise ValueError("hop_length must be >= 1")
    x = clip.samples
    count = n_frames(len(x), frame_length, hop_length)
    if count:
        starts = np.arange(count) * hop_length
        frames = x[starts[:, None] + np.arange(frame_length)]
    else:
        frames = np.zeros((0, frame_length))
    if window == "hann":
        frames = frames * hann(frame_length)
    elif window != "rectangular":
        raise ValueError(f"unknown window {window!r}")
    return FrameMatrix(frames, frame_length, hop_length, clip.sample_rate)
