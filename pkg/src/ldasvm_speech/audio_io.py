"""WAV decoding and corpus directory scanning.

Only canonical 16-bit PCM RIFF/WAVE files are accepted; anything else is
rejected loudly instead of guessed at. A corpus is a directory holding one
subdirectory per class, each with the class's .wav recordings.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import (
    CorruptHeader,
    EmptyAudio,
    EmptyClass,
    NoClasses,
    UnsupportedFormat,
)

_PCM_CODE = 1
_INT16_SCALE = 32768.0


@dataclass
class AudioClip:
    """Mono audio: float64 samples in [-1.0, 1.0) plus the sampling rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise EmptyAudio("clip must hold at least one mono sample")
        if self.sample_rate_hz <= 0:
            raise CorruptHeader(f"nonpositive sample rate {self.sample_rate_hz}")
        lo = float(self.samples.min())
        hi = float(self.samples.max())
        if lo < -1.0 or hi >= 1.0:
            raise ValueError(f"amplitude range [{lo}, {hi}] outside [-1.0, 1.0)")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class CorpusEntry:
    path: Path
    label: int
    class_name: str


@dataclass
class CorpusIndex:
    """Deterministic file listing: classes and files in lexicographic order."""

    entries: list[CorpusEntry]
    class_names: list[str]

    def __len__(self) -> int:
        return len(self.entries)


def load_wav(path) -> AudioClip:
    """Decode a 16-bit PCM WAV file into a normalized mono clip.

    Samples are scaled by 1/32768; multi-channel audio is downmixed by
    averaging the channels of each frame.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader(f"{path}: not a RIFF/WAVE file")

    fmt_body = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        size = int.from_bytes(data[pos + 4 : pos + 8], "little")
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise CorruptHeader(f"{path}: chunk {chunk_id!r} truncated")
        if chunk_id == b"fmt ":
            fmt_body = body
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt_body is None:
        raise CorruptHeader(f"{path}: missing fmt chunk")
    if payload is None:
        raise CorruptHeader(f"{path}: missing data chunk")
    if len(fmt_body) < 16:
        raise CorruptHeader(f"{path}: fmt chunk too short ({len(fmt_body)} bytes)")

    codec, channels, rate, _byte_rate, _align, bits = struct.unpack(
        "<HHIIHH", fmt_body[:16]
    )
    if codec != _PCM_CODE:
        raise UnsupportedFormat(f"{path}: audio format code {codec}; only PCM (1)")
    if bits != 16:
        raise UnsupportedFormat(f"{path}: {bits}-bit samples; only 16-bit PCM")
    if channels < 1:
        raise CorruptHeader(f"{path}: zero channels declared")
    if rate <= 0:
        raise CorruptHeader(f"{path}: nonpositive sample rate {rate}")

    frame_bytes = 2 * channels
    if len(payload) % frame_bytes:
        raise CorruptHeader(f"{path}: data chunk is not a whole number of frames")
    n_frames = len(payload) // frame_bytes
    if n_frames == 0:
        raise EmptyAudio(f"{path}: zero samples")

    raw = np.frombuffer(payload, dtype="<i2").reshape(n_frames, channels)
    if channels > 1:
        samples = raw.mean(axis=1) / _INT16_SCALE
    else:
        samples = raw[:, 0].astype(np.float64) / _INT16_SCALE
    return AudioClip(samples=samples, sample_rate_hz=int(rate))


def scan_corpus(root) -> CorpusIndex:
    """Index a `<root>/<class_name>/*.wav` tree.

    Classes are numbered from 1 in sorted name order; files are sorted within
    each class, so two scans of the same tree yield identical indices.
    """
    root = Path(root)
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise NoClasses(f"{root}: no class subdirectories")

    entries: list[CorpusEntry] = []
    names: list[str] = []
    for label, class_dir in enumerate(class_dirs, start=1):
        wavs = sorted(
            p for p in class_dir.iterdir() if p.is_file() and p.suffix == ".wav"
        )
        if not wavs:
            raise EmptyClass(f"{class_dir}: class directory holds no .wav files")
        names.append(class_dir.name)
        entries.extend(
            CorpusEntry(path=p, label=label, class_name=class_dir.name) for p in wavs
        )
    return CorpusIndex(entries=entries, class_names=names)
