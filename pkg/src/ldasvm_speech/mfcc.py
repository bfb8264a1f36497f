"""MFCC front-end.

Stage chain per clip: frame blocking -> Hamming window -> radix-2 FFT power
spectrum -> triangular mel filterbank -> log energies -> cosine transform.
The per-clip feature vector is the mean over frames of the per-frame
coefficients c_1..c_{K-1}; c_0 is dropped because it only tracks overall
signal level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .audio_io import AudioClip
from .exceptions import (
    BadLength,
    DimensionMismatch,
    InsufficientSamples,
    TooManyFilters,
)


@dataclass(frozen=True)
class FrontendConfig:
    """Analysis parameters; defaults suit 10 kHz speech."""

    frame_len_n: int = 256
    frame_shift_m: int = 100
    num_filters_k: int = 20
    sample_rate_hz: int = 10000
    log_floor: float = 1e-10

    def __post_init__(self):
        if self.frame_len_n < 2 or self.frame_len_n & (self.frame_len_n - 1):
            raise ValueError(f"frame_len_n={self.frame_len_n} is not a power of two")
        if not 0 < self.frame_shift_m < self.frame_len_n:
            raise ValueError("frame_shift_m must satisfy 0 < M < N")
        if self.num_filters_k < 2:
            raise ValueError("num_filters_k must be at least 2")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")


@dataclass(frozen=True)
class MelFilterBank:
    """Triangular filters over FFT bins, equally spaced on the mel scale."""

    weights: np.ndarray  # (K, N/2+1), each row peaks at exactly 1.0
    center_freqs_hz: np.ndarray  # (K,)


def hz_to_mel(freq_hz: float) -> float:
    """Perceptual pitch: 2595 * log10(1 + f/700)."""
    return 2595.0 * math.log10(1.0 + freq_hz / 700.0)


def mel_to_hz(mel: float) -> float:
    return 700.0 * (10.0 ** (mel / 2595.0) - 1.0)


def hamming_window(n_index: int, frame_len: int) -> float:
    """0.54 - 0.46*cos(2*pi*n/(N-1)) for 0 <= n <= N-1."""
    if frame_len < 2:
        raise ValueError("window needs at least two points")
    if not 0 <= n_index <= frame_len - 1:
        raise ValueError(f"index {n_index} outside [0, {frame_len - 1}]")
    return 0.54 - 0.46 * math.cos(2.0 * math.pi * n_index / (frame_len - 1))


@lru_cache(maxsize=None)
def _hamming_vector(frame_len: int) -> np.ndarray:
    n = np.arange(frame_len)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (frame_len - 1))


def frame_blocking(clip: AudioClip, cfg: FrontendConfig) -> np.ndarray:
    """Slice a clip into floor((L-N)/M)+1 overlapping frames of N samples.

    Frame t covers samples [t*M, t*M+N); trailing samples that do not fill a
    whole frame are dropped.
    """
    samples = clip.samples
    n, m = cfg.frame_len_n, cfg.frame_shift_m
    if samples.size < n:
        raise InsufficientSamples(
            f"clip has {samples.size} samples; need at least {n}"
        )
    windows = np.lib.stride_tricks.sliding_window_view(samples, n)[::m]
    return np.array(windows, dtype=np.float64)


def apply_window(frames: np.ndarray) -> np.ndarray:
    """Taper every frame with the Hamming window."""
    frames = np.asarray(frames, dtype=np.float64)
    return frames * _hamming_vector(frames.shape[-1])


@lru_cache(maxsize=None)
def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev = (rev << 1) | ((idx >> b) & 1)
    return rev


def fft_radix2(x) -> np.ndarray:
    """Iterative radix-2 Cooley-Tukey FFT along the last axis.

    Length must be a power of two (BadLength otherwise). Accepts a batch of
    frames; returns complex128.
    """
    arr = np.ascontiguousarray(x, dtype=np.complex128)
    n = arr.shape[-1]
    if n == 0 or n & (n - 1):
        raise BadLength(f"transform length {n} is not a power of two")

    out = arr[..., _bit_reverse_indices(n)]
    span = 2
    while span <= n:
        half = span // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / span)
        view = out.reshape(out.shape[:-1] + (n // span, span))
        even = view[..., :half].copy()
        odd = view[..., half:] * twiddle
        view[..., :half] = even + odd
        view[..., half:] = even - odd
        span *= 2
    return out


def power_spectrum(frame) -> np.ndarray:
    """|X_k|^2 for k = 0..N/2 of a real frame (batch-friendly)."""
    frame = np.asarray(frame, dtype=np.float64)
    spectrum = fft_radix2(frame)
    half = frame.shape[-1] // 2 + 1
    power = spectrum.real**2 + spectrum.imag**2
    return power[..., :half]


def build_mel_filterbank(cfg: FrontendConfig) -> MelFilterBank:
    """K triangular filters whose K+2 edges are equally spaced in mel.

    Adjacent filters overlap 50%: the center bin of filter i is the right
    edge of filter i-1 and the left edge of filter i+1.
    """
    k, n, rate = cfg.num_filters_k, cfg.frame_len_n, cfg.sample_rate_hz
    n_bins = n // 2 + 1

    mel_points = np.linspace(0.0, hz_to_mel(rate / 2.0), k + 2)
    hz_points = np.array([mel_to_hz(m) for m in mel_points])
    bins = np.floor((n + 1) * hz_points / rate).astype(int)
    bins = np.minimum(bins, n_bins - 1)
    if np.any(np.diff(bins) < 1):
        raise TooManyFilters(
            f"{k} filters squeeze {k + 2} edges into {n_bins} FFT bins"
        )

    weights = np.zeros((k, n_bins))
    for i in range(k):
        left, center, right = bins[i], bins[i + 1], bins[i + 2]
        up = np.arange(left, center)
        weights[i, up] = (up - left) / (center - left)
        down = np.arange(center, right)
        weights[i, down] = (right - down) / (right - center)
    return MelFilterBank(weights=weights, center_freqs_hz=hz_points[1 : k + 1])


def apply_filterbank(fb: MelFilterBank, pspec, log_floor: float = 1e-10) -> np.ndarray:
    """Log mel energies: log(max(weights @ pspec, log_floor)) per filter."""
    pspec = np.asarray(pspec, dtype=np.float64)
    if pspec.shape[-1] != fb.weights.shape[1]:
        raise DimensionMismatch(
            f"spectrum has {pspec.shape[-1]} bins, filterbank expects {fb.weights.shape[1]}"
        )
    energies = pspec @ fb.weights.T
    return np.log(np.maximum(energies, log_floor))


@lru_cache(maxsize=None)
def _dct_basis(num_filters: int) -> np.ndarray:
    # row n holds cos[n*(k - 1/2)*pi/K] for k = 1..K; n = 1..K-1
    n = np.arange(1, num_filters)[:, None]
    k = np.arange(1, num_filters + 1)[None, :]
    return np.cos(n * (k - 0.5) * np.pi / num_filters)


def mfcc_from_logmel(logmel, cfg: FrontendConfig) -> np.ndarray:
    """Cepstral coefficients c_1..c_{K-1} from K log mel energies."""
    logmel = np.asarray(logmel, dtype=np.float64)
    if logmel.shape[-1] != cfg.num_filters_k:
        raise DimensionMismatch(
            f"got {logmel.shape[-1]} log energies, config says {cfg.num_filters_k}"
        )
    return logmel @ _dct_basis(cfg.num_filters_k).T


def extract_features(clip: AudioClip, cfg: FrontendConfig) -> np.ndarray:
    """Per-clip feature vector: mean over frames of per-frame coefficients.

    Output dimension is always K-1 regardless of clip length.
    """
    frames = frame_blocking(clip, cfg)
    windowed = apply_window(frames)
    pspec = power_spectrum(windowed)
    fb = build_mel_filterbank(cfg)
    logmel = apply_filterbank(fb, pspec, cfg.log_floor)
    coeffs = mfcc_from_logmel(logmel, cfg)
    return coeffs.mean(axis=0)
