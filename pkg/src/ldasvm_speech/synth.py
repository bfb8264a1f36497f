"""Deterministic synthetic speech corpus.

Each "word" is a mixture of formant-like tones at class-specific
frequencies. Per-clip nuisance variation (spectral tilt, noise floor, level
and frequency jitter) is drawn from a seeded generator, so the same seed
always produces byte-identical WAV files. The tilt and noise-floor nuisances
dominate raw feature distances while leaving the class structure intact,
which is exactly the regime where a discriminant projection pays off.
"""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

WORDS = ("go", "left", "right", "stop", "up")

# (frequency Hz, relative amplitude) triples per word, spread over the band
_FORMANTS = {
    "go": ((320.0, 1.0), (900.0, 0.7), (2450.0, 0.4)),
    "left": ((480.0, 0.9), (1350.0, 0.8), (3050.0, 0.35)),
    "right": ((620.0, 1.0), (1850.0, 0.6), (2700.0, 0.45)),
    "stop": ((380.0, 0.8), (1150.0, 0.9), (3550.0, 0.4)),
    "up": ((760.0, 0.9), (1600.0, 0.7), (2150.0, 0.5)),
}

# per-clip nuisance ranges (class-independent, shared across all words)
_FREQ_JITTER = 0.006  # +-0.6% per formant
_AMP_LOG_JITTER = 0.12  # formant amplitude x 10^U(-j, j)
_TILT_RANGE = (-0.6, 0.75)  # first-difference filter coefficient
_NOISE_LOG10_RANGE = (-3.0, -1.6)  # white-noise amplitude 10^U(lo, hi)
_PEAK = 0.55


def _clip_rng(seed: int, word_index: int, clip_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(word_index, clip_index))
    return np.random.Generator(np.random.PCG64(seq))


def synth_clip(word: str, clip_index: int, seed: int,
               sample_rate_hz: int = 10000, duration_s: float = 0.5) -> np.ndarray:
    """One clip of a word: jittered tones + tilt filter + noise, peak-scaled."""
    rng = _clip_rng(seed, WORDS.index(word), clip_index)
    t = np.arange(int(round(sample_rate_hz * duration_s))) / sample_rate_hz

    signal = np.zeros_like(t)
    for freq, amp in _FORMANTS[word]:
        jittered = freq * (1.0 + rng.uniform(-_FREQ_JITTER, _FREQ_JITTER))
        level = amp * 10.0 ** rng.uniform(-_AMP_LOG_JITTER, _AMP_LOG_JITTER)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        signal += level * np.sin(2.0 * np.pi * jittered * t + phase)

    noise_level = 10.0 ** rng.uniform(*_NOISE_LOG10_RANGE)
    signal += noise_level * rng.standard_normal(t.size)

    tilt = rng.uniform(*_TILT_RANGE)
    signal = np.concatenate([[signal[0] * (1.0 - tilt)], signal[1:] - tilt * signal[:-1]])

    # short fades keep frame edges click-free
    fade = max(1, int(0.01 * sample_rate_hz))
    ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(fade) / fade))
    signal[:fade] *= ramp
    signal[-fade:] *= ramp[::-1]

    return signal * (_PEAK / np.max(np.abs(signal)))


def write_wav_pcm16(path, samples: np.ndarray, sample_rate_hz: int) -> None:
    """Write mono 16-bit PCM via the stdlib writer."""
    quantized = np.clip(np.round(samples * 32767.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as handle:
        handle.setnchannels(1)
        handle.setsampwidth(2)
        handle.setframerate(sample_rate_hz)
        handle.writeframes(quantized.tobytes())


def generate_corpus(root, seed: int = 42, train_per_class: int = 4,
                    test_per_class: int = 2, sample_rate_hz: int = 10000,
                    duration_s: float = 0.5) -> list[Path]:
    """Emit `<root>/train/<word>/*.wav` and `<root>/test/<word>/*.wav`.

    Test clips continue each word's clip numbering, so train and test never
    share a generator stream.
    """
    root = Path(root)
    written = []
    for word in WORDS:
        for split, count, offset in (
            ("train", train_per_class, 0),
            ("test", test_per_class, train_per_class),
        ):
            directory = root / split / word
            directory.mkdir(parents=True, exist_ok=True)
            for k in range(count):
                clip_index = offset + k
                samples = synth_clip(
                    word, clip_index, seed,
                    sample_rate_hz=sample_rate_hz, duration_s=duration_s,
                )
                path = directory / f"{word}_{clip_index:02d}.wav"
                write_wav_pcm16(path, samples, sample_rate_hz)
                written.append(path)
    return written
