import struct
import wave

import numpy as np
import pytest

from ldasvm_speech.audio_io import load_wav, scan_corpus
from ldasvm_speech.exceptions import (
    CorruptHeader,
    EmptyAudio,
    EmptyClass,
    NoClasses,
    UnsupportedFormat,
)


def wav_bytes(payload=b"\x00\x00", codec=1, channels=1, rate=10000, bits=16):
    """Hand-assembled RIFF/WAVE container for error-path tests."""
    fmt = struct.pack(
        "<HHIIHH",
        codec,
        channels,
        rate,
        rate * channels * bits // 8,
        channels * bits // 8,
        bits,
    )
    body = (
        b"fmt "
        + len(fmt).to_bytes(4, "little")
        + fmt
        + b"data"
        + len(payload).to_bytes(4, "little")
        + payload
    )
    return b"RIFF" + (4 + len(body)).to_bytes(4, "little") + b"WAVE" + body


def write_stdlib_wav(path, samples, rate=10000):
    quantized = np.clip(np.round(np.asarray(samples) * 32768.0), -32768, 32767)
    with wave.open(str(path), "wb") as handle:
        handle.setnchannels(1)
        handle.setsampwidth(2)
        handle.setframerate(rate)
        handle.writeframes(quantized.astype("<i2").tobytes())


def test_one_second_mono_clip(tmp_path):
    path = tmp_path / "tone.wav"
    t = np.arange(10000) / 10000.0
    write_stdlib_wav(path, 0.25 * np.sin(2 * np.pi * 440 * t))
    clip = load_wav(path)
    assert clip.samples.shape == (10000,)
    assert clip.sample_rate_hz == 10000


def test_write_then_load_within_one_quantization_step(tmp_path, rng):
    samples = rng.uniform(-0.9, 0.9, size=2048)
    path = tmp_path / "round.wav"
    write_stdlib_wav(path, samples)
    clip = load_wav(path)
    assert np.max(np.abs(clip.samples - samples)) <= 1.0 / 32768.0


def test_stereo_downmix_symmetric_channels_cancel(tmp_path):
    frames = 100
    half = 16384  # 0.5 in int16
    payload = struct.pack(f"<{2 * frames}h", *([half, -half] * frames))
    path = tmp_path / "stereo.wav"
    path.write_bytes(wav_bytes(payload=payload, channels=2))
    clip = load_wav(path)
    assert clip.samples.shape == (frames,)
    assert np.all(clip.samples == 0.0)


def test_amplitudes_always_inside_unit_interval(tmp_path):
    payload = struct.pack("<4h", -32768, 32767, 0, 1)
    path = tmp_path / "extremes.wav"
    path.write_bytes(wav_bytes(payload=payload))
    clip = load_wav(path)
    assert clip.samples.min() >= -1.0
    assert clip.samples.max() < 1.0


def test_compressed_codec_rejected(tmp_path):
    path = tmp_path / "adpcm.wav"
    path.write_bytes(wav_bytes(codec=2))
    with pytest.raises(UnsupportedFormat):
        load_wav(path)


def test_wrong_bit_depth_rejected(tmp_path):
    path = tmp_path / "eight.wav"
    path.write_bytes(wav_bytes(bits=8, payload=b"\x00"))
    with pytest.raises(UnsupportedFormat):
        load_wav(path)


def test_garbage_header_rejected(tmp_path):
    path = tmp_path / "junk.wav"
    path.write_bytes(b"JUNKJUNKJUNKJUNK")
    with pytest.raises(CorruptHeader):
        load_wav(path)


def test_truncated_data_chunk_rejected(tmp_path):
    good = wav_bytes(payload=b"\x00\x00" * 50)
    path = tmp_path / "cut.wav"
    path.write_bytes(good[:-30])
    with pytest.raises(CorruptHeader):
        load_wav(path)


def test_missing_fmt_chunk_rejected(tmp_path):
    body = b"data" + (4).to_bytes(4, "little") + b"\x00\x00\x00\x00"
    path = tmp_path / "nofmt.wav"
    path.write_bytes(b"RIFF" + (4 + len(body)).to_bytes(4, "little") + b"WAVE" + body)
    with pytest.raises(CorruptHeader):
        load_wav(path)


def test_zero_samples_rejected(tmp_path):
    path = tmp_path / "empty.wav"
    path.write_bytes(wav_bytes(payload=b""))
    with pytest.raises(EmptyAudio):
        load_wav(path)


def _make_corpus(root, classes, files_per_class=4):
    for name in classes:
        directory = root / name
        directory.mkdir(parents=True)
        for k in range(files_per_class):
            write_stdlib_wav(directory / f"{name}_{k}.wav", np.zeros(512) + 0.01 * k)


def test_scan_labels_follow_sorted_class_names(tmp_path):
    _make_corpus(tmp_path, ["go", "left", "right", "stop", "up"])
    index = scan_corpus(tmp_path)
    label_of = {e.class_name: e.label for e in index.entries}
    assert label_of == {"go": 1, "left": 2, "right": 3, "stop": 4, "up": 5}
    assert index.class_names == ["go", "left", "right", "stop", "up"]


def test_scan_counts_every_file(tmp_path):
    _make_corpus(tmp_path, ["a", "b", "c", "d", "e"], files_per_class=4)
    assert len(scan_corpus(tmp_path)) == 20


def test_scan_is_deterministic(tmp_path):
    _make_corpus(tmp_path, ["b", "a", "c"])
    first = scan_corpus(tmp_path)
    second = scan_corpus(tmp_path)
    assert first.entries == second.entries
    assert first.class_names == second.class_names


def test_scan_rejects_class_without_wavs(tmp_path):
    _make_corpus(tmp_path, ["a"])
    bad = tmp_path / "b"
    bad.mkdir()
    (bad / "notes.txt").write_text("no audio here")
    with pytest.raises(EmptyClass):
        scan_corpus(tmp_path)


def test_scan_rejects_empty_root(tmp_path):
    with pytest.raises(NoClasses):
        scan_corpus(tmp_path)
