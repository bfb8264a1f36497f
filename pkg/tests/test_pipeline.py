import re

import numpy as np
import pytest

import ldasvm_speech.lda
from ldasvm_speech.cli import main
from ldasvm_speech.exceptions import (
    BadMagic,
    ModelFormatError,
    TruncatedFile,
    UnsupportedVersion,
)
from ldasvm_speech.mfcc import FrontendConfig
from ldasvm_speech.pipeline import (
    compare_protocols,
    corpus_features,
    crossval_corpus,
    crossval_features,
    format_accuracy_line,
    format_cv_line,
    load_model,
    predict_files,
    predict_labeled_corpus,
    save_model,
    train_pipeline,
)
from ldasvm_speech.svm import stratified_folds
from ldasvm_speech.synth import WORDS, generate_corpus, write_wav_pcm16

ACCURACY_RE = re.compile(r"^Accuracy = [0-9.]+% \(\d+/\d+\) \(classification\)$")
CV_RE = re.compile(r"^Cross Validation Accuracy = [0-9.]+%$")


# --- synthetic corpus -------------------------------------------------------


def test_synth_layout_and_determinism(tmp_path):
    first = generate_corpus(tmp_path / "one", seed=9)
    second = generate_corpus(tmp_path / "two", seed=9)
    assert len(first) == len(second) == 5 * 6
    for a, b in zip(first, second):
        assert a.name == b.name
        assert a.read_bytes() == b.read_bytes()
    different = generate_corpus(tmp_path / "three", seed=10)
    assert first[0].read_bytes() != different[0].read_bytes()


def test_synth_train_test_split(train_root, test_root):
    for word in WORDS:
        assert len(list((train_root / word).glob("*.wav"))) == 4
        assert len(list((test_root / word).glob("*.wav"))) == 2


# --- training ---------------------------------------------------------------


def test_train_defaults_shape(train_root):
    model, report = train_pipeline(train_root)
    assert model.svm.nr_class == 5
    assert len(model.svm.machines) == 10
    assert model.lda is not None
    assert model.lda.output_dim == 4
    assert model.class_names == sorted(WORDS)
    assert report.accuracy == 100.0


def test_train_without_lda_keeps_raw_dimension(train_root):
    model, _report = train_pipeline(train_root, use_lda=False)
    assert model.lda is None
    assert model.svm.dim == 19


def test_training_set_accuracy_dominates_crossval(train_root):
    _model, report = train_pipeline(train_root)
    cv_accuracy, _ = crossval_corpus(train_root)
    assert report.accuracy >= cv_accuracy


# --- persistence ------------------------------------------------------------


def test_save_load_round_trip_exact(train_root, tmp_path):
    model, _ = train_pipeline(train_root)
    path = tmp_path / "model.txt"
    save_model(model, path)
    loaded = load_model(path)

    assert loaded.frontend == model.frontend
    assert loaded.class_names == model.class_names
    assert np.array_equal(loaded.lda.basis, model.lda.basis)
    assert np.array_equal(loaded.lda.eigenvalues, model.lda.eigenvalues)
    assert np.array_equal(loaded.lda.global_mean, model.lda.global_mean)
    assert np.array_equal(loaded.lda.class_means, model.lda.class_means)
    assert loaded.svm.labels == model.svm.labels
    assert loaded.svm.cost_c == model.svm.cost_c
    for ours, theirs in zip(loaded.svm.machines, model.svm.machines):
        assert np.array_equal(ours.support_vectors, theirs.support_vectors)
        assert np.array_equal(ours.alpha_y, theirs.alpha_y)
        assert ours.bias_b == theirs.bias_b
        assert ours.kernel == theirs.kernel


def test_training_twice_writes_identical_bytes(train_root, tmp_path):
    for name in ("a.txt", "b.txt"):
        model, _ = train_pipeline(train_root)
        save_model(model, tmp_path / name)
    assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()


def test_model_file_has_ten_pair_sections(train_root, tmp_path):
    model, _ = train_pipeline(train_root)
    path = tmp_path / "model.txt"
    save_model(model, path)
    text = path.read_text()
    assert sum(1 for line in text.splitlines() if line.startswith("pair ")) == 10
    assert text.splitlines()[0] == "LDASVM-SPEECH v1"


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("SOMETHING ELSE\n")
    with pytest.raises(BadMagic):
        load_model(path)


def test_future_version_rejected(train_root, tmp_path):
    model, _ = train_pipeline(train_root)
    path = tmp_path / "model.txt"
    save_model(model, path)
    lines = path.read_text().splitlines()
    lines[0] = "LDASVM-SPEECH v9"
    future = tmp_path / "future.txt"
    future.write_text("\n".join(lines) + "\n")
    with pytest.raises(UnsupportedVersion):
        load_model(future)


def test_truncated_file_names_line(train_root, tmp_path):
    model, _ = train_pipeline(train_root)
    path = tmp_path / "model.txt"
    save_model(model, path)
    lines = path.read_text().splitlines()
    cut = tmp_path / "cut.txt"
    cut.write_text("\n".join(lines[: len(lines) // 2]) + "\n")
    with pytest.raises((TruncatedFile, ModelFormatError)) as info:
        load_model(cut)
    assert "line" in str(info.value)


def test_unwritable_target_leaves_nothing_behind(train_root, tmp_path):
    model, _ = train_pipeline(train_root)
    target = tmp_path / "missing" / "model.txt"
    with pytest.raises(OSError):
        save_model(model, target)
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []  # no stray temp files either


# --- prediction -------------------------------------------------------------


def test_predict_training_corpus_is_perfect(train_root):
    model, report = train_pipeline(train_root)
    rerun = predict_labeled_corpus(model, train_root)
    assert rerun.accuracy == report.accuracy == 100.0
    assert format_accuracy_line(rerun.correct, rerun.total) == (
        "Accuracy = 100% (20/20) (classification)"
    )


def test_predict_loose_files_has_no_accuracy(train_root, test_root):
    model, _ = train_pipeline(train_root)
    files = sorted((test_root / "go").glob("*.wav"))
    report = predict_files(model, files)
    assert report.correct is None
    assert report.accuracy is None
    assert len(report.entries) == 2
    assert all(e.predicted_label in range(1, 6) for e in report.entries)


def test_accuracy_line_matches_counts():
    assert format_accuracy_line(2, 5) == "Accuracy = 40% (2/5) (classification)"
    assert format_cv_line(100.0) == "Cross Validation Accuracy = 100%"
    assert format_cv_line(100.0 * 2 / 3) == "Cross Validation Accuracy = 66.6667%"


# --- cross-validation protocols ---------------------------------------------


def test_crossval_leaves_held_out_rows_out_of_lda(train_root, monkeypatch):
    features, labels, _names, _paths = corpus_features(train_root, FrontendConfig())
    total = features.shape[0]
    seen = []
    original = ldasvm_speech.lda.fit_lda

    def spy(ds, target_dim=None, ridge=None):
        seen.append(np.array(ds.vectors))
        return original(ds, target_dim=target_dim, ridge=ridge)

    monkeypatch.setattr(ldasvm_speech.lda, "fit_lda", spy)
    _accuracy, assignment = crossval_features(features, labels, folds=10, seed=42)

    assert len(seen) == 10
    row_index = {tuple(row): k for k, row in enumerate(features)}
    for fold, fitted in enumerate(seen):
        held_rows = {tuple(r) for r in features[assignment == fold]}
        assert fitted.shape[0] == total - int((assignment == fold).sum())
        assert all(tuple(row) not in held_rows for row in fitted)


def test_paper_protocol_fits_lda_once(train_root, monkeypatch):
    calls = []
    original = ldasvm_speech.lda.fit_lda

    def spy(ds, target_dim=None, ridge=None):
        calls.append(len(ds))
        return original(ds, target_dim=target_dim, ridge=ridge)

    monkeypatch.setattr(ldasvm_speech.lda, "fit_lda", spy)
    crossval_corpus(train_root, paper_protocol=True)
    assert calls == [20]


def test_compare_uses_identical_folds(train_root):
    result = compare_protocols(train_root, seed=5)
    again = stratified_folds(
        corpus_features(train_root, FrontendConfig())[1], 10, seed=5
    )
    assert np.array_equal(result.fold_assignment, again)
    assert result.delta == result.lda_accuracy - result.raw_accuracy


def test_no_signal_corpus_keeps_delta_small(tmp_path, rng):
    # identical white-noise clips reused for every class: labels carry nothing
    clips = [0.3 * rng.standard_normal(4000) for _ in range(4)]
    root = tmp_path / "null"
    for name in ("a", "b", "c", "d", "e"):
        directory = root / name
        directory.mkdir(parents=True)
        for k, clip in enumerate(clips):
            write_wav_pcm16(directory / f"{k}.wav", clip, 10000)
    result = compare_protocols(root, seed=1)
    assert result.raw_accuracy <= 60.0
    assert result.lda_accuracy <= 60.0
    assert abs(result.delta) <= 40.0


# --- command line -----------------------------------------------------------


def test_cli_synth_train_predict_crossval(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    assert main(["synth", str(corpus), "--seed", "42"]) == 0
    model_path = tmp_path / "model.txt"

    assert main(["train", str(corpus / "train"), "-o", str(model_path)]) == 0
    out = capsys.readouterr().out
    assert "classes: 5" in out
    assert model_path.exists()
    train_lines = [l for l in out.splitlines() if ACCURACY_RE.match(l.removeprefix("training "))]
    assert train_lines

    assert main(["predict", str(model_path), str(corpus / "test")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert sum(1 for line in out if ACCURACY_RE.match(line)) == 1
    assert len([l for l in out if ": " in l]) >= 10

    assert main(["crossval", str(corpus / "train"), "-g", "2", "-c", "10", "-v", "10"]) == 0
    out = capsys.readouterr().out.splitlines()
    cv_lines = [l for l in out if CV_RE.match(l)]
    assert cv_lines == ["Cross Validation Accuracy = 100%"]
    assert any("-g 2 -c 10 -v 10" in l for l in out)  # flags echoed


def test_cli_compare_logs_shared_folds(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    main(["synth", str(corpus)])
    capsys.readouterr()
    assert main(["compare", str(corpus / "train"), "--log-folds"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert any(l.startswith("[raw] Cross Validation Accuracy = ") for l in out)
    assert any(l.startswith("[lda] Cross Validation Accuracy = ") for l in out)
    folds_lines = [l for l in out if l.startswith("fold assignment: ")]
    assert len(folds_lines) == 1

    assert main(["crossval", str(corpus / "train"), "--log-folds", "--no-lda"]) == 0
    out2 = capsys.readouterr().out.splitlines()
    assert [l for l in out2 if l.startswith("fold assignment: ")] == folds_lines


def test_cli_usage_error_is_exit_one(capsys):
    assert main(["train"]) == 1  # missing corpus and -o
    assert "usage error" in capsys.readouterr().err


def test_cli_data_error_is_exit_two(tmp_path, capsys):
    assert main(["crossval", str(tmp_path / "nowhere")]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_unknown_subcommand_is_exit_one(capsys):
    assert main(["frobnicate"]) == 1
