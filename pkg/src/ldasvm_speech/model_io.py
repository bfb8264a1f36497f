"""Pipeline model persistence.

Plain-text format so models diff cleanly and round-trip exactly: floats are
written with 17 significant digits, which reconstructs every 64-bit value
bit-for-bit. Files are written atomically (temp file + rename) so a failed
run never leaves a corrupt model behind.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .exceptions import (
    BadMagic,
    DimensionMismatch,
    ModelFormatError,
    TruncatedFile,
    UnsupportedVersion,
)
from .lda import LdaModel
from .mfcc import FrontendConfig
from .svm import BinarySvm, KernelSpec, SvmModel

MAGIC = "LDASVM-SPEECH"
FORMAT_VERSION = 1

_FRONTEND_KEYS = (
    "frame_len_n",
    "frame_shift_m",
    "num_filters_k",
    "sample_rate_hz",
    "log_floor",
)


@dataclass
class PipelineModel:
    """Front-end config + optional discriminant projection + classifier."""

    frontend: FrontendConfig
    lda: LdaModel | None
    svm: SvmModel
    class_names: list[str]
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if len(self.class_names) != self.svm.nr_class:
            raise DimensionMismatch(
                f"{len(self.class_names)} class names vs {self.svm.nr_class} classes"
            )
        expected = (
            self.lda.output_dim if self.lda is not None
            else self.frontend.num_filters_k - 1
        )
        if self.svm.dim != expected:
            raise DimensionMismatch(
                f"classifier dim {self.svm.dim} != expected feature dim {expected}"
            )

    @property
    def feature_dim(self) -> int:
        return self.svm.dim


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _fmt_row(values) -> str:
    return " ".join(_fmt(v) for v in np.asarray(values, dtype=np.float64))


def save_model(model: PipelineModel, path) -> None:
    """Serialize to text and atomically replace `path`."""
    lines = [f"{MAGIC} v{model.format_version}"]
    lines.append("frontend")
    cfg = model.frontend
    lines.append(f"frame_len_n={cfg.frame_len_n}")
    lines.append(f"frame_shift_m={cfg.frame_shift_m}")
    lines.append(f"num_filters_k={cfg.num_filters_k}")
    lines.append(f"sample_rate_hz={cfg.sample_rate_hz}")
    lines.append(f"log_floor={_fmt(cfg.log_floor)}")

    lines.append(f"classes {len(model.class_names)}")
    for label, name in enumerate(model.class_names, start=1):
        lines.append(f"{label} {name}")

    if model.lda is None:
        lines.append("lda none")
    else:
        lda = model.lda
        lines.append(f"lda {lda.input_dim} {lda.output_dim}")
        lines.append(f"eigenvalues {_fmt_row(lda.eigenvalues)}")
        lines.append(f"global_mean {_fmt_row(lda.global_mean)}")
        for row in lda.class_means:
            lines.append(f"class_mean {_fmt_row(row)}")
        for row in lda.basis:  # row-major: one line per input dimension
            lines.append(f"basis {_fmt_row(row)}")

    svm = model.svm
    kernel = svm.machines[0].kernel
    lines.append("svm")
    lines.append(f"kind={kernel.kind}")
    lines.append(f"gamma={_fmt(kernel.gamma)}")
    lines.append(f"degree={kernel.degree}")
    lines.append(f"coef0={_fmt(kernel.coef0)}")
    lines.append(f"cost_c={_fmt(svm.cost_c)}")
    lines.append(f"nr_class={svm.nr_class}")
    lines.append("labels " + " ".join(str(v) for v in svm.labels))
    for (label_a, label_b), machine in zip(svm.pairs(), svm.machines):
        lines.append(f"pair {label_a} {label_b}")
        lines.append(f"sv_count {machine.alpha_y.shape[0]}")
        lines.append(f"rho {_fmt(-machine.bias_b)}")
        for value in machine.alpha_y:
            lines.append(f"alpha_y {_fmt(value)}")
        for row in machine.support_vectors:
            lines.append(f"sv {_fmt_row(row)}")
    lines.append("end")

    target = Path(path)
    fd, tmp_name = tempfile.mkstemp(
        prefix=target.name + ".", suffix=".tmp", dir=target.parent
    )
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write("\n".join(lines) + "\n")
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


class _LineReader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.cursor = 0

    def next(self, expect: str | None = None) -> str:
        if self.cursor >= len(self.lines):
            raise TruncatedFile(
                f"file ends at line {self.cursor}; expected "
                + (f"{expect!r}" if expect else "more content")
            )
        line = self.lines[self.cursor]
        self.cursor += 1
        if expect is not None and not line.startswith(expect):
            raise ModelFormatError(
                f"line {self.cursor}: expected {expect!r}, found {line!r}"
            )
        return line

    def fail(self, message: str):
        raise ModelFormatError(f"line {self.cursor}: {message}")


def _parse_kv(reader: _LineReader, key: str) -> str:
    line = reader.next(expect=key + "=")
    return line.split("=", 1)[1]


def _parse_floats(reader: _LineReader, tag: str, count: int) -> np.ndarray:
    line = reader.next(expect=tag + " ")
    parts = line.split()[1:]
    if len(parts) != count:
        reader.fail(f"{tag} carries {len(parts)} values, expected {count}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        reader.fail(f"{tag} holds a non-numeric token")


def load_model(path) -> PipelineModel:
    """Parse a saved model; inverse of save_model for every numeric field."""
    reader = _LineReader(Path(path).read_text())

    header = reader.next()
    parts = header.split()
    if len(parts) != 2 or parts[0] != MAGIC or not parts[1].startswith("v"):
        raise BadMagic(f"line 1: expected '{MAGIC} v<version>', found {header!r}")
    try:
        version = int(parts[1][1:])
    except ValueError as exc:
        raise BadMagic(f"line 1: unreadable version in {header!r}") from exc
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(
            f"line 1: version {version} unsupported (this build reads v{FORMAT_VERSION})"
        )

    reader.next(expect="frontend")
    raw = {key: _parse_kv(reader, key) for key in _FRONTEND_KEYS}
    try:
        frontend = FrontendConfig(
            frame_len_n=int(raw["frame_len_n"]),
            frame_shift_m=int(raw["frame_shift_m"]),
            num_filters_k=int(raw["num_filters_k"]),
            sample_rate_hz=int(raw["sample_rate_hz"]),
            log_floor=float(raw["log_floor"]),
        )
    except ValueError as exc:
        raise ModelFormatError(f"bad frontend block: {exc}") from exc

    line = reader.next(expect="classes")
    try:
        n_classes = int(line.split()[1])
    except (IndexError, ValueError):
        reader.fail("unreadable class count")
    class_names = []
    for expected_label in range(1, n_classes + 1):
        entry = reader.next().split(maxsplit=1)
        if len(entry) != 2 or entry[0] != str(expected_label):
            reader.fail(f"expected class table row for label {expected_label}")
        class_names.append(entry[1])

    line = reader.next(expect="lda")
    tokens = line.split()
    if tokens[1:] == ["none"]:
        lda_model = None
    else:
        try:
            dim, rank = int(tokens[1]), int(tokens[2])
        except (IndexError, ValueError):
            reader.fail("lda header needs input and output dimensions")
        eigenvalues = _parse_floats(reader, "eigenvalues", rank)
        global_mean = _parse_floats(reader, "global_mean", dim)
        class_means = np.vstack(
            [_parse_floats(reader, "class_mean", dim) for _ in range(n_classes)]
        )
        basis = np.vstack(
            [_parse_floats(reader, "basis", rank) for _ in range(dim)]
        )
        lda_model = LdaModel(
            basis=basis,
            eigenvalues=eigenvalues,
            global_mean=global_mean,
            class_means=class_means,
        )

    reader.next(expect="svm")
    kind = _parse_kv(reader, "kind")
    try:
        kernel = KernelSpec(
            kind=kind,
            gamma=float(_parse_kv(reader, "gamma")),
            degree=int(_parse_kv(reader, "degree")),
            coef0=float(_parse_kv(reader, "coef0")),
        )
        cost_c = float(_parse_kv(reader, "cost_c"))
        nr_class = int(_parse_kv(reader, "nr_class"))
    except ValueError as exc:
        raise ModelFormatError(f"bad svm block: {exc}") from exc
    if nr_class != n_classes:
        reader.fail(f"svm nr_class {nr_class} != class table size {n_classes}")

    line = reader.next(expect="labels")
    try:
        labels = [int(v) for v in line.split()[1:]]
    except ValueError:
        reader.fail("labels line holds a non-integer token")
    if len(labels) != n_classes:
        reader.fail(f"{len(labels)} labels for {n_classes} classes")

    feature_dim = (
        lda_model.output_dim if lda_model is not None
        else frontend.num_filters_k - 1
    )
    machines = []
    for label_a, label_b in combinations(labels, 2):
        pair_line = reader.next(expect="pair")
        if pair_line.split()[1:] != [str(label_a), str(label_b)]:
            reader.fail(f"expected section 'pair {label_a} {label_b}'")
        count_line = reader.next(expect="sv_count")
        try:
            sv_count = int(count_line.split()[1])
        except (IndexError, ValueError):
            reader.fail("unreadable sv_count")
        rho = _parse_floats(reader, "rho", 1)[0]
        alpha_y = np.array(
            [_parse_floats(reader, "alpha_y", 1)[0] for _ in range(sv_count)]
        )
        support = np.vstack(
            [_parse_floats(reader, "sv", feature_dim) for _ in range(sv_count)]
        )
        machines.append(
            BinarySvm(
                support_vectors=support,
                alpha_y=alpha_y,
                bias_b=float(-rho),
                kernel=kernel,
            )
        )

    reader.next(expect="end")
    svm_model = SvmModel(labels=labels, machines=machines, cost_c=cost_c)
    return PipelineModel(
        frontend=frontend,
        lda=lda_model,
        svm=svm_model,
        class_names=class_names,
        format_version=version,
    )
