"""Command-line interface.

Subcommands: train, predict, crossval, compare, synth. Exit codes: 0 on
success, 1 on usage errors, 2 on data or convergence errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import pipeline, synth
from .exceptions import SpeechToolkitError
from .mfcc import FrontendConfig
from .svm import KERNEL_KINDS, KernelSpec


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we reserve 2 for data errors
        raise _UsageError(message)


def _add_frontend_flags(parser):
    group = parser.add_argument_group("front-end overrides")
    group.add_argument("--frame-len", type=int, default=256, metavar="N",
                       help="frame length in samples (power of two)")
    group.add_argument("--frame-shift", type=int, default=100, metavar="M",
                       help="frame shift in samples (M < N)")
    group.add_argument("--num-filters", type=int, default=20, metavar="K",
                       help="mel filterbank size")
    group.add_argument("--sample-rate", type=int, default=10000, metavar="HZ",
                       help="expected sampling rate")
    group.add_argument("--log-floor", type=float, default=1e-10,
                       help="energy floor before the log")


def _add_kernel_flags(parser):
    parser.add_argument("-g", "--gamma", type=float, default=pipeline.DEFAULT_GAMMA,
                        help="kernel gamma (default 2)")
    parser.add_argument("-c", "--cost", type=float, default=pipeline.DEFAULT_COST,
                        help="soft-margin cost C (default 10)")
    parser.add_argument("--kernel", choices=KERNEL_KINDS, default="rbf")
    parser.add_argument("--degree", type=int, default=3,
                        help="polynomial kernel degree")
    parser.add_argument("--coef0", type=float, default=0.0,
                        help="polynomial kernel offset")


def _add_lda_flags(parser):
    parser.add_argument("--lda-dim", type=int, default=None, metavar="R",
                        help="projection rank (default C-1)")
    parser.add_argument("--no-lda", action="store_true",
                        help="feed raw features to the classifier")
    parser.add_argument("--ridge", type=float, default=None,
                        help="scatter regularizer (default 1e-6*trace/d)")


def _frontend(args) -> FrontendConfig:
    return FrontendConfig(
        frame_len_n=args.frame_len,
        frame_shift_m=args.frame_shift,
        num_filters_k=args.num_filters,
        sample_rate_hz=args.sample_rate,
        log_floor=args.log_floor,
    )


def _kernel(args) -> KernelSpec:
    return KernelSpec(kind=args.kernel, gamma=args.gamma,
                      degree=args.degree, coef0=args.coef0)


def make_parser() -> _Parser:
    parser = _Parser(
        prog="ldasvm-speech",
        description="Train and run MFCC + LDA + SVM word/speaker recognizers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train a pipeline on a labeled corpus")
    train.add_argument("root", help="corpus root: <root>/<class>/*.wav")
    train.add_argument("-o", "--out", required=True, help="model file to write")
    _add_kernel_flags(train)
    _add_lda_flags(train)
    _add_frontend_flags(train)

    predict = sub.add_parser("predict", help="classify WAV files with a model")
    predict.add_argument("model", help="model file from `train`")
    predict.add_argument("paths", nargs="+",
                         help="WAV files, or one labeled corpus directory")

    crossval = sub.add_parser("crossval", help="stratified k-fold accuracy")
    crossval.add_argument("root")
    crossval.add_argument("-v", "--folds", type=int, default=pipeline.DEFAULT_FOLDS,
                          help="fold count (default 10)")
    crossval.add_argument("--seed", type=int, default=pipeline.DEFAULT_SEED)
    crossval.add_argument(
        "--paper-protocol", action="store_true",
        help="project the whole corpus once before folding; leaks held-out "
        "vectors into the projection (default refits it per fold)",
    )
    crossval.add_argument("--log-folds", action="store_true",
                          help="print the fold id of every sample")
    _add_kernel_flags(crossval)
    _add_lda_flags(crossval)
    _add_frontend_flags(crossval)

    compare = sub.add_parser(
        "compare", help="cross-validate raw vs LDA pipelines on identical folds"
    )
    compare.add_argument("root")
    compare.add_argument("-v", "--folds", type=int, default=pipeline.DEFAULT_FOLDS)
    compare.add_argument("--seed", type=int, default=pipeline.DEFAULT_SEED)
    compare.add_argument("--paper-protocol", action="store_true")
    compare.add_argument("--log-folds", action="store_true")
    _add_kernel_flags(compare)
    _add_lda_flags(compare)
    _add_frontend_flags(compare)

    synth_cmd = sub.add_parser("synth", help="emit the deterministic demo corpus")
    synth_cmd.add_argument("root", help="output directory")
    synth_cmd.add_argument("--seed", type=int, default=42)
    synth_cmd.add_argument("--train-per-class", type=int, default=4)
    synth_cmd.add_argument("--test-per-class", type=int, default=2)

    return parser


def _cmd_train(args) -> int:
    model, report = pipeline.train_pipeline(
        args.root,
        cfg=_frontend(args),
        kernel=_kernel(args),
        cost_c=args.cost,
        use_lda=not args.no_lda,
        lda_dim=args.lda_dim,
        ridge=args.ridge,
    )
    counts = {}
    for entry in report.entries:
        counts[entry.true_label] = counts.get(entry.true_label, 0) + 1
    print(f"classes: {len(model.class_names)}")
    for label, name in enumerate(model.class_names, start=1):
        print(f"  {label} {name} ({counts.get(label, 0)} files)")
    if model.lda is not None:
        print(f"features: {model.frontend.num_filters_k - 1} -> "
              f"lda projection: {model.lda.output_dim}")
    else:
        print(f"features: {model.frontend.num_filters_k - 1} (no lda)")
    print("training " + pipeline.format_accuracy_line(report.correct, report.total))
    pipeline.save_model(model, args.out)
    print(f"model written: {args.out}")
    return 0


def _cmd_predict(args) -> int:
    model = pipeline.load_model(args.model)
    if len(args.paths) == 1 and Path(args.paths[0]).is_dir():
        report = pipeline.predict_labeled_corpus(model, args.paths[0])
    else:
        report = pipeline.predict_files(model, args.paths)
    for entry in report.entries:
        print(f"{entry.path}: {entry.predicted_label} ({entry.predicted_name})")
    if report.correct is not None:
        print(pipeline.format_accuracy_line(report.correct, report.total))
    return 0


def _echo_flags(args, lda_enabled: bool):
    protocol = "paper (pre-projected)" if args.paper_protocol else "per-fold refit"
    lda_note = protocol if lda_enabled else "off"
    print(f"flags: -g {args.gamma:g} -c {args.cost:g} -v {args.folds} "
          f"| kernel {args.kernel} | lda {lda_note} | seed {args.seed}")


def _print_folds(assignment):
    print("fold assignment: " + " ".join(str(int(f)) for f in assignment))


def _cmd_crossval(args) -> int:
    accuracy, assignment = pipeline.crossval_corpus(
        args.root,
        cfg=_frontend(args),
        folds=args.folds,
        cost_c=args.cost,
        kernel=_kernel(args),
        seed=args.seed,
        use_lda=not args.no_lda,
        lda_dim=args.lda_dim,
        ridge=args.ridge,
        paper_protocol=args.paper_protocol,
    )
    _echo_flags(args, lda_enabled=not args.no_lda)
    if args.log_folds:
        _print_folds(assignment)
    print(pipeline.format_cv_line(accuracy))
    return 0


def _cmd_compare(args) -> int:
    result = pipeline.compare_protocols(
        args.root,
        cfg=_frontend(args),
        folds=args.folds,
        cost_c=args.cost,
        kernel=_kernel(args),
        seed=args.seed,
        lda_dim=args.lda_dim,
        ridge=args.ridge,
        paper_protocol=args.paper_protocol,
    )
    _echo_flags(args, lda_enabled=True)
    if args.log_folds:
        _print_folds(result.fold_assignment)
    print("[raw] " + pipeline.format_cv_line(result.raw_accuracy))
    print("[lda] " + pipeline.format_cv_line(result.lda_accuracy))
    print(f"delta = {result.delta:+g} percentage points (lda - raw)")
    return 0


def _cmd_synth(args) -> int:
    written = synth.generate_corpus(
        args.root,
        seed=args.seed,
        train_per_class=args.train_per_class,
        test_per_class=args.test_per_class,
    )
    print(f"wrote {len(written)} files under {args.root}")
    return 0


_HANDLERS = {
    "train": _cmd_train,
    "predict": _cmd_predict,
    "crossval": _cmd_crossval,
    "compare": _cmd_compare,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _HANDLERS[args.command](args)
    except (SpeechToolkitError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
