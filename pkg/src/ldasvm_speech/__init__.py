"""Speech word/speaker recognition: MFCC features, Fisher LDA, kernel SVMs."""

from .audio_io import AudioClip, CorpusIndex, load_wav, scan_corpus
from .dataset import LabeledDataset
from .lda import LdaModel, class_stats, fit_lda, project, scatter_matrices
from .mfcc import FrontendConfig, MelFilterBank, extract_features
from .model_io import PipelineModel, load_model, save_model
from .pipeline import (
    CompareResult,
    RunReport,
    compare_protocols,
    crossval_corpus,
    crossval_features,
    predict_files,
    predict_labeled_corpus,
    train_pipeline,
)
from .svm import (
    BinarySvm,
    KernelSpec,
    SvmModel,
    cross_validate,
    decision_values,
    kernel_eval,
    predict,
    predict_batch,
    train_binary,
    train_multiclass,
)
from .synth import generate_corpus

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "BinarySvm",
    "CompareResult",
    "CorpusIndex",
    "FrontendConfig",
    "KernelSpec",
    "LabeledDataset",
    "LdaModel",
    "MelFilterBank",
    "PipelineModel",
    "RunReport",
    "SvmModel",
    "class_stats",
    "compare_protocols",
    "cross_validate",
    "crossval_corpus",
    "crossval_features",
    "decision_values",
    "extract_features",
    "fit_lda",
    "generate_corpus",
    "kernel_eval",
    "load_model",
    "load_wav",
    "predict",
    "predict_batch",
    "predict_files",
    "predict_labeled_corpus",
    "project",
    "save_model",
    "scan_corpus",
    "scatter_matrices",
    "train_binary",
    "train_multiclass",
    "train_pipeline",
]
