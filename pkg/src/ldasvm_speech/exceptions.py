"""Error and warning types raised across the toolkit."""


class SpeechToolkitError(Exception):
    """Base class for every toolkit-specific failure."""


class UnsupportedFormat(SpeechToolkitError):
    """WAV file uses a codec or sample width we do not decode."""


class CorruptHeader(SpeechToolkitError):
    """RIFF/fmt/data chunk structure is malformed."""


class EmptyAudio(SpeechToolkitError):
    """Decoded audio contains no samples."""


class NoClasses(SpeechToolkitError):
    """Corpus root has no class subdirectories."""


class EmptyClass(SpeechToolkitError):
    """A class directory holds no WAV files."""


class InsufficientSamples(SpeechToolkitError):
    """Clip is shorter than one analysis frame."""


class BadLength(SpeechToolkitError):
    """Transform length is not a power of two."""


class TooManyFilters(SpeechToolkitError):
    """Filterbank boundary points collide on the FFT bin grid."""


class DimensionMismatch(SpeechToolkitError):
    """Vector or matrix dimensions disagree with the model."""


class SingularScatter(SpeechToolkitError):
    """Within-class scatter is numerically singular; raise the ridge or add data."""


class BadTargetDim(SpeechToolkitError):
    """Requested projection rank exceeds what the labels support."""


class NoConvergence(SpeechToolkitError):
    """Optimizer hit its sweep budget with KKT violations outstanding."""


class DegenerateData(SpeechToolkitError):
    """Training vectors are identical across both classes; optimization cannot progress."""


class ModelFormatError(SpeechToolkitError):
    """Model file cannot be parsed."""


class BadMagic(ModelFormatError):
    """First line is not the expected model signature."""


class ModelVersionMismatch(ModelFormatError):
    """Model file version is not supported by this build."""


class UnsupportedVersion(ModelVersionMismatch):
    """Load-time rejection of a future or unknown format version."""


class TruncatedFile(ModelFormatError):
    """Model file ended or lost structure before the expected content."""


class TooFewSamples(UserWarning):
    """A class lacks enough members for every cross-validation fold to train on it."""
