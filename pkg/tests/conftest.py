import numpy as np
import pytest

from ldasvm_speech.synth import generate_corpus


@pytest.fixture(scope="session")
def synth_root(tmp_path_factory):
    """Deterministic demo corpus: 5 words, 4 train + 2 test clips each, seed 42."""
    root = tmp_path_factory.mktemp("corpus")
    generate_corpus(root, seed=42)
    return root


@pytest.fixture(scope="session")
def train_root(synth_root):
    return synth_root / "train"


@pytest.fixture(scope="session")
def test_root(synth_root):
    return synth_root / "test"


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
