import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from sandalc.corpus import MODEL_NAMES, corpus_source
from sandalc.pipeline import build_model


@pytest.fixture(scope="session")
def builds():
    """One BuildResult per bundled corpus model."""
    return {name: build_model(corpus_source(name)) for name in MODEL_NAMES}
