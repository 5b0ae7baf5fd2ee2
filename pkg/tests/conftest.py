import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from logcone import families


@pytest.fixture(scope="session")
def corpus():
    """All corpus members, generated once per session."""
    return families.corpus()


@pytest.fixture(scope="session")
def iso_corpus():
    """Exactly-isotropic corpus members."""
    return families.isotropic_corpus()


@pytest.fixture(scope="session")
def corpus_1d(corpus):
    return [(label, g) for label, g in corpus if g.dim == 1]
