import pytest

from logic.enumerator import corpus_sentences
from logic.guards import GuardConfig
from logic.structures import Interpretation, LinearOrder


@pytest.fixture
def guards():
    return GuardConfig()


@pytest.fixture(scope="session")
def corpus():
    """Phrases FO³(<, succ, min, max) de taille <= 12, profondeur <= 3"""
    return corpus_sentences(60, 12, seed=7, max_depth=3)


def alpha0(N: int) -> Interpretation:
    return Interpretation(LinearOrder(N))
