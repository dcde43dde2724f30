import random

import pytest

from evopep import (
    PreprocessConfig,
    SynthConfig,
    preprocess,
    synthesize_spectrum,
)


def clean_spectrum(peptide: str, complements: bool = True):
    """Noise-free complete-ladder spectrum, preprocessed like the pipeline."""
    raw = synthesize_spectrum(peptide, SynthConfig(), random.Random(0))
    return preprocess(raw, PreprocessConfig(), complements=complements)


@pytest.fixture
def ladder_aaal():
    return clean_spectrum("AAALAAADAR")


@pytest.fixture
def ladder_lgvtlyk():
    return clean_spectrum("LGVTLYK")
