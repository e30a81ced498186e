"""Shared corpora, configs and trained models."""

import pytest

from bfd_fileprint.config import PipelineConfig, TrainingConfig
from bfd_fileprint.fileprint import fit_pipeline, split
from bfd_fileprint.models import FileRef, LabeledCorpus
from bfd_fileprint.synth import synth_corpus


def make_toy_corpus(files_per_class: int = 6) -> LabeledCorpus:
    """Two point-mass classes: all-0x00 files and all-0xFF files."""
    corpus = LabeledCorpus()
    corpus.classes["ones"] = [
        FileRef.from_bytes(f"ones/ones_{i}.bin", b"\xff" * (100 + 37 * i)) for i in range(files_per_class)
    ]
    corpus.classes["zeros"] = [
        FileRef.from_bytes(f"zeros/zeros_{i}.bin", b"\x00" * (64 + 53 * i)) for i in range(files_per_class)
    ]
    return corpus


def small_config(**overrides) -> PipelineConfig:
    values = dict(
        n1=8,
        n2=3,
        aann_hidden=6,
        classifier_hidden=8,
        aann_training=TrainingConfig(learning_rate=0.005, momentum=0.9, max_epochs=60),
        classifier_training=TrainingConfig(learning_rate=0.05, momentum=0.9, max_epochs=300, mse_goal=1e-3),
        seed=3,
    )
    values.update(overrides)
    return PipelineConfig(**values)


def synth_config() -> PipelineConfig:
    return PipelineConfig(
        n1=7,
        n2=6,
        aann_hidden=12,
        classifier_hidden=16,
        aann_training=TrainingConfig(learning_rate=0.002, momentum=0.9, max_epochs=80),
        classifier_training=TrainingConfig(learning_rate=0.01, momentum=0.9, max_epochs=400, mse_goal=1e-3),
        seed=11,
    )


@pytest.fixture
def toy_corpus():
    return make_toy_corpus()


@pytest.fixture(scope="session")
def toy_trained():
    return fit_pipeline(make_toy_corpus(), small_config())


@pytest.fixture(scope="session")
def toy_model(toy_trained):
    return toy_trained[0]


@pytest.fixture(scope="session")
def synth_split():
    corpus = synth_corpus(None, files_per_class=16, size_range=(4096, 16384), seed=5)
    return split(corpus, 12, 4, seed=5)


@pytest.fixture(scope="session")
def synth_trained(synth_split):
    train, _ = synth_split
    return fit_pipeline(train, synth_config())


@pytest.fixture(scope="session")
def synth_model(synth_trained):
    return synth_trained[0]
