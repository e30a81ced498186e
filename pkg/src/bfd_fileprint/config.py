"""Training and pipeline configuration models and loader."""

from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from bfd_fileprint.mappings import (
    BFD_BINS,
    DEFAULT_AANN_HIDDEN,
    DEFAULT_CLASSIFIER_HIDDEN,
    DEFAULT_N1,
    DEFAULT_N2,
)

SEED_LIMIT = 2**64


class TrainingConfig(BaseModel):
    """Backpropagation controls for one network."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    learning_rate: float = Field(default=0.05, gt=0)
    momentum: float = Field(default=0.9, ge=0, lt=1)
    max_epochs: int = Field(default=2000, ge=1)
    mse_goal: float = Field(default=1e-6, ge=0)
    plateau_window: int = Field(default=10, ge=1)
    plateau_rel_improvement: float = Field(default=1e-6, ge=0)
    perturb_magnitude: float = Field(default=1e-3, ge=0)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)


def default_aann_training() -> TrainingConfig:
    return TrainingConfig(learning_rate=0.0005, momentum=0.9, max_epochs=200)


def default_classifier_training() -> TrainingConfig:
    return TrainingConfig(learning_rate=0.01, momentum=0.9, max_epochs=500, mse_goal=1e-3)


class PipelineConfig(BaseModel):
    """Dimensions and training controls of the PCA -> AANN -> MLP stack."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n1: int = Field(default=DEFAULT_N1, ge=1, le=BFD_BINS)
    n2: int = Field(default=DEFAULT_N2, ge=1)
    aann_hidden: int = Field(default=DEFAULT_AANN_HIDDEN, ge=1)
    classifier_hidden: int = Field(default=DEFAULT_CLASSIFIER_HIDDEN, ge=1)
    # "shared" divides every PCA coordinate by the largest coordinate std
    feature_scaling: Literal["shared", "per-feature"] = "shared"
    aann_training: TrainingConfig = Field(default_factory=default_aann_training)
    classifier_training: TrainingConfig = Field(default_factory=default_classifier_training)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)

    @model_validator(mode="after")
    def _bottleneck_narrower_than_pca(self):
        if self.n2 >= self.n1:
            raise ValueError(f"bottleneck must be narrower than the PCA output: N2 < N1 required, got N2={self.n2}, N1={self.n1}")
        return self


def load_config(path: str | Path) -> PipelineConfig:
    """Load a pipeline config from a YAML file.

    Partial training sections are merged onto the pipeline defaults.
    """
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise TypeError(f"{path}: expected a mapping at the top level")
    defaults = PipelineConfig().model_dump()
    for key in ("aann_training", "classifier_training"):
        if isinstance(data.get(key), dict):
            data[key] = {**defaults[key], **data[key]}
    return PipelineConfig(**data)
