"""Corpus and model validation with warning/error reporting."""

import sys
from dataclasses import dataclass, field

import numpy as np

from bfd_fileprint.models import FileprintModel, LabeledCorpus


@dataclass
class ValidationResult:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return len(self.errors) == 0

    def report(self) -> None:
        """Print validation results to stderr."""
        for w in self.warnings:
            print(f"WARNING: {w}", file=sys.stderr)
        for e in self.errors:
            print(f"ERROR: {e}", file=sys.stderr)
        if not self.is_valid:
            print(f"Validation failed ({len(self.errors)} errors, {len(self.warnings)} warnings)", file=sys.stderr)


def validate_corpus(corpus: LabeledCorpus, min_files_per_class: int = 1) -> ValidationResult:
    """Check a corpus before feature extraction."""
    result = ValidationResult()

    if corpus.skipped_empty:
        result.warnings.append(f"Skipped {corpus.skipped_empty} zero-length files")

    if not corpus.classes:
        result.errors.append("Corpus has no classes")
        return result

    for label in corpus.labels:
        n = len(corpus.classes[label])
        if n < min_files_per_class:
            result.errors.append(f"Class '{label}' has {n} files, at least {min_files_per_class} required")

    seen: dict[str, str] = {}
    for label, ref in corpus.items():
        key = str(ref.path)
        if key in seen and seen[key] != label:
            result.errors.append(f"File {key} is listed under both '{seen[key]}' and '{label}'")
        seen[key] = label

    return result


def validate_training_corpus(corpus: LabeledCorpus) -> ValidationResult:
    result = validate_corpus(corpus, min_files_per_class=2)
    if len(corpus.classes) < 2:
        result.errors.append(f"Training needs at least 2 classes, got {len(corpus.classes)}")
    return result


def validate_model(model: FileprintModel) -> ValidationResult:
    """Check a trained model's invariants before it is written."""
    result = ValidationResult()

    if model.classifier.output_size != len(model.labels):
        result.errors.append(
            f"Classifier outputs {model.classifier.output_size} scores for {len(model.labels)} labels"
        )
    if model.aann_encoder.output_size != model.config.n2:
        result.errors.append(f"Encoder output size {model.aann_encoder.output_size} != n2 ({model.config.n2})")
    if model.pca.k != model.config.n1:
        result.errors.append(f"PCA keeps {model.pca.k} components, config says n1={model.config.n1}")
    if (model.standardizer.std <= 0).any():
        result.errors.append("Standardizer has non-positive standard deviations")
    if (model.bottleneck_standardizer.std <= 0).any():
        result.errors.append("Bottleneck standardizer has non-positive standard deviations")
    if model.bottleneck_standardizer.mean.shape != (model.aann_encoder.output_size,):
        result.errors.append(
            f"Bottleneck standardizer covers {model.bottleneck_standardizer.mean.shape[0]} features, "
            f"encoder outputs {model.aann_encoder.output_size}"
        )
    if not (model.aann_encoder.is_finite() and model.classifier.is_finite()):
        result.errors.append("Network weights contain non-finite values")
    if len(set(model.labels)) != len(model.labels):
        result.errors.append("Duplicate class labels")

    if model.standardizer.degenerate:
        result.warnings.append(
            f"{len(model.standardizer.degenerate)} constant PCA features: "
            f"{', '.join(str(i) for i in model.standardizer.degenerate)}"
        )
    if model.bottleneck_standardizer.degenerate:
        result.warnings.append(
            f"{len(model.bottleneck_standardizer.degenerate)} constant bottleneck features kept with unit scale: "
            f"{', '.join(str(i) for i in model.bottleneck_standardizer.degenerate)}"
        )
    if not np.all(np.diff(model.pca.eigenvalues) <= 0):
        result.warnings.append("PCA eigenvalues are not sorted in descending order")

    return result
