"""Record types for corpora, trained fileprint models and evaluation results."""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from bfd_fileprint.config import PipelineConfig
from bfd_fileprint.errors import DimensionMismatch
from bfd_fileprint.histogram import ByteHistogram, count_bytes, histogram_file
from bfd_fileprint.mlp import MlpNetwork
from bfd_fileprint.pca import PcaModel


@dataclass(frozen=True)
class FileRef:
    """One sample: a file on disk, or in-memory content named like one."""

    path: Path
    size: int
    data: bytes | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_bytes(cls, path: str | Path, data: bytes) -> "FileRef":
        return cls(Path(path), len(data), bytes(data))

    def read_bytes(self) -> bytes:
        if self.data is not None:
            return self.data
        return self.path.read_bytes()

    def histogram(self) -> ByteHistogram:
        if self.data is not None:
            return count_bytes(self.data)
        return histogram_file(self.path)


@dataclass
class LabeledCorpus:
    """Samples grouped by class name; class names are case-sensitive."""

    classes: dict[str, list[FileRef]] = field(default_factory=dict)
    skipped_empty: int = 0

    @property
    def labels(self) -> list[str]:
        return sorted(self.classes)

    @property
    def total_files(self) -> int:
        return sum(len(files) for files in self.classes.values())

    def items(self) -> list[tuple[str, FileRef]]:
        """(label, file) pairs in sorted-label, sorted-path order."""
        return [
            (label, ref)
            for label in self.labels
            for ref in sorted(self.classes[label], key=lambda r: str(r.path))
        ]


@dataclass(frozen=True)
class Standardizer:
    """Column means and divisors fitted on PCA or bottleneck outputs."""

    mean: np.ndarray
    std: np.ndarray
    degenerate: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("mean", "std"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise DimensionMismatch(f"Standardizer mean {self.mean.shape} and std {self.std.shape} disagree")
        object.__setattr__(self, "degenerate", tuple(int(i) for i in self.degenerate))

    def apply(self, z: np.ndarray) -> np.ndarray:
        return (np.asarray(z, dtype=np.float64) - self.mean) / self.std


@dataclass(frozen=True)
class FileprintModel:
    format_version: int
    labels: tuple[str, ...]
    pca: PcaModel
    standardizer: Standardizer
    aann_encoder: MlpNetwork
    bottleneck_standardizer: Standardizer
    classifier: MlpNetwork
    config: PipelineConfig

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_features(self) -> int:
        return self.aann_encoder.output_size


@dataclass(frozen=True)
class Prediction:
    label: str
    scores: tuple[tuple[str, float], ...]

    @property
    def score(self) -> float:
        """Output of the winning class."""
        return dict(self.scores)[self.label]


@dataclass
class ConfusionMatrix:
    """Counts with rows = predicted class, columns = actual class."""

    labels: tuple[str, ...]
    cells: np.ndarray

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.cells = np.asarray(self.cells, dtype=np.int64)
        n = len(self.labels)
        if self.cells.shape != (n, n):
            raise DimensionMismatch(f"Confusion cells {self.cells.shape} do not match {n} labels")
        if (self.cells < 0).any():
            raise ValueError("Confusion matrix counts must be non-negative")

    @classmethod
    def empty(cls, labels) -> "ConfusionMatrix":
        labels = tuple(labels)
        return cls(labels, np.zeros((len(labels), len(labels)), dtype=np.int64))

    def record(self, predicted: str, actual: str) -> None:
        self.cells[self.labels.index(predicted), self.labels.index(actual)] += 1

    @property
    def total(self) -> int:
        return int(self.cells.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.cells))

    def column_sums(self) -> dict[str, int]:
        return dict(zip(self.labels, (int(c) for c in self.cells.sum(axis=0))))

    def accuracy(self) -> float:
        if self.total == 0:
            raise ValueError("Accuracy of an empty confusion matrix is undefined")
        return self.correct / self.total

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.cells, index=list(self.labels), columns=list(self.labels))
        frame.index.name = "predicted"
        return frame
