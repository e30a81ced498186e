"""Writes fileprint model documents, corpora and CSV exports."""

import json
import sys
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np
import pandas as pd

from bfd_fileprint.formatter import fmt_real
from bfd_fileprint.mlp import MlpNetwork
from bfd_fileprint.models import FileprintModel, LabeledCorpus, Standardizer

MODEL_FIELDS = (
    "aann_encoder",
    "bottleneck_standardizer",
    "classifier",
    "config",
    "format_version",
    "labels",
    "pca",
    "standardizer",
)


def network_to_doc(net: MlpNetwork) -> dict:
    return {
        "sizes": [spec.size for spec in net.layers],
        "activations": [spec.activation for spec in net.layers],
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
    }


def standardizer_to_doc(standardizer: Standardizer) -> dict:
    return {
        "mean": standardizer.mean.tolist(),
        "std": standardizer.std.tolist(),
        "degenerate": list(standardizer.degenerate),
    }


def model_to_doc(model: FileprintModel) -> dict:
    return {
        "format_version": model.format_version,
        "labels": list(model.labels),
        "pca": {
            "k": model.pca.k,
            "mean": model.pca.mean.tolist(),
            "basis": model.pca.basis.tolist(),
            "eigenvalues": model.pca.eigenvalues.tolist(),
        },
        "standardizer": standardizer_to_doc(model.standardizer),
        "aann_encoder": network_to_doc(model.aann_encoder),
        "bottleneck_standardizer": standardizer_to_doc(model.bottleneck_standardizer),
        "classifier": network_to_doc(model.classifier),
        "config": model.config.model_dump(),
    }


def _emit(value) -> str:
    """Canonical JSON: sorted keys, no whitespace, reals via fmt_real."""
    if isinstance(value, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + _emit(value[k]) for k in sorted(value)) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_emit(v) for v in value) + "]"
    if isinstance(value, np.ndarray):
        return _emit(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt_real(value)
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def model_to_bytes(model: FileprintModel) -> bytes:
    """Return the model document as bytes, one top-level field per line."""
    doc = model_to_doc(model)
    lines = [f"  {json.dumps(key)}: {_emit(doc[key])}" for key in MODEL_FIELDS]
    return ("{\n" + ",\n".join(lines) + "\n}\n").encode("utf-8")


def save_model(model: FileprintModel, sink: Union[str, Path, BinaryIO]) -> None:
    """Write the model document to a path or a binary file-like object."""
    data = model_to_bytes(model)
    if isinstance(sink, (str, Path)):
        Path(sink).write_bytes(data)
    else:
        sink.write(data)


def write_corpus(corpus: LabeledCorpus, root: str | Path) -> int:
    """Materialize a corpus as <root>/<class>/<file>; returns files written."""
    root = Path(root)
    written = 0
    for label, ref in corpus.items():
        class_dir = root / label
        class_dir.mkdir(parents=True, exist_ok=True)
        (class_dir / ref.path.name).write_bytes(ref.read_bytes())
        written += 1
    return written


def write_csv(frame: pd.DataFrame, out: str | Path | None = None) -> None:
    """CSV with header row and no index, to a file or standard output."""
    if out is None:
        frame.to_csv(sys.stdout, index=False, lineterminator="\n")
    else:
        frame.to_csv(out, index=False, lineterminator="\n")
