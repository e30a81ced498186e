"""Corpus and model readers."""

import json
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np
from pydantic import ValidationError

from bfd_fileprint.config import PipelineConfig
from bfd_fileprint.errors import CorruptModel, EmptyClass, FileprintError, NoClasses, VersionMismatch
from bfd_fileprint.mappings import BFD_BINS, MODEL_FORMAT_VERSION
from bfd_fileprint.mlp import LayerSpec, MlpNetwork
from bfd_fileprint.models import FileprintModel, FileRef, LabeledCorpus, Standardizer
from bfd_fileprint.pca import PcaModel


def load_corpus(root: str | Path) -> LabeledCorpus:
    """Read a corpus laid out as <root>/<class-name>/<files...>.

    - Each immediate subdirectory is one class, named after the directory
    - Regular files directly inside it are the samples; dotfiles are ignored
    - Zero-length files are skipped and counted in `skipped_empty`
    """
    root = Path(root)
    if not root.is_dir():
        raise NoClasses(f"Corpus root {root} is not a directory")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir() and not p.name.startswith("."))
    if not class_dirs:
        raise NoClasses(f"Corpus root {root} has no class subdirectories")

    corpus = LabeledCorpus()
    for class_dir in class_dirs:
        refs = []
        for path in sorted(class_dir.iterdir()):
            if not path.is_file() or path.name.startswith("."):
                continue
            size = path.stat().st_size
            if size == 0:
                corpus.skipped_empty += 1
                continue
            refs.append(FileRef(path, size))
        if not refs:
            raise EmptyClass(f"Class '{class_dir.name}' has no usable (non-empty) files")
        corpus.classes[class_dir.name] = refs
    return corpus


def _get(doc: dict, key: str, path: str):
    if not isinstance(doc, dict):
        raise CorruptModel(path.rsplit(".", 1)[0] or "<document>", "expected an object")
    if key not in doc:
        raise CorruptModel(path, "missing field")
    return doc[key]


def _array(value, path: str, ndim: int) -> np.ndarray:
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise CorruptModel(path, f"not a numeric array ({e})") from e
    if arr.ndim != ndim:
        raise CorruptModel(path, f"expected a {ndim}-D array, got {arr.ndim}-D")
    if not np.isfinite(arr).all():
        raise CorruptModel(path, "contains non-finite values")
    return arr


def network_from_doc(doc: dict, path: str) -> MlpNetwork:
    sizes = _get(doc, "sizes", f"{path}.sizes")
    activations = _get(doc, "activations", f"{path}.activations")
    weights = _get(doc, "weights", f"{path}.weights")
    biases = _get(doc, "biases", f"{path}.biases")
    if not isinstance(sizes, list) or not all(isinstance(s, int) for s in sizes):
        raise CorruptModel(f"{path}.sizes", "expected a list of integers")
    if not isinstance(activations, list) or len(activations) != len(sizes):
        raise CorruptModel(f"{path}.activations", "expected one activation per layer")
    if not isinstance(weights, list) or len(weights) != len(sizes) - 1:
        raise CorruptModel(f"{path}.weights", "expected one matrix per connection layer")
    if not isinstance(biases, list) or len(biases) != len(sizes) - 1:
        raise CorruptModel(f"{path}.biases", "expected one vector per connection layer")
    try:
        layers = [LayerSpec(size, activation) for size, activation in zip(sizes, activations)]
    except FileprintError as e:
        raise CorruptModel(f"{path}.activations", str(e)) from e
    w = [_array(m, f"{path}.weights[{i}]", 2) for i, m in enumerate(weights)]
    b = [_array(v, f"{path}.biases[{i}]", 1) for i, v in enumerate(biases)]
    try:
        return MlpNetwork(layers, w, b)
    except FileprintError as e:
        raise CorruptModel(f"{path}.weights", str(e)) from e


def standardizer_from_doc(doc, path: str, n_features: int) -> Standardizer:
    mean = _array(_get(doc, "mean", f"{path}.mean"), f"{path}.mean", 1)
    std = _array(_get(doc, "std", f"{path}.std"), f"{path}.std", 1)
    degenerate = _get(doc, "degenerate", f"{path}.degenerate")
    if mean.shape != (n_features,) or std.shape != (n_features,):
        raise CorruptModel(path, f"expected {n_features} features")
    if (std <= 0).any():
        raise CorruptModel(f"{path}.std", "standard deviations must be positive")
    if not isinstance(degenerate, list) or not all(isinstance(i, int) and 0 <= i < n_features for i in degenerate):
        raise CorruptModel(f"{path}.degenerate", "expected feature indices")
    return Standardizer(mean, std, tuple(degenerate))


def _read_document(source: Union[str, Path, BinaryIO, bytes]) -> dict:
    if isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    elif isinstance(source, (str, Path)):
        raw = Path(source).read_bytes()
    else:
        raw = source.read()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorruptModel("<document>", f"not a JSON document ({e})") from e
    if not isinstance(doc, dict):
        raise CorruptModel("<document>", "expected an object")
    return doc


def load_model(source: Union[str, Path, BinaryIO, bytes]) -> FileprintModel:
    """Parse a model document and check it against its own dimensions.

    Raises:
        VersionMismatch: for any format_version other than the current one.
        CorruptModel: naming the first offending field path.
    """
    doc = _read_document(source)
    version = _get(doc, "format_version", "format_version")
    if not isinstance(version, int) or isinstance(version, bool):
        raise CorruptModel("format_version", "expected an integer")
    if version != MODEL_FORMAT_VERSION:
        raise VersionMismatch(f"Model format version {version} is not supported (expected {MODEL_FORMAT_VERSION})")

    labels = _get(doc, "labels", "labels")
    if not isinstance(labels, list) or not labels or not all(isinstance(l, str) and l for l in labels):
        raise CorruptModel("labels", "expected a non-empty list of non-empty strings")
    if len(set(labels)) != len(labels):
        raise CorruptModel("labels", "duplicate class labels")

    try:
        config = PipelineConfig.model_validate(_get(doc, "config", "config"))
    except ValidationError as e:
        raise CorruptModel("config", str(e).splitlines()[0]) from e

    pca_doc = _get(doc, "pca", "pca")
    mean = _array(_get(pca_doc, "mean", "pca.mean"), "pca.mean", 1)
    basis = _array(_get(pca_doc, "basis", "pca.basis"), "pca.basis", 2)
    eigenvalues = _array(_get(pca_doc, "eigenvalues", "pca.eigenvalues"), "pca.eigenvalues", 1)
    if mean.shape != (BFD_BINS,):
        raise CorruptModel("pca.mean", f"expected {BFD_BINS} entries, got {mean.shape[0]}")
    if eigenvalues.shape != (BFD_BINS,):
        raise CorruptModel("pca.eigenvalues", f"expected {BFD_BINS} entries, got {eigenvalues.shape[0]}")
    if _get(pca_doc, "k", "pca.k") != basis.shape[0]:
        raise CorruptModel("pca.k", "does not match the number of basis rows")
    try:
        pca = PcaModel(mean, basis, eigenvalues)
    except FileprintError as e:
        raise CorruptModel("pca.basis", str(e)) from e

    standardizer = standardizer_from_doc(_get(doc, "standardizer", "standardizer"), "standardizer", pca.k)

    encoder = network_from_doc(_get(doc, "aann_encoder", "aann_encoder"), "aann_encoder")
    classifier = network_from_doc(_get(doc, "classifier", "classifier"), "classifier")
    if encoder.input_size != pca.k:
        raise CorruptModel("aann_encoder.sizes", f"input size {encoder.input_size} != PCA dimension {pca.k}")
    bottleneck_standardizer = standardizer_from_doc(
        _get(doc, "bottleneck_standardizer", "bottleneck_standardizer"), "bottleneck_standardizer", encoder.output_size
    )
    if classifier.input_size != encoder.output_size:
        raise CorruptModel("classifier.sizes", f"input size {classifier.input_size} != bottleneck size {encoder.output_size}")
    if classifier.output_size != len(labels):
        raise CorruptModel("classifier.sizes", f"output size {classifier.output_size} != {len(labels)} labels")

    return FileprintModel(
        format_version=version,
        labels=tuple(labels),
        pca=pca,
        standardizer=standardizer,
        aann_encoder=encoder,
        bottleneck_standardizer=bottleneck_standardizer,
        classifier=classifier,
        config=config,
    )
