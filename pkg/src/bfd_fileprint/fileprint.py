"""Hierarchical fileprint pipeline: BFD -> PCA -> AANN bottleneck -> MLP.

Training fits the three stages in order on the pooled training corpus;
detection pushes a file's normalized BFD through the same stages. Only
the byte content enters; names and extensions never do.
"""

from dataclasses import dataclass

import numpy as np

from bfd_fileprint import mlp, pca
from bfd_fileprint.config import PipelineConfig
from bfd_fileprint.errors import (
    EmptyCorpus,
    EmptyInput,
    InsufficientFiles,
    InsufficientSamples,
    OutOfRange,
    UnknownLabel,
)
from bfd_fileprint.histogram import ByteHistogram, bfd_of, normalize
from bfd_fileprint.mappings import BFD_BINS, MODEL_FORMAT_VERSION
from bfd_fileprint.mlp import LayerSpec, MlpNetwork, TrainingReport
from bfd_fileprint.models import ConfusionMatrix, FileprintModel, LabeledCorpus, Prediction, Standardizer
from bfd_fileprint.pca import PcaModel
from bfd_fileprint.validator import validate_training_corpus

BOTTLENECK_LAYER = 2
DEGENERATE_STD_RTOL = 1e-10


@dataclass(frozen=True)
class FeatureStack:
    """The trained extraction stages, without the classifier."""

    pca: PcaModel
    standardizer: Standardizer
    encoder: MlpNetwork
    bottleneck_standardizer: Standardizer

    def encode(self, bfds: np.ndarray) -> np.ndarray:
        """Raw bottleneck activations."""
        return mlp.forward(self.encoder, self.standardizer.apply(pca.project(self.pca, bfds)))[-1]

    def transform(self, bfds: np.ndarray) -> np.ndarray:
        """Standardized bottleneck features, as the classifier sees them."""
        return self.bottleneck_standardizer.apply(self.encode(bfds))


@dataclass
class TrainingSummary:
    n_samples: int
    n1: int
    pca_error: float          # E_k at the retained dimension
    pca_total_error: float    # E_0
    degenerate_features: tuple[int, ...]
    aann_report: TrainingReport
    classifier_report: TrainingReport | None = None
    training_accuracy: float | None = None


def corpus_matrix(corpus: LabeledCorpus) -> tuple[np.ndarray, list[str]]:
    """Normalized BFD rows and their labels, in sorted label/path order."""
    rows = []
    labels = []
    for label, ref in corpus.items():
        try:
            rows.append(normalize(ref.histogram()).freq)
        except EmptyInput as e:
            raise EmptyInput(f"{ref.path}: {e}") from e
        labels.append(label)
    if not rows:
        return np.zeros((0, BFD_BINS)), labels
    return np.vstack(rows), labels


def split(
    corpus: LabeledCorpus,
    train_per_class: int,
    test_per_class: int,
    seed: int,
) -> tuple[LabeledCorpus, LabeledCorpus]:
    """Per class, shuffle the sorted file names and cut train/test prefixes."""
    if train_per_class < 0 or test_per_class < 0:
        raise OutOfRange(f"Split sizes must be non-negative, got {train_per_class}/{test_per_class}")
    need = train_per_class + test_per_class
    rng = np.random.default_rng(seed)
    train = LabeledCorpus()
    test = LabeledCorpus()
    for label in corpus.labels:
        files = sorted(corpus.classes[label], key=lambda r: (r.path.name, str(r.path)))
        if len(files) < need:
            raise InsufficientFiles(f"Class '{label}' has {len(files)} files, split needs {need}")
        shuffled = [files[i] for i in rng.permutation(len(files))]
        train.classes[label] = shuffled[:train_per_class]
        test.classes[label] = shuffled[train_per_class:need]
    return train, test


def _sub_seeds(seed: int) -> list[int]:
    """Independent seeds for sample order, AANN init and classifier init."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(3)]


def fit_standardizer(z: np.ndarray, scaling: str = "per-feature") -> Standardizer:
    """Column means plus per-feature or shared divisors.

    "per-feature" gives every column unit variance. "shared" divides all
    columns by the largest column std, so variances keep their ranking.
    Constant columns are flagged either way; per-feature they keep unit scale.
    """
    if scaling not in ("per-feature", "shared"):
        raise OutOfRange(f"Unknown feature scaling '{scaling}', expected 'per-feature' or 'shared'")
    mean = z.mean(axis=0)
    std = z.std(axis=0)
    largest = float(std.max()) if std.size else 0.0
    degenerate = np.flatnonzero((std == 0) | (std <= DEGENERATE_STD_RTOL * largest))
    if scaling == "shared":
        std = np.full_like(std, largest if largest > 0 else 1.0)
    else:
        std = std.copy()
        std[degenerate] = 1.0
    return Standardizer(mean, std, tuple(int(i) for i in degenerate))


def aann_layers(config: PipelineConfig) -> list[LayerSpec]:
    return [
        LayerSpec(config.n1),
        LayerSpec(config.aann_hidden, "tanh"),
        LayerSpec(config.n2, "linear"),
        LayerSpec(config.aann_hidden, "tanh"),
        LayerSpec(config.n1, "linear"),
    ]


def classifier_layers(config: PipelineConfig, n_classes: int) -> list[LayerSpec]:
    return [
        LayerSpec(config.n2),
        LayerSpec(config.classifier_hidden, "tanh"),
        LayerSpec(n_classes, "logistic"),
    ]


def _resolve_n1(config: PipelineConfig, eigenvalues: np.ndarray, budget: float | None) -> PipelineConfig:
    if budget is None:
        return config
    k = max(pca.select_k(eigenvalues, budget), config.n2 + 1)
    return PipelineConfig(**{**config.model_dump(), "n1": k})


def _fit_stack(
    x: np.ndarray,
    config: PipelineConfig,
    pca_error_budget: float | None,
) -> tuple[FeatureStack, TrainingSummary, PipelineConfig, np.ndarray]:
    order_seed, aann_seed, _ = _sub_seeds(config.seed)
    k_fit = BFD_BINS if pca_error_budget is not None else config.n1
    full = pca.fit(x, k_fit)
    config = _resolve_n1(config, full.eigenvalues, pca_error_budget)
    pca_model = PcaModel(full.mean, full.basis[: config.n1], full.eigenvalues)

    z = pca.project(pca_model, x)
    standardizer = fit_standardizer(z, config.feature_scaling)
    features = standardizer.apply(z)

    order = np.random.default_rng(order_seed).permutation(x.shape[0])
    aann = mlp.init_network(aann_layers(config), aann_seed)
    aann_report = mlp.train(aann, features[order], features[order], config.aann_training)
    encoder = mlp.truncate(aann, BOTTLENECK_LAYER)
    bottleneck_standardizer = fit_standardizer(mlp.forward(encoder, features)[-1])

    summary = TrainingSummary(
        n_samples=x.shape[0],
        n1=config.n1,
        pca_error=pca.truncation_error(pca_model.eigenvalues, config.n1),
        pca_total_error=pca.truncation_error(pca_model.eigenvalues, 0),
        degenerate_features=standardizer.degenerate,
        aann_report=aann_report,
    )
    return FeatureStack(pca_model, standardizer, encoder, bottleneck_standardizer), summary, config, order


def _check_training(train: LabeledCorpus) -> None:
    result = validate_training_corpus(train)
    if not result.is_valid:
        raise InsufficientSamples("; ".join(result.errors))


def fit_feature_stack(
    train: LabeledCorpus,
    config: PipelineConfig,
    pca_error_budget: float | None = None,
) -> tuple[FeatureStack, TrainingSummary]:
    """Fit PCA, standardizer and AANN encoder only (no classifier)."""
    _check_training(train)
    x, _ = corpus_matrix(train)
    stack, summary, _, _ = _fit_stack(x, config, pca_error_budget)
    return stack, summary


def fit_pipeline(
    train: LabeledCorpus,
    config: PipelineConfig,
    pca_error_budget: float | None = None,
) -> tuple[FileprintModel, TrainingSummary]:
    """Train the full stack and report per-stage results.

    Steps: normalized BFD per file; PCA with k = n1 over the pooled
    vectors; center and scale the projections; train the 5-layer AANN
    to reproduce them; encode to n2 features and standardize those;
    train the classifier on one-hot targets. Deterministic given
    config.seed.
    """
    _check_training(train)
    x, y = corpus_matrix(train)
    labels = train.labels
    stack, summary, config, order = _fit_stack(x, config, pca_error_budget)
    _, _, classifier_seed = _sub_seeds(config.seed)

    features = stack.transform(x)
    targets = np.zeros((len(y), len(labels)))
    targets[np.arange(len(y)), [labels.index(l) for l in y]] = 1.0

    classifier = mlp.init_network(classifier_layers(config, len(labels)), classifier_seed)
    summary.classifier_report = mlp.train(classifier, features[order], targets[order], config.classifier_training)

    predicted = np.argmax(mlp.forward(classifier, features)[-1], axis=1)
    summary.training_accuracy = float(np.mean(predicted == np.argmax(targets, axis=1)))

    model = FileprintModel(
        format_version=MODEL_FORMAT_VERSION,
        labels=tuple(labels),
        pca=stack.pca,
        standardizer=stack.standardizer,
        aann_encoder=stack.encoder,
        bottleneck_standardizer=stack.bottleneck_standardizer,
        classifier=classifier,
        config=config,
    )
    return model, summary


def train_model(train: LabeledCorpus, config: PipelineConfig, pca_error_budget: float | None = None) -> FileprintModel:
    model, _ = fit_pipeline(train, config, pca_error_budget)
    return model


def feature_stack(model: FileprintModel) -> FeatureStack:
    return FeatureStack(model.pca, model.standardizer, model.aann_encoder, model.bottleneck_standardizer)


def extract_features(model: FileprintModel, data: bytes) -> np.ndarray:
    """The n2-dimensional fileprint of one byte sequence."""
    return feature_stack(model).transform(bfd_of(data).freq)


def _prediction(labels: tuple[str, ...], scores: np.ndarray) -> Prediction:
    # argmax returns the first maximum: ties go to the lowest class index
    winner = int(np.argmax(scores))
    return Prediction(labels[winner], tuple(zip(labels, (float(s) for s in scores))))


def classify(model: FileprintModel, data: bytes) -> Prediction:
    """Detect the type of one byte sequence.

    Raises:
        EmptyInput: for zero-length data.
    """
    scores = mlp.forward(model.classifier, extract_features(model, data))[-1]
    return _prediction(model.labels, scores)


def classify_histogram(model: FileprintModel, hist: ByteHistogram) -> Prediction:
    """Detect the type from precomputed byte counts.

    Raises:
        EmptyInput: for a histogram of zero bytes.
    """
    scores = mlp.forward(model.classifier, feature_stack(model).transform(normalize(hist).freq))[-1]
    return _prediction(model.labels, scores)


def classify_bfds(model: FileprintModel, bfds: np.ndarray) -> list[Prediction]:
    scores = mlp.forward(model.classifier, feature_stack(model).transform(bfds))[-1]
    return [_prediction(model.labels, row) for row in np.atleast_2d(scores)]


def evaluate(model: FileprintModel, test: LabeledCorpus) -> tuple[ConfusionMatrix, float]:
    """Confusion matrix (rows predicted, columns actual) and accuracy."""
    if test.total_files == 0:
        raise EmptyCorpus("Test corpus has no files; accuracy is undefined")
    unknown = sorted(set(test.labels) - set(model.labels))
    if unknown:
        raise UnknownLabel(f"Test classes not known to the model: {', '.join(unknown)}")

    x, actual = corpus_matrix(test)
    cm = ConfusionMatrix.empty(model.labels)
    for prediction, label in zip(classify_bfds(model, x), actual):
        cm.record(prediction.label, label)
    return cm, cm.accuracy()
