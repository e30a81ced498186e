"""CLI entry point for fileprint training, detection and evaluation."""

import sys
from contextlib import contextmanager
from pathlib import Path

import click
import pandas as pd
import yaml
from pydantic import ValidationError

from bfd_fileprint import fileprint, pca
from bfd_fileprint.config import PipelineConfig, load_config
from bfd_fileprint.errors import FileprintError
from bfd_fileprint.fileprint import TrainingSummary
from bfd_fileprint.formatter import format_error_line, format_evaluation, format_prediction_line
from bfd_fileprint.histogram import histogram_stream
from bfd_fileprint.mappings import (
    BFD_BINS,
    DEFAULT_SYNTH_SIZE_RANGE,
    DEFAULT_TEST_PER_CLASS,
    DEFAULT_TRAIN_PER_CLASS,
    EXIT_DATA_ERROR,
    EXIT_USAGE,
    SYNTH_CLASSES,
)
from bfd_fileprint.reader import load_corpus, load_model
from bfd_fileprint.synth import synth_corpus
from bfd_fileprint.validator import validate_corpus, validate_model, validate_training_corpus
from bfd_fileprint.writer import save_model, write_corpus, write_csv


class UsageFailure(click.UsageError):
    exit_code = EXIT_USAGE

    def __init__(self, message: str, ctx: click.Context | None = None):
        super().__init__(message, ctx or click.get_current_context(silent=True))


class _UsageExitCode:
    """Report every command-line usage problem with exit code 1."""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise


class FileprintCommand(_UsageExitCode, click.Command):
    pass


class FileprintGroup(_UsageExitCode, click.Group):
    command_class = FileprintCommand

    def resolve_command(self, ctx, args):
        try:
            return super().resolve_command(ctx, args)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise


@contextmanager
def _exit_on_error():
    """Turn library errors into an ERROR line and the mapped exit code."""
    try:
        yield
    except FileprintError as e:
        click.echo(f"ERROR: {e}", err=True)
        sys.exit(e.exit_code)
    except OSError as e:
        click.echo(f"ERROR: {e}", err=True)
        sys.exit(EXIT_DATA_ERROR)


def _require_dir(path: str, what: str = "Corpus directory") -> Path:
    root = Path(path)
    if not root.is_dir():
        raise UsageFailure(f"{what} '{path}' does not exist")
    return root


def pipeline_options(include_n2: bool = True):
    """Shared flags that build a PipelineConfig."""

    def decorator(f):
        options = [
            click.option("-c", "--config", "config_path", default=None, type=click.Path(dir_okay=False),
                         help="Pipeline config YAML file"),
            click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Seed for every random step (default 0)"),
            click.option("--n1", type=int, default=None, help="PCA retained dimension N1 (default 60)"),
            click.option("--aann-hidden", type=int, default=None, help="AANN layer 2/4 width (default 40)"),
            click.option("--classifier-hidden", type=int, default=None, help="Classifier hidden width (default 25)"),
            click.option("--aann-epochs", type=int, default=None, help="Override AANN max epochs"),
            click.option("--classifier-epochs", type=int, default=None, help="Override classifier max epochs"),
        ]
        if include_n2:
            options.append(click.option("--n2", type=int, default=None, help="Bottleneck size N2 (default 15)"))
        for option in reversed(options):
            f = option(f)
        return f

    return decorator


def _build_config(config_path=None, aann_epochs=None, classifier_epochs=None, **overrides) -> PipelineConfig:
    """Defaults < config file < explicit flags."""
    try:
        base = load_config(config_path).model_dump() if config_path else PipelineConfig().model_dump()
        for key, value in overrides.items():
            if value is not None:
                base[key] = value
        if aann_epochs is not None:
            base["aann_training"]["max_epochs"] = aann_epochs
        if classifier_epochs is not None:
            base["classifier_training"]["max_epochs"] = classifier_epochs
        return PipelineConfig(**base)
    except ValidationError as e:
        raise UsageFailure(f"Invalid configuration: {e}") from e
    except (OSError, yaml.YAMLError, TypeError) as e:
        raise UsageFailure(f"Cannot read config {config_path}: {e}") from e


def _report_summary(summary: TrainingSummary) -> None:
    click.echo(
        f"PCA: N1={summary.n1}, E_k={summary.pca_error:.6g} of E_0={summary.pca_total_error:.6g}", err=True
    )
    if summary.degenerate_features:
        click.echo(f"WARNING: {len(summary.degenerate_features)} constant PCA features", err=True)
    aann = summary.aann_report
    click.echo(
        f"AANN: {aann.epochs_run} epochs, final MSE {aann.final_mse:.6g} "
        f"(initial {aann.initial_mse:.6g}, {aann.perturbations_applied} perturbations)",
        err=True,
    )
    clf = summary.classifier_report
    if clf is not None:
        click.echo(
            f"Classifier: {clf.epochs_run} epochs, final MSE {clf.final_mse:.6g} "
            f"(initial {clf.initial_mse:.6g}, {clf.perturbations_applied} perturbations)",
            err=True,
        )
    if summary.training_accuracy is not None:
        click.echo(f"Training accuracy: {summary.training_accuracy:.4f}", err=True)


def _load_training_corpus(root: Path):
    corpus = load_corpus(root)
    check = validate_training_corpus(corpus)
    check.report()
    if not check.is_valid:
        sys.exit(EXIT_DATA_ERROR)
    click.echo(f"Loaded {corpus.total_files} files in {len(corpus.classes)} classes", err=True)
    return corpus


def _fit_and_save(corpus, config, pca_error_budget, model_out):
    model, summary = fileprint.fit_pipeline(corpus, config, pca_error_budget)
    _report_summary(summary)
    result = validate_model(model)
    result.report()
    if not result.is_valid:
        click.echo("Aborting due to model validation errors.", err=True)
        sys.exit(EXIT_DATA_ERROR)
    if model_out is not None:
        save_model(model, model_out)
        click.echo(f"Wrote {model_out}", err=True)
    return model


@click.group(cls=FileprintGroup)
def cli():
    """Content-based file type detection with PCA + auto-associative fileprints."""


@cli.command()
@click.option("--corpus", "corpus_root", required=True, help="Corpus root: one subdirectory per class")
@click.option("-o", "--out", "model_out", required=True, type=click.Path(dir_okay=False), help="Model file to write")
@click.option("--pca-error-budget", type=click.FloatRange(min=0), default=None,
              help="Pick the smallest N1 whose PCA truncation error is within this budget")
@pipeline_options()
def train(corpus_root, model_out, pca_error_budget, **flags):
    """Train a fileprint model on a labeled corpus."""
    config = _build_config(**flags)
    root = _require_dir(corpus_root)
    with _exit_on_error():
        corpus = _load_training_corpus(root)
        _fit_and_save(corpus, config, pca_error_budget, model_out)


@cli.command()
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.argument("files", nargs=-1, type=click.Path(dir_okay=False))
@click.option("--offset", type=click.IntRange(min=0), default=0, help="Classify the fragment starting at this byte")
@click.option("--length", type=click.IntRange(min=1), default=None, help="Fragment length in bytes (default: to end)")
def classify(model_path, files, offset, length):
    """Print <path>, detected type and score for each file."""
    with _exit_on_error():
        model = load_model(model_path)

    unreadable = 0
    for path in files:
        try:
            with open(path, "rb") as f:
                f.seek(offset)
                hist = histogram_stream(f, limit=length)
        except OSError:
            click.echo(format_error_line(path, "unreadable"))
            unreadable += 1
            continue
        if hist.total == 0:
            click.echo(format_error_line(path, "empty"))
            continue
        click.echo(format_prediction_line(path, fileprint.classify_histogram(model, hist)))

    if unreadable:
        click.echo(f"ERROR: {unreadable} files could not be read", err=True)
        sys.exit(EXIT_DATA_ERROR)


@cli.command()
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.argument("corpus_root")
@click.option("--csv", "as_csv", is_flag=True, help="Emit the confusion matrix as CSV")
def evaluate(model_path, corpus_root, as_csv):
    """Confusion matrix (rows predicted, columns actual) and accuracy."""
    root = _require_dir(corpus_root)
    with _exit_on_error():
        model = load_model(model_path)
        corpus = load_corpus(root)
        validate_corpus(corpus).report()
        cm, _ = fileprint.evaluate(model, corpus)
    click.echo(format_evaluation(cm, csv=as_csv), nl=False)


@cli.command("pca-curve")
@click.argument("corpus_root")
@click.option("--k-max", type=click.IntRange(1, BFD_BINS), default=BFD_BINS, help="Largest k to report")
@click.option("-o", "--out", default=None, type=click.Path(dir_okay=False), help="CSV file (default: stdout)")
def pca_curve(corpus_root, k_max, out):
    """PCA truncation error E_k for k = 1..k_max as CSV."""
    root = _require_dir(corpus_root)
    with _exit_on_error():
        corpus = load_corpus(root)
        validate_corpus(corpus).report()
        x, _ = fileprint.corpus_matrix(corpus)
        eigenvalues = pca.fit(x, 1).eigenvalues
    curve = pca.truncation_curve(eigenvalues)
    frame = pd.DataFrame({"k": range(1, k_max + 1), "E_k": curve[1 : k_max + 1]})
    write_csv(frame, out)
    click.echo(f"E_0={curve[0]:.6g} over {x.shape[0]} files", err=True)


@cli.command()
@click.argument("corpus_root")
@click.option("--dims", type=click.IntRange(2, 3), default=2, help="Bottleneck size: 2 or 3")
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False), help="CSV file to write")
@pipeline_options(include_n2=False)
def scatter(corpus_root, dims, out, **flags):
    """Retrain the feature stack with a 2/3-neuron bottleneck and export points."""
    config = _build_config(n2=dims, **flags)
    root = _require_dir(corpus_root)
    with _exit_on_error():
        corpus = _load_training_corpus(root)
        stack, summary = fileprint.fit_feature_stack(corpus, config)
        _report_summary(summary)
        x, labels = fileprint.corpus_matrix(corpus)
        points = stack.encode(x)
        frame = pd.DataFrame({"label": labels})
        for i in range(dims):
            frame[f"f{i + 1}"] = points[:, i]
        write_csv(frame, out)
    click.echo(f"Wrote {len(frame)} points to {out}", err=True)


@cli.command()
@click.argument("out_root", type=click.Path(file_okay=False))
@click.option("--files-per-class", type=click.IntRange(min=1), default=120, help="Files per class (default 120)")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, help="Generator seed")
@click.option("--min-size", type=click.IntRange(min=1), default=DEFAULT_SYNTH_SIZE_RANGE[0], help="Smallest file size in bytes")
@click.option("--max-size", type=click.IntRange(min=1), default=DEFAULT_SYNTH_SIZE_RANGE[1], help="Largest file size in bytes")
@click.option("--class", "classes", multiple=True, type=click.Choice(SYNTH_CLASSES),
              help="Restrict to these built-in classes (repeatable)")
def synth(out_root, files_per_class, seed, min_size, max_size, classes):
    """Write the built-in synthetic corpus in corpus layout."""
    if min_size > max_size:
        raise UsageFailure(f"--min-size {min_size} exceeds --max-size {max_size}")
    with _exit_on_error():
        corpus = synth_corpus(list(classes) or None, files_per_class, (min_size, max_size), seed)
        written = write_corpus(corpus, out_root)
    click.echo(f"Wrote {written} files in {len(corpus.classes)} classes to {out_root}", err=True)


@cli.command()
@click.argument("corpus_root")
@click.option("--train-per-class", type=click.IntRange(min=0), default=DEFAULT_TRAIN_PER_CLASS,
              help="Training files per class (default 90)")
@click.option("--test-per-class", type=click.IntRange(min=0), default=DEFAULT_TEST_PER_CLASS,
              help="Held-out files per class (default 30)")
@click.option("--model-out", default=None, type=click.Path(dir_okay=False), help="Also save the trained model")
@click.option("--csv", "as_csv", is_flag=True, help="Emit the confusion matrix as CSV")
@pipeline_options()
def experiment(corpus_root, train_per_class, test_per_class, model_out, as_csv, **flags):
    """Split, train on the first part, evaluate on the held-out part."""
    config = _build_config(**flags)
    root = _require_dir(corpus_root)
    with _exit_on_error():
        corpus = load_corpus(root)
        validate_corpus(corpus).report()
        train_set, test_set = fileprint.split(corpus, train_per_class, test_per_class, config.seed)
        click.echo(
            f"Split {len(corpus.classes)} classes: {train_per_class} train / {test_per_class} test per class", err=True
        )
        model = _fit_and_save(train_set, config, None, model_out)
        cm, _ = fileprint.evaluate(model, test_set)
    click.echo(format_evaluation(cm, csv=as_csv), nl=False)


@cli.command()
@click.argument("corpus_root")
@click.option("-o", "--out", default=None, type=click.Path(dir_okay=False), help="CSV file (default: stdout)")
def stats(corpus_root, out):
    """Per-class file counts and size ranges as CSV."""
    root = _require_dir(corpus_root)
    with _exit_on_error():
        corpus = load_corpus(root)
    validate_corpus(corpus).report()
    rows = []
    for label in corpus.labels:
        sizes = [ref.size for ref in corpus.classes[label]]
        rows.append({"label": label, "files": len(sizes), "min_bytes": min(sizes), "max_bytes": max(sizes)})
    write_csv(pd.DataFrame(rows, columns=["label", "files", "min_bytes", "max_bytes"]), out)


if __name__ == "__main__":
    cli()
