"""Tests for the end-to-end fileprint pipeline."""

import numpy as np
import pytest
from conftest import make_toy_corpus, small_config

from bfd_fileprint import synth
from bfd_fileprint.config import PipelineConfig, TrainingConfig
from bfd_fileprint.errors import (
    EmptyCorpus,
    EmptyInput,
    InsufficientFiles,
    InsufficientSamples,
    OutOfRange,
    UnknownLabel,
)
from bfd_fileprint.fileprint import (
    aann_layers,
    classifier_layers,
    classify,
    corpus_matrix,
    evaluate,
    extract_features,
    feature_stack,
    fit_feature_stack,
    fit_pipeline,
    fit_standardizer,
    split,
)
from bfd_fileprint.mappings import DEFAULT_TEST_PER_CLASS, DEFAULT_TRAIN_PER_CLASS
from bfd_fileprint.models import FileRef, LabeledCorpus
from bfd_fileprint.writer import model_to_bytes


def numbered_corpus(counts: dict[str, int]) -> LabeledCorpus:
    corpus = LabeledCorpus()
    for label, n in counts.items():
        corpus.classes[label] = [FileRef.from_bytes(f"{label}/f{i:03d}.bin", bytes([i % 256])) for i in range(n)]
    return corpus


class TestSplit:
    def test_sizes_and_disjointness(self):
        corpus = numbered_corpus({"a": 120, "b": 120})
        train, test = split(corpus, 90, 30, seed=1)
        for label in ("a", "b"):
            train_paths = {r.path for r in train.classes[label]}
            test_paths = {r.path for r in test.classes[label]}
            assert len(train_paths) == 90
            assert len(test_paths) == 30
            assert not train_paths & test_paths
            assert train_paths | test_paths == {r.path for r in corpus.classes[label]}

    def test_deterministic(self):
        corpus = numbered_corpus({"a": 40, "b": 40})
        first, _ = split(corpus, 10, 5, seed=7)
        second, _ = split(corpus, 10, 5, seed=7)
        other, _ = split(corpus, 10, 5, seed=8)
        assert first.classes == second.classes
        assert first.classes != other.classes

    def test_input_order_does_not_matter(self):
        corpus = numbered_corpus({"a": 40, "b": 40})
        reversed_corpus = LabeledCorpus({label: files[::-1] for label, files in corpus.classes.items()})
        assert split(corpus, 10, 5, seed=2)[0].classes == split(reversed_corpus, 10, 5, seed=2)[0].classes

    def test_insufficient_files_names_class(self):
        corpus = numbered_corpus({"big": 120, "small": 119})
        with pytest.raises(InsufficientFiles, match="small"):
            split(corpus, 90, 30, seed=0)

    def test_empty_training_side(self):
        train, test = split(numbered_corpus({"a": 30}), 0, 30, seed=0)
        assert train.classes["a"] == []
        assert len(test.classes["a"]) == 30

    def test_negative_sizes(self):
        with pytest.raises(OutOfRange):
            split(numbered_corpus({"a": 3}), -1, 1, seed=0)


class TestStandardizer:
    def test_constant_feature_flagged(self):
        z = np.array([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]])
        standardizer = fit_standardizer(z)
        assert standardizer.degenerate == (1,)
        assert standardizer.std[1] == 1.0
        out = standardizer.apply(z)
        assert np.allclose(out[:, 0].std(), 1.0)
        assert np.array_equal(out[:, 1], np.zeros(3))

    def test_shared_scale_keeps_variance_ranking(self):
        z = np.array([[-2.0, 1.0, 0.5, 3.0], [2.0, -1.0, -0.5, 3.0]])
        standardizer = fit_standardizer(z, "shared")
        assert np.array_equal(standardizer.std, [2.0, 2.0, 2.0, 2.0])
        assert standardizer.degenerate == (3,)
        out = standardizer.apply(z)
        assert np.allclose(out.std(axis=0), [1.0, 0.5, 0.25, 0.0])

    def test_unknown_scaling(self):
        with pytest.raises(OutOfRange):
            fit_standardizer(np.ones((3, 2)), "whiten")


class TestLayerShapes:
    def test_default_aann(self):
        layers = aann_layers(PipelineConfig())
        assert [l.size for l in layers] == [60, 40, 15, 40, 60]
        assert [l.activation for l in layers[1:]] == ["tanh", "linear", "tanh", "linear"]

    def test_default_classifier(self):
        layers = classifier_layers(PipelineConfig(), 6)
        assert [l.size for l in layers] == [15, 25, 6]
        assert layers[-1].activation == "logistic"

    def test_default_feature_stack_dimensions(self):
        corpus = synth.synth_corpus(None, files_per_class=3, size_range=(2048, 4096), seed=1)
        config = PipelineConfig(aann_training=TrainingConfig(learning_rate=0.0005, max_epochs=1))
        stack, summary = fit_feature_stack(corpus, config)
        assert stack.pca.basis.shape == (60, 256)
        assert [l.size for l in stack.encoder.layers] == [60, 40, 15]
        x, _ = corpus_matrix(corpus)
        assert stack.transform(x).shape == (18, 15)
        assert summary.n_samples == 18


class TestToyPipeline:
    def test_training_accuracy(self, toy_trained):
        _, summary = toy_trained
        assert summary.training_accuracy == 1.0
        assert summary.classifier_report.final_mse <= summary.classifier_report.initial_mse

    def test_classifies_new_files(self, toy_model):
        assert classify(toy_model, b"\x00" * 5000).label == "zeros"
        assert classify(toy_model, b"\xff" * 3).label == "ones"

    def test_model_dimensions(self, toy_model):
        assert toy_model.labels == ("ones", "zeros")
        assert toy_model.pca.d == 256
        assert toy_model.pca.k == 8
        assert toy_model.n_features == 3
        assert toy_model.classifier.output_size == 2

    def test_constant_pca_features_flagged(self, toy_trained):
        model, summary = toy_trained
        # two point masses span a single direction
        assert len(model.standardizer.degenerate) == 7
        assert summary.degenerate_features == model.standardizer.degenerate

    def test_per_feature_scaling(self):
        model, summary = fit_pipeline(make_toy_corpus(), small_config(feature_scaling="per-feature"))
        assert summary.training_accuracy == 1.0
        assert all(model.standardizer.std[i] == 1.0 for i in model.standardizer.degenerate)

    def test_scores_cover_all_labels(self, toy_model):
        prediction = classify(toy_model, b"\x00\x00")
        assert [label for label, _ in prediction.scores] == ["ones", "zeros"]
        assert prediction.score == max(score for _, score in prediction.scores)

    def test_deterministic(self, toy_model):
        again, _ = fit_pipeline(make_toy_corpus(), small_config())
        assert model_to_bytes(again) == model_to_bytes(toy_model)

    def test_empty_input(self, toy_model):
        with pytest.raises(EmptyInput):
            classify(toy_model, b"")

    def test_perfect_evaluation(self, toy_model):
        cm, accuracy = evaluate(toy_model, make_toy_corpus(3))
        assert accuracy == 1.0
        assert cm.column_sums() == {"ones": 3, "zeros": 3}

    def test_error_budget_sets_n1(self):
        model, summary = fit_pipeline(make_toy_corpus(), small_config(), pca_error_budget=1.0)
        # budget met at k=1, raised to n2 + 1
        assert model.pca.k == 4
        assert model.config.n1 == 4
        assert summary.n1 == 4

    def test_single_class_rejected(self):
        corpus = make_toy_corpus()
        del corpus.classes["ones"]
        with pytest.raises(InsufficientSamples):
            fit_pipeline(corpus, small_config())

    def test_one_file_class_rejected(self):
        corpus = make_toy_corpus()
        corpus.classes["ones"] = corpus.classes["ones"][:1]
        with pytest.raises(InsufficientSamples, match="ones"):
            fit_pipeline(corpus, small_config())


class TestEvaluateErrors:
    def test_empty_test_corpus(self, toy_model):
        with pytest.raises(EmptyCorpus):
            evaluate(toy_model, LabeledCorpus())

    def test_unknown_label(self, toy_model):
        corpus = make_toy_corpus(2)
        corpus.classes["mystery"] = [FileRef.from_bytes("mystery/a.bin", b"\x01")]
        with pytest.raises(UnknownLabel, match="mystery"):
            evaluate(toy_model, corpus)


class TestSyntheticPipeline:
    def test_training_accuracy(self, synth_trained):
        _, summary = synth_trained
        assert summary.training_accuracy >= 0.9

    def test_held_out_accuracy(self, synth_model, synth_split):
        _, test = synth_split
        cm, accuracy = evaluate(synth_model, test)
        assert cm.total == 24
        assert set(cm.column_sums().values()) == {4}
        assert accuracy >= 0.85

    def test_feature_dimension(self, synth_model):
        data = synth.uniform_random(np.random.default_rng(0), 3000)
        assert extract_features(synth_model, data).shape == (6,)

    def test_pca_coordinates_share_one_scale(self, synth_model):
        std = synth_model.standardizer.std
        assert np.all(std == std[0])
        assert std[0] == pytest.approx(np.sqrt(synth_model.pca.eigenvalues[0]), rel=1e-8)

    def test_classifier_inputs_are_standardized(self, synth_model, synth_split):
        train, _ = synth_split
        x, _ = corpus_matrix(train)
        features = feature_stack(synth_model).transform(x)
        assert np.allclose(features.mean(axis=0), 0.0, atol=1e-9)
        assert np.allclose(features.std(axis=0), 1.0, atol=1e-9)

    def test_byte_order_is_irrelevant(self, synth_model, synth_split):
        _, test = synth_split
        rng = np.random.default_rng(3)
        for _, ref in test.items():
            data = np.frombuffer(ref.read_bytes(), dtype=np.uint8)
            expected = classify(synth_model, data.tobytes())
            for _ in range(5):
                shuffled = rng.permutation(data).tobytes()
                assert np.array_equal(extract_features(synth_model, data.tobytes()), extract_features(synth_model, shuffled))
                assert classify(synth_model, shuffled) == expected

    def test_small_header_change_keeps_label(self, synth_model):
        data = synth.ascii_text(np.random.default_rng(8), 1 << 20)
        assert classify(synth_model, data).label == classify(synth_model, b"%PDF" + data[4:]).label


@pytest.mark.slow
class TestDefaultConfiguration:
    """Six built-in classes, 120 files each, split 90/30, default dimensions."""

    @pytest.fixture(scope="class")
    def trained(self):
        corpus = synth.synth_corpus(None, files_per_class=120, seed=7)
        train, test = split(corpus, DEFAULT_TRAIN_PER_CLASS, DEFAULT_TEST_PER_CLASS, seed=7)
        model, summary = fit_pipeline(train, PipelineConfig(seed=7))
        return model, summary, test

    def test_default_dimensions(self, trained):
        model, _, _ = trained
        assert model.pca.k == 60
        assert model.n_features == 15
        assert model.classifier.layers[1].size == 25

    def test_aann_learns(self, trained):
        _, summary, _ = trained
        assert summary.aann_report.final_mse < summary.aann_report.initial_mse

    def test_held_out_accuracy(self, trained):
        model, _, test = trained
        cm, accuracy = evaluate(model, test)
        assert cm.total == 180
        assert accuracy >= 0.95
