"""Tests for model documents, corpus materialization and CSV export."""

import json
from io import BytesIO

import numpy as np
import pandas as pd

from bfd_fileprint.fileprint import classify
from bfd_fileprint.reader import load_corpus, load_model
from bfd_fileprint.writer import MODEL_FIELDS, model_to_bytes, model_to_doc, save_model, write_corpus, write_csv
from conftest import make_toy_corpus


class TestModelDocument:
    def test_save_load_save_is_identical(self, toy_model, tmp_path):
        path = tmp_path / "model.json"
        save_model(toy_model, path)
        reloaded = load_model(path)
        assert model_to_bytes(reloaded) == path.read_bytes()

    def test_loaded_model_predicts_identically(self, synth_model):
        reloaded = load_model(model_to_bytes(synth_model))
        rng = np.random.default_rng(0)
        for _ in range(100):
            data = rng.integers(0, 256, size=int(rng.integers(1, 2000)), dtype=np.uint8).tobytes()
            assert classify(reloaded, data) == classify(synth_model, data)

    def test_one_field_per_line(self, toy_model):
        lines = model_to_bytes(toy_model).decode().splitlines()
        assert lines[0] == "{" and lines[-1] == "}"
        keys = [line.strip().split(":", 1)[0].strip('"') for line in lines[1:-1]]
        assert tuple(keys) == MODEL_FIELDS
        assert list(MODEL_FIELDS) == sorted(MODEL_FIELDS)

    def test_document_is_plain_json(self, toy_model):
        doc = json.loads(model_to_bytes(toy_model))
        assert doc["format_version"] == 2
        assert len(doc["bottleneck_standardizer"]["std"]) == 3
        assert doc["labels"] == ["ones", "zeros"]
        assert len(doc["pca"]["mean"]) == 256
        assert doc["pca"]["k"] == 8
        assert doc["classifier"]["sizes"] == [3, 8, 2]
        assert doc["config"]["n2"] == 3

    def test_reals_use_round_trip_precision(self, toy_model):
        text = model_to_bytes(toy_model).decode()
        doc = model_to_doc(toy_model)
        assert json.loads(text)["pca"]["eigenvalues"] == doc["pca"]["eigenvalues"]

    def test_save_to_binary_sink(self, toy_model):
        sink = BytesIO()
        save_model(toy_model, sink)
        assert sink.getvalue() == model_to_bytes(toy_model)


class TestWriteCorpus:
    def test_layout(self, tmp_path):
        written = write_corpus(make_toy_corpus(3), tmp_path)
        assert written == 6
        assert sorted(p.name for p in tmp_path.iterdir()) == ["ones", "zeros"]
        assert (tmp_path / "zeros" / "zeros_1.bin").read_bytes() == b"\x00" * 117

    def test_reloads_as_same_corpus(self, tmp_path):
        corpus = make_toy_corpus(4)
        write_corpus(corpus, tmp_path)
        loaded = load_corpus(tmp_path)
        assert loaded.labels == corpus.labels
        for (label_a, a), (label_b, b) in zip(loaded.items(), corpus.items()):
            assert label_a == label_b
            assert a.read_bytes() == b.read_bytes()


class TestWriteCsv:
    def test_to_file(self, tmp_path):
        out = tmp_path / "points.csv"
        write_csv(pd.DataFrame({"k": [1, 2], "E_k": [0.5, 0.0]}), out)
        assert out.read_text() == "k,E_k\n1,0.5\n2,0.0\n"

    def test_to_stdout(self, capsys):
        write_csv(pd.DataFrame({"label": ["a"], "files": [3]}))
        assert capsys.readouterr().out == "label,files\na,3\n"
