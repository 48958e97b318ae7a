# test_flat_file_store
#
# test reading and writing the flat-file outputs

import json

import numpy as np
import pytest

from degradation_lab.errors import StoreError
from degradation_lab.schemas import ModelDocument, ScenarioConfig
from degradation_lab.store import config_hash
from tests.conftest import CONFIG_FOLDER


class TestObservations:
    def test_round_trip(self, store, observations):
        path = store.write_observations("obs.csv", observations)
        assert path.read_text().splitlines()[0] == "unit,time,level"
        data = store.read_observations(path)
        assert data.n_units == observations.n_units
        assert [(r.unit, r.time) for r in data.records] == [(r.unit, r.time) for r in observations.records]
        assert [r.level for r in data.records] == pytest.approx([r.level for r in observations.records])

    def test_missing_column(self, store, tmp_path):
        (tmp_path / "bad.csv").write_text("unit,time\n1,0.5\n")
        with pytest.raises(StoreError):
            store.read_observations("bad.csv")

    def test_missing_file(self, store):
        with pytest.raises(StoreError):
            store.read_observations("nowhere.csv")

    def test_invalid_rows(self, store, tmp_path):
        (tmp_path / "dup.csv").write_text("unit,time,level\n1,0.5,0.1\n1,0.5,0.2\n")
        with pytest.raises(StoreError):
            store.read_observations("dup.csv")


class TestOutputs:
    def test_paths_layout(self, store):
        paths = np.arange(2 * 3 * 4, dtype=float).reshape(2, 3, 4)
        path = store.write_paths("paths.csv", paths, [1, 2, 3], [0.5, 1.0, 1.5, 2.0])
        lines = path.read_text().splitlines()
        assert lines[0] == "path,unit,time,level"
        assert len(lines) == 1 + 24
        assert lines[5] == "0,2,0.5,4.0"

    def test_matrix_has_no_header(self, store):
        path = store.write_matrix("W.csv", [[1, 0], [0, 1]])
        assert path.read_text() == "1,0\n0,1\n"

    def test_reliability(self, store):
        path = store.write_reliability("r.csv", [1, 2], [10.0, 11.0], np.array([[0.9, 0.8], [0.7, 0.6]]))
        assert path.read_text().splitlines()[1:] == ["1,10.0,0.9", "1,11.0,0.8", "2,10.0,0.7", "2,11.0,0.6"]

    def test_model_document(self, store):
        document = store.read_document(CONFIG_FOLDER / "model.json", ModelDocument)
        store.write_document("model.json", document)
        assert store.read_document("model.json", ModelDocument) == document


class TestMetadata:
    def test_hash_ignores_workers(self):
        a = ScenarioConfig(units=3, c_initial=2, c_later=2, workers=1)
        b = ScenarioConfig(units=3, c_initial=2, c_later=2, workers=4)
        c = ScenarioConfig(units=3, c_initial=2, c_later=2, master_seed=7)
        assert config_hash(a) == config_hash(b)
        assert config_hash(a) != config_hash(c)

    def test_metadata_is_reproducible(self, store):
        config = ScenarioConfig(units=3, c_initial=2, c_later=2)
        first = json.loads(store.write_metadata("a.json", config, 5, command="experiment").read_text())
        second = json.loads(store.write_metadata("b.json", config, 5, command="experiment").read_text())
        assert first == second
        assert set(first) == {"config_hash", "seed", "versions", "command"}
        assert "numpy" in first["versions"]

    def test_truth_cache(self, store):
        assert store.read_truth("abc") is None
        curves = np.array([[0.9, 0.8, 0.7], [0.95, 0.9, 0.85]])
        store.write_truth("abc", [1, 2], [10.0, 10.5, 11.0], curves)
        assert np.allclose(store.read_truth("abc"), curves)
