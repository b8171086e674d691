"""
Tests for result files: JSON envelopes, matrices, embeddings and partitions
"""

import json
import os

import numpy as np
import pandas as pd
import pytest

from arclust.analytics.core import DataError, DissimParams, Partition
from arclust.analytics.dissim import DissimMatrix, dissim_matrix, prepare_for_mds
from arclust.analytics.embed import classical_mds
from arclust.analytics.hier import linkage
from arclust.storage import (
    atomic_path,
    load_dissim_binary,
    load_dissim_csv,
    load_embedding_coords,
    load_partition,
    load_result_json,
    save_dendrogram,
    save_dissim_binary,
    save_dissim_csv,
    save_embedding,
    save_partition,
    save_result_json,
    save_table_csv,
)


@pytest.fixture
def shifted(small_signed):
    m = dissim_matrix(small_signed, DissimParams.delta3(3.0))
    return prepare_for_mds(m)


class TestJson:
    def test_envelope(self, tmp_path):
        path = save_result_json(
            str(tmp_path / "out" / "metrics.json"),
            "metrics",
            {"k": np.int64(3), "values": np.array([0.5, 1.0]), "ok": np.bool_(True)},
        )
        with open(path) as f:
            raw = json.load(f)
        assert raw["result_type"] == "metrics"
        assert "timestamp" not in raw
        assert load_result_json(path, "metrics") == {"k": 3, "values": [0.5, 1.0], "ok": True}

    def test_wrong_result_type(self, tmp_path):
        path = save_result_json(str(tmp_path / "a.json"), "tune", {})
        with pytest.raises(DataError, match="expected 'partition'"):
            load_result_json(path, "partition")

    def test_identical_runs_identical_bytes(self, tmp_path):
        first = save_result_json(str(tmp_path / "a.json"), "metrics", {"x": 0.1 + 0.2})
        second = save_result_json(str(tmp_path / "b.json"), "metrics", {"x": 0.1 + 0.2})
        with open(first, "rb") as f, open(second, "rb") as g:
            assert f.read() == g.read()


class TestDissimFiles:
    def test_csv_keeps_full_precision(self, tmp_path, shifted):
        path = save_dissim_csv(str(tmp_path / "d.csv"), shifted)
        loaded = load_dissim_csv(path)
        np.testing.assert_array_equal(loaded.values, shifted.values)
        assert loaded.ids == tuple(str(i) for i in range(shifted.n))

    def test_csv_with_ids(self, tmp_path):
        m = DissimMatrix(np.array([[0.0, 1.5], [1.5, 0.0]]), ids=("007", "x"))
        loaded = load_dissim_csv(save_dissim_csv(str(tmp_path / "d.csv"), m))
        assert loaded.ids == ("007", "x")

    def test_csv_mismatched_ids(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("id,a,b\na,0,1\nc,1,0\n")
        with pytest.raises(DataError, match="ids differ"):
            load_dissim_csv(str(path))

    def test_binary_is_bitwise(self, tmp_path, shifted):
        loaded = load_dissim_binary(save_dissim_binary(str(tmp_path / "d.ardm"), shifted))
        assert loaded.values.tobytes() == shifted.values.tobytes()
        assert loaded.shift_applied == shifted.shift_applied
        assert loaded.sqrt_applied is True

    def test_binary_keeps_delta1_diagonal(self, tmp_path, small_signed):
        params = DissimParams.delta1([[1.0]], [[2.0]])
        m = dissim_matrix(small_signed, params)
        loaded = load_dissim_binary(save_dissim_binary(str(tmp_path / "d1.ardm"), m))
        np.testing.assert_array_equal(np.diag(loaded.values), np.diag(m.values))

    def test_binary_layout_size(self, tmp_path, shifted):
        path = save_dissim_binary(str(tmp_path / "d.ardm"), shifted)
        n = shifted.n
        assert os.path.getsize(path) == 4 + 8 + 8 * n * (n + 1) // 2 + 8 + 1

    def test_binary_rejects_other_files(self, tmp_path):
        path = tmp_path / "junk.ardm"
        path.write_bytes(b"NOPE" + bytes(20))
        with pytest.raises(DataError, match="not a dissimilarity"):
            load_dissim_binary(str(path))

    def test_binary_rejects_truncation(self, tmp_path, shifted):
        path = save_dissim_binary(str(tmp_path / "d.ardm"), shifted)
        with open(path, "rb") as f:
            raw = f.read()
        with open(path, "wb") as f:
            f.write(raw[:-9])
        with pytest.raises(DataError, match="bytes"):
            load_dissim_binary(path)


def test_embedding_files(tmp_path, shifted):
    embedding = classical_mds(shifted, 2)
    path = save_embedding(str(tmp_path / "coords.csv"), embedding)
    ids, coords = load_embedding_coords(path)
    np.testing.assert_array_equal(coords, embedding.coords)
    assert ids == tuple(str(i) for i in range(shifted.n))
    meta = load_result_json(path + ".json", "embedding")
    assert meta["effective_dim"] == embedding.dim
    assert meta["negative_mass"] == embedding.negative_mass


def test_partition_file(tmp_path):
    partition = Partition.from_labels([2, 2, 0, 1], classes=np.eye(4)[:, :2] + 0.5)
    path = save_partition(str(tmp_path / "p.json"), partition, ("a", "b", "c", "d"), {"seed": 4})
    loaded, ids, data = load_partition(path)
    np.testing.assert_array_equal(loaded.labels, [0, 0, 1, 2])
    np.testing.assert_array_equal(loaded.proportions, partition.proportions)
    assert ids == ("a", "b", "c", "d")
    assert data["seed"] == 4


def test_dendrogram_files(tmp_path, small_signed):
    dendrogram = linkage(dissim_matrix(small_signed, DissimParams.delta3(0.0)), "average")
    path = save_dendrogram(str(tmp_path / "tree.json"), dendrogram)
    data = load_result_json(path, "dendrogram")
    assert data["n_leaves"] == 12
    np.testing.assert_array_equal(np.array(data["linkage"]), dendrogram.to_linkage_matrix())

    table = pd.read_csv(path + ".csv")
    assert list(table["step"]) == list(range(1, 12))
    assert table["size"].iloc[-1] == 12


def test_table_csv_precision(tmp_path):
    value = 1.0 / 3.0
    path = save_table_csv(str(tmp_path / "t.csv"), [{"a": value, "b": "x"}])
    frame = pd.read_csv(path, float_precision="round_trip")
    assert frame["a"].iloc[0] == value


def test_atomic_path_cleans_up_on_failure(tmp_path):
    target = tmp_path / "result.json"
    target.write_text("old")
    with pytest.raises(RuntimeError):
        with atomic_path(str(target)) as tmp:
            with open(tmp, "w") as f:
                f.write("partial")
            raise RuntimeError("interrupted")
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["result.json"]
