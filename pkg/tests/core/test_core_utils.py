import json

import pytest
from pydantic import ValidationError

from subgrain.core.utils import meta_line, read_artifact, read_jsonl, stable_hash, write_jsonl
from subgrain.exceptions import ArtifactMismatchError, InputNotFoundError


class TestStableHash:
    @staticmethod
    def test_key_order_ignored():
        assert stable_hash({"a": 1, "b": [1, 2]}) == stable_hash({"b": [1, 2], "a": 1})

    @staticmethod
    def test_length():
        assert len(stable_hash({"a": 1})) == 16

    @staticmethod
    def test_values_matter():
        assert stable_hash({"a": 1}) != stable_hash({"a": 2})


class TestMetaLine:
    @staticmethod
    def test_valid():
        assert json.loads(meta_line("corpus", "abc")) == {
            "_meta": {"artifact": "corpus", "config_hash": "abc"}
        }

    @staticmethod
    def test_invalid():
        with pytest.raises(ValidationError):
            meta_line(None, "abc")


class TestJsonl:
    @staticmethod
    def test_round_trip(tmp_path):
        path = tmp_path / "nested" / "rows.jsonl"
        write_jsonl(path, [{"b": 1, "a": "नाव"}, '{"c": 3}'], artifact="corpus", config_hash="h1")

        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[1] == '{"a": "नाव", "b": 1}'

        meta, rows = read_jsonl(path)
        assert meta == {"artifact": "corpus", "config_hash": "h1"}
        assert rows == [{"a": "नाव", "b": 1}, {"c": 3}]

    @staticmethod
    def test_without_meta(tmp_path):
        path = tmp_path / "rows.jsonl"
        write_jsonl(path, [{"a": 1}])

        assert read_jsonl(path) == (None, [{"a": 1}])

    @staticmethod
    def test_missing(tmp_path):
        with pytest.raises(InputNotFoundError):
            read_jsonl(tmp_path / "none.jsonl")


class TestReadArtifact:
    @pytest.fixture
    def path(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"idx": 1}], artifact="corpus", config_hash="h1")
        return path

    @staticmethod
    def test_match(path):
        assert read_artifact(path, "corpus", "h1") == [{"idx": 1}]

    @staticmethod
    @pytest.mark.parametrize("artifact, config_hash", [("timeline", "h1"), ("corpus", "h2")])
    def test_mismatch(path, artifact: str, config_hash: str):
        with pytest.raises(ArtifactMismatchError):
            read_artifact(path, artifact, config_hash)

    @staticmethod
    def test_unstamped(tmp_path):
        path = tmp_path / "rows.jsonl"
        write_jsonl(path, [{"idx": 1}])

        with pytest.raises(ArtifactMismatchError):
            read_artifact(path, "corpus", "h1")
