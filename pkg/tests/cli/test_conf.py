from pathlib import Path

from subgrain.cli.conf.checks import subgrain_config_path


class TestSubgrainConfigPath:
    @staticmethod
    def test_found_in_cwd(tmp_path: Path, monkeypatch):
        config = tmp_path / "subgrain.config.json"
        config.write_text("{}")
        monkeypatch.chdir(tmp_path)

        assert subgrain_config_path() == config

    @staticmethod
    def test_found_in_parent(tmp_path: Path, monkeypatch):
        config = tmp_path / "subgrain.config.json"
        config.write_text("{}")
        nested = tmp_path / "one" / "two"
        nested.mkdir(parents=True)
        monkeypatch.chdir(nested)

        assert subgrain_config_path() == config

    @staticmethod
    def test_directory_with_config_name_ignored(tmp_path: Path, monkeypatch):
        (tmp_path / "subgrain.config.json").mkdir()
        monkeypatch.chdir(tmp_path)

        found = subgrain_config_path()
        assert found is None or tmp_path not in found.parents

    @staticmethod
    def test_not_found(tmp_path: Path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        found = subgrain_config_path()

        assert found is None or tmp_path not in found.parents
