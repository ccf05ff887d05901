"""Tests for config loading."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from wiki_genre_signals.config import PipelineConfig, load_config
from wiki_genre_signals.constants import DEFAULT_UNION_NAME
from wiki_genre_signals.dump_ingest import Compression


def _write_config(tmp_path: Path, data: dict, dump: bool = True) -> Path:
    """Helper to write a config.json and create the referenced dump files."""
    if dump:
        dump_path = tmp_path / "articles.xml"
        dump_path.write_text("<mediawiki/>", encoding="utf-8")
        data.setdefault("articles_dump", str(dump_path))

    config_file = tmp_path / "config.json"
    config_file.write_text(json.dumps(data), encoding="utf-8")
    return config_file


def _valid_data() -> dict:
    """Return a valid config dict (paths are added by _write_config)."""
    return {
        "projects": [
            {
                "set_name": "Fantasy",
                "banner_templates": ["WikiProject Novels"],
                "required_param": {"key": "fantasy-task-force"},
            },
            {"set_name": "Science Fiction", "banner_templates": ["WikiProject Science Fiction"]},
        ],
        "top_k": 15,
        "workers": 2,
    }


def test_load_valid_config(tmp_path: Path) -> None:
    config_file = _write_config(tmp_path, _valid_data())
    config = load_config(config_file)

    assert isinstance(config, PipelineConfig)
    assert [spec.set_name for spec in config.projects] == ["Fantasy", "Science Fiction"]
    assert config.projects[0].banner_templates == frozenset({"WikiProject Novels"})
    assert config.projects[0].required_param is not None
    assert config.projects[0].required_param.key == "fantasy-task-force"
    assert config.top_k_for("lead_link") == 15
    assert config.workers == 2
    assert config.strict is True
    assert config.union_name == DEFAULT_UNION_NAME
    assert config.properties == ("P31",)
    assert config.talk_dump == config.articles_dump


def test_load_config_missing_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError, match="Configuration file not found"):
        load_config(tmp_path / "nonexistent.json")


def test_load_config_missing_field(tmp_path: Path) -> None:
    config_file = _write_config(tmp_path, _valid_data(), dump=False)

    with pytest.raises(ValueError, match="Required config field missing: articles_dump"):
        load_config(config_file)


def test_load_config_missing_dump(tmp_path: Path) -> None:
    data = _valid_data()
    data["articles_dump"] = str(tmp_path / "nonexistent.xml.bz2")
    config_file = _write_config(tmp_path, data, dump=False)

    with pytest.raises(FileNotFoundError, match="Dump file not found"):
        load_config(config_file)


def test_load_config_missing_wikidata_dump(tmp_path: Path) -> None:
    data = _valid_data()
    data["wikidata_dump"] = "missing.json.bz2"
    config_file = _write_config(tmp_path, data)

    with pytest.raises(FileNotFoundError, match="missing.json.bz2"):
        load_config(config_file)


def test_load_config_relative_paths(tmp_path: Path) -> None:
    """Relative paths in config resolve relative to the config file location."""
    dumps = tmp_path / "dumps"
    dumps.mkdir()
    (dumps / "pages.xml.bz2").write_bytes(b"")
    (dumps / "index.txt.bz2").write_bytes(b"")
    (dumps / "wikidata.json.gz").write_bytes(b"")
    subdir = tmp_path / "subdir"
    subdir.mkdir()

    data = {
        "articles_dump": "../dumps/pages.xml.bz2",
        "articles_index": "../dumps/index.txt.bz2",
        "wikidata_dump": "../dumps/wikidata.json.gz",
        "output_dir": "../out",
    }
    config_file = subdir / "config.json"
    config_file.write_text(json.dumps(data), encoding="utf-8")

    config = load_config(config_file)

    assert config.articles_dump.path == (dumps / "pages.xml.bz2").resolve()
    assert config.articles_dump.compression is Compression.BZ2_MULTISTREAM
    assert config.articles_dump.index_path == (dumps / "index.txt.bz2").resolve()
    assert config.wikidata_dump == (dumps / "wikidata.json.gz").resolve()
    assert config.output_dir == (tmp_path / "out").resolve()


def test_load_config_default_projects(tmp_path: Path) -> None:
    config_file = _write_config(tmp_path, {})
    config = load_config(config_file)

    names = [spec.set_name for spec in config.projects]
    assert names == ["Fantasy", "Science Fiction", "Science Fiction Novels"]
    assert config.top_k_for("category") == 20


def test_load_config_empty_projects_allowed(tmp_path: Path) -> None:
    config_file = _write_config(tmp_path, {"projects": []})

    assert load_config(config_file).projects == ()


def test_load_config_top_k_per_kind(tmp_path: Path) -> None:
    config_file = _write_config(tmp_path, {"top_k": {"category": 25}})
    config = load_config(config_file)

    assert config.top_k_for("category") == 25
    assert config.top_k_for("p31") == 20


@pytest.mark.parametrize("value", [0, -3, "ten", {"p31": 0}, True])
def test_load_config_invalid_top_k(tmp_path: Path, value: object) -> None:
    config_file = _write_config(tmp_path, {"top_k": value})

    with pytest.raises(ValueError, match="Invalid config value for top_k"):
        load_config(config_file)


def test_load_config_invalid_workers(tmp_path: Path) -> None:
    config_file = _write_config(tmp_path, {"workers": 0})

    with pytest.raises(ValueError, match="Invalid config value for workers"):
        load_config(config_file)


def test_load_config_project_without_banners(tmp_path: Path) -> None:
    config_file = _write_config(
        tmp_path, {"projects": [{"set_name": "Fantasy", "banner_templates": []}]}
    )

    with pytest.raises(ValueError, match="Invalid project spec #1"):
        load_config(config_file)


def test_load_config_project_without_name(tmp_path: Path) -> None:
    config_file = _write_config(tmp_path, {"projects": [{"banner_templates": ["WPSF"]}]})

    with pytest.raises(ValueError, match="missing set_name"):
        load_config(config_file)


def test_load_config_duplicate_set_names(tmp_path: Path) -> None:
    project = {"set_name": "Fantasy", "banner_templates": ["WPSF"]}
    config_file = _write_config(tmp_path, {"projects": [project, project]})

    with pytest.raises(ValueError, match="set names must be unique"):
        load_config(config_file)


def test_load_config_invalid_property(tmp_path: Path) -> None:
    config_file = _write_config(tmp_path, {"properties": ["P31", "instance of"]})

    with pytest.raises(ValueError, match="not a property id"):
        load_config(config_file)


def test_load_config_index_requires_bz2(tmp_path: Path) -> None:
    (tmp_path / "index.txt").write_text("", encoding="utf-8")
    config_file = _write_config(tmp_path, {"articles_index": "index.txt"})

    with pytest.raises(ValueError, match="articles_index"):
        load_config(config_file)


def test_load_config_accepted_values_normalized(tmp_path: Path) -> None:
    project = {
        "set_name": "Fantasy",
        "banner_templates": ["template:WikiProject_Novels"],
        "required_param": {"key": "Fantasy-Task-Force", "accepted_values": [" YES "]},
    }
    config_file = _write_config(tmp_path, {"projects": [project]})
    spec = load_config(config_file).projects[0]

    assert spec.banner_templates == frozenset({"WikiProject Novels"})
    assert spec.required_param is not None
    assert spec.required_param.key == "fantasy-task-force"
    assert spec.required_param.accepted_values == frozenset({"yes"})


def test_load_config_namespace_aliases(tmp_path: Path) -> None:
    config_file = _write_config(
        tmp_path, {"namespace_aliases": {"CAT": 14}, "interwiki_prefixes": ["XX"]}
    )
    config = load_config(config_file)

    assert config.namespaces["cat"] == 14
    assert "xx" in config.interwiki_prefixes
