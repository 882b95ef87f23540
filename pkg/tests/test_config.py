"""Tests for configuration files."""

import json

import pytest

from pydaar.core.exceptions import ConfigError
from pydaar.io.config import load_config


def write(tmp_path, content):
    path = tmp_path / "config.json"
    path.write_text(content, encoding="utf-8")
    return path


def test_flat_object(tmp_path):
    path = write(tmp_path, json.dumps({"draws": 499, "on-infeasible": "upper"}))
    assert load_config(path) == {"draws": 499, "on_infeasible": "upper"}


def test_lists_joined(tmp_path):
    path = write(tmp_path, json.dumps({"methods": ["BS", "AR"], "beta_grid": [0, 0.5]}))
    assert load_config(path) == {"methods": "BS,AR", "beta_grid": "0,0.5"}


@pytest.mark.parametrize("content", ["[1, 2]", "{not json", json.dumps({"a": {"b": 1}})])
def test_invalid(tmp_path, content):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, content))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")
