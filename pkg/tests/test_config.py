import os

import pytest
import yaml

from penner_closed.config import Config

TEMPLATE = os.path.join(os.path.dirname(__file__), "..", "config.template.yaml")


def write(tmp_path, data):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


def test_defaults():
    config = Config.default()
    assert config.validate() == []
    assert config.verify.genus == 2
    assert config.verify.seed == 7
    assert config.verify.samples == 100
    assert config.lifting.residual_gate == 0.01
    assert config.numerics.factor_tolerance == 1e-12
    assert config.logging.file == ""


def test_load(tmp_path):
    path = write(tmp_path, {"verify": {"genus": 3, "workers": 1}, "logging": {"level": "DEBUG"}})
    config = Config.load(path)
    assert config.verify.genus == 3
    assert config.verify.workers == 1
    assert config.verify.seed == 7
    assert config.logging.level == "DEBUG"


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        Config.load(str(tmp_path / "absent.yaml"))


def test_empty_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("")
    with pytest.raises(ValueError):
        Config.load(str(path))


@pytest.mark.parametrize("section, key, value", [
    ("numerics", "loop_tolerance", 0),
    ("lifting", "initial_steps", 0),
    ("lifting", "max_step_angle", 2.0),
    ("lifting", "residual_gate", 0.5),
    ("lifting", "start_angles", []),
    ("sampler", "retry_budget", 0),
    ("sampler", "low", 3.0),
    ("verify", "genus", 1),
    ("verify", "samples", 0),
    ("verify", "workers", 0),
])
def test_invalid(section, key, value):
    errors = Config({section: {key: value}}).validate()
    assert len(errors) == 1
    assert section in errors[0]


def test_template_is_valid():
    config = Config.load(TEMPLATE)
    assert config.validate() == []
