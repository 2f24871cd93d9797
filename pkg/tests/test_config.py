"""
Tests for the lab configuration file and the settings read from it.
"""

import json

import pytest

from ripslab.config import get_setting, load_lab_config, reload_config
from ripslab.domains import DensitySpec, make_domain, sample
from ripslab.errors import SamplingError
from ripslab.geometry import w_membership


@pytest.fixture
def lab_config(tmp_path, monkeypatch):
    """Point $RIPSLAB_CONFIG at a temporary file and drop the cache around the test."""
    path = tmp_path / "lab.json"

    def write(values):
        path.write_text(json.dumps(values))
        monkeypatch.setenv("RIPSLAB_CONFIG", str(path))
        reload_config()
        return path

    yield write
    monkeypatch.delenv("RIPSLAB_CONFIG", raising=False)
    reload_config()


def test_file_values_override_defaults(lab_config):
    path = lab_config({"cover": {"epsilon": 0.1}})
    merged = load_lab_config(str(path))
    assert merged["cover"]["epsilon"] == 0.1
    assert merged["cover"]["face_budget"] == 1_000_000
    assert get_setting("cover", "epsilon") == 0.1


def test_unknown_setting_and_missing_file(tmp_path):
    with pytest.raises(KeyError, match="geometry.nonsense"):
        get_setting("geometry", "nonsense")
    with pytest.raises(FileNotFoundError):
        load_lab_config(str(tmp_path / "absent.json"))


def test_malformed_section_is_rejected(tmp_path):
    path = tmp_path / "lab.json"
    path.write_text(json.dumps({"geometry": 4096}))
    with pytest.raises(ValueError, match="geometry"):
        load_lab_config(str(path))


def test_configured_geometry_setting_reaches_membership(lab_config):
    lab_config({"geometry": {"probes": 7}})
    result = w_membership((0, 0), (1.5, 0), 1.0, (1 / 15, 0))
    assert result.contained
    assert result.probes_used == 7
    # an explicit count still wins
    assert w_membership((0, 0), (1.5, 0), 1.0, (1 / 15, 0), probes=11).probes_used == 11


def test_configured_sampling_limits_reach_the_sampler(lab_config):
    disk = make_domain("ball", 2)
    density = DensitySpec.uniform(disk)
    assert sample(disk, density, 50, seed=0).n == 50

    # the disk fills about 79% of its bounding box
    lab_config({"domains": {"sample_batch": 100_000, "min_acceptance": 0.9}})
    with pytest.raises(SamplingError):
        sample(disk, density, 100_000, seed=0)
