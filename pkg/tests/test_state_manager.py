"""
Unit tests for the TrialState class.
"""

from unittest.mock import MagicMock

from ripslab.state_manager import TrialState


def test_state_initialization():
    """Test default initial state values."""
    state = TrialState()
    assert state.cell == {}
    assert state.seed is None
    assert state.cloud is None
    assert state.graph is None
    assert state.record is None
    assert state.outputs == {}
    assert state.stage_sequence == []
    assert state.failed_stages == {}
    assert state.skipped_stages == []
    assert state.last_error is None


def test_update_from_successful_stage():
    state = TrialState()
    cloud = MagicMock(n=4)
    state.update_from_stage_result("sample", {
        "cloud": cloud,
        "values": {"n": 4},
        "metadata": {"success": True, "elapsed_ms": 1.5},
    })

    assert state.cloud is cloud
    assert state.outputs["sample"] == {"n": 4}
    assert state.runtimes_ms["sample"] == 1.5
    assert state.succeeded("sample")


def test_update_from_failed_stage():
    state = TrialState()
    state.update_from_stage_result("graph", {
        "values": {},
        "metadata": {"success": False, "error": "GeometryError: r must be > 0"},
    })

    assert state.graph is None
    assert state.failed_stages == {"graph": "GeometryError: r must be > 0"}
    assert state.last_error == "GeometryError: r must be > 0"
    assert not state.succeeded("graph")
    assert state.stage_sequence == ["graph"]


def test_update_from_skipped_stage():
    state = TrialState()
    state.update_from_stage_result("dismantle", {
        "values": {},
        "metadata": {"success": False, "skipped": True, "error": "needs graph"},
    })
    assert state.skipped_stages == ["dismantle"]
    assert state.failed_stages == {}
    assert state.stage_sequence == ["dismantle"]


def test_update_with_non_dict_result():
    state = TrialState()
    state.update_from_stage_result("betti", "not a dict")
    assert "betti" in state.failed_stages
    assert state.last_error == "Stage betti returned non-dict result."


def test_validate_state():
    state = TrialState()
    is_valid, errors = state.validate_state()
    assert is_valid
    assert errors == []

    state.cloud = MagicMock(n=5)
    state.graph = MagicMock(n=4)
    state.runtimes_ms = {"graph": -1.0}
    is_valid, errors = state.validate_state()
    assert not is_valid
    assert len(errors) == 2


def test_snapshot_is_small():
    state = TrialState(cell={"n": 5}, seed=9)
    state.stage_sequence = ["sample"]
    snap = state.snapshot()
    assert snap == {"cell": {"n": 5}, "seed": 9, "stages": ["sample"], "failed": [], "skipped": []}
