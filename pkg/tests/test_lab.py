"""
Tests for sweep configuration, trial execution, thresholds and result emission.
"""

import json
import math
from unittest.mock import MagicMock, patch

import pytest

from ripslab.errors import ComplexBudgetError, ConfigError, LabIOError, ThresholdError
from ripslab.lab import (Cell, TrialResult, emit, estimate_threshold, load_results, load_sweep_config,
                         radius_for, run_sweep, run_trial, summarize, trial_seed)
from ripslab.lab_config import CSV_COLUMNS


@pytest.fixture
def small_config():
    return load_sweep_config({
        "n_values": [60], "c_values": [1.5, 3.0], "dims": [2], "trials": 2,
        "checks": ["pursuit", "coverage", "dismantle", "betti"], "base_seed": 11, "workers": 1,
    })


def synthetic_results(ps_by_c, trials=10, n=500, d=2):
    results = []
    for index, (c, p) in enumerate(sorted(ps_by_c.items())):
        hits = round(p * trials)
        for t in range(trials):
            results.append(TrialResult(cell={"n": n, "c": c, "d": d, "domain": "box"}, cell_index=index,
                                       trial_index=t, seed=t, r=radius_for(c, n, d),
                                       dismantlable=t < hits))
    return results


def test_radius_for():
    assert radius_for(2.0, 100, 2) == pytest.approx(2.0 * math.sqrt(math.log(100) / 100))
    assert radius_for(1.0, 1000, 3) == pytest.approx((math.log(1000) / 1000) ** (1 / 3))


def test_trial_seed_is_deterministic_and_distinct():
    assert trial_seed(1, 2, 3) == trial_seed(1, 2, 3)
    seeds = {trial_seed(1, cell, t) for cell in range(5) for t in range(5)}
    assert len(seeds) == 25


def test_config_defaults_and_canonical_check_order(small_config):
    assert small_config.checks == ["dismantle", "betti", "coverage", "pursuit"]
    assert small_config.domain.kind == "box"
    assert small_config.dim_cap_for(2) == 3
    cells = small_config.cells()
    assert [(c.index, c.c) for c in cells] == [(0, 1.5), (1, 3.0)]


@pytest.mark.parametrize("values,match", [
    ({"trials": 0}, "trials"),
    ({"c_values": [1.0, -2.0]}, "c must be > 0"),
    ({"n_values": [1]}, "n must be >= 2"),
    ({"checks": ["pursuit"]}, "needs the dismantle check"),
    ({"checks": ["homotopy"]}, "unknown checks"),
    ({"domain": {"kind": "torus"}}, "unknown domain kind"),
    ({"density": {"kind": "bounded-ratio", "ratio": 0.5}}, "ratio"),
    ({"robber": "teleporting"}, "robber"),
    ({"bogus": 1}, "bogus"),
    ({"n_values": [50], "c_values": [10.0]}, "allow_large_radius"),
])
def test_invalid_configs(values, match):
    with pytest.raises(ConfigError, match=match):
        load_sweep_config(values)


def test_polytope_fixes_dimension():
    triangle = {"kind": "polytope", "params": {"A": [[-1, 0], [0, -1], [1, 1]], "b": [0, 0, 1]}}
    assert load_sweep_config({"domain": triangle, "dims": [2]}).domain.fixed_dim == 2
    with pytest.raises(ConfigError, match="2-dimensional"):
        load_sweep_config({"domain": triangle, "dims": [3]})


def test_run_trial_is_reproducible(small_config):
    cell = small_config.cells()[1]
    first = run_trial(cell, 0, small_config)
    again = run_trial(cell, 0, small_config)
    assert first.fingerprint() == again.fingerprint()
    assert first.seed == trial_seed(11, 1, 0)
    assert not first.errors
    assert set(first.runtimes_ms) == {"sample", "graph", "dismantle", "betti", "coverage", "pursuit"}
    if first.dismantlable:
        assert first.point_like
        assert first.pursuit["captured"]
    else:
        assert first.pursuit == {"captured": None, "turns": None}


def test_complete_graph_regime_is_always_dismantlable():
    config = load_sweep_config({"n_values": [50], "c_values": [6.0], "trials": 3, "allow_large_radius": True,
                                "checks": ["dismantle", "betti", "nerve"]})
    results = run_sweep(config)
    assert len(results) == 3
    for res in results:
        assert res.r >= math.sqrt(2)
        assert res.dismantlable
        assert res.point_like
        assert res.nerve["condition_a"] and res.nerve["condition_b"] and res.nerve["condition_c"]


def test_frequencies_rise_with_c():
    config = load_sweep_config({"n_values": [60], "c_values": [0.3, 1.0, 6.0], "trials": 6,
                                "allow_large_radius": True, "checks": ["dismantle", "coverage"]})
    table = summarize(run_sweep(config))
    assert list(table["c"]) == [0.3, 1.0, 6.0]
    for column in ("p_dismantlable", "p_covered"):
        ps = list(table[column])
        assert ps == sorted(ps)
        assert ps[0] == 0.0
        assert ps[-1] == 1.0


def test_sweep_is_independent_of_worker_count(small_config):
    serial = run_sweep(small_config)
    parallel = run_sweep(small_config.model_copy(update={"workers": 2}))
    assert [r.fingerprint() for r in serial] == [r.fingerprint() for r in parallel]
    assert [(r.cell_index, r.trial_index) for r in serial] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_sweep_streams_json_lines(tmp_path, small_config):
    stream = tmp_path / "runs" / "stream.jsonl"
    results = run_sweep(small_config.model_copy(update={"stream_path": str(stream)}))
    lines = stream.read_text().splitlines()
    assert len(lines) == len(results)
    loaded = sorted(load_results(str(stream)), key=lambda r: (r.cell_index, r.trial_index))
    assert [r.fingerprint() for r in loaded] == [r.fingerprint() for r in results]


def test_failing_stage_is_isolated(small_config):
    broken = MagicMock(side_effect=ComplexBudgetError("over budget", [5, 10]))
    with patch("ripslab.lab._stage_betti", broken):
        results = run_sweep(small_config)
    assert len(results) == 4
    for res in results:
        assert "ComplexBudgetError" in res.errors["betti"]
        assert res.betti is None
        assert res.dismantlable is not None
        assert res.covered is not None
    assert broken.call_count == 4


def test_inconsistent_trial_state_is_reported(small_config):
    stray_graph = {"graph": MagicMock(n=3), "values": {"edges": 0}}
    config = small_config.model_copy(update={"checks": ["coverage"]})
    with patch("ripslab.lab._stage_graph", MagicMock(return_value=stray_graph)):
        result = run_trial(config.cells()[0], 0, config)
    assert "graph has 3 vertices" in result.errors["state"]
    assert result.covered is not None


def test_emit_empty_results_is_header_only():
    assert emit([], "csv") == ",".join(CSV_COLUMNS) + "\n"
    assert json.loads(emit([], "json")) == []


def test_emit_one_trial(tmp_path, small_config):
    result = run_trial(small_config.cells()[0], 0, small_config)
    text = emit([result], "csv")
    header, row = text.splitlines()
    assert header.split(",") == CSV_COLUMNS
    fields = dict(zip(CSV_COLUMNS, row.split(",")))
    for column in ("n", "c", "d", "domain", "seed", "dismantlable", "covered", "b0", "b1", "truncated"):
        assert fields[column] != ""
    assert fields["n"] == "60"

    path = tmp_path / "out.csv"
    emit([result], "csv", str(path))
    first = path.read_bytes()
    emit([result], "csv", str(path))
    assert path.read_bytes() == first

    data = json.loads(emit([result], "json"))
    assert data[0]["seed"] == result.seed
    assert data[0]["cell"] == {"n": 60, "c": 1.5, "d": 2, "domain": "box"}


def test_emit_errors(tmp_path):
    with pytest.raises(ConfigError):
        emit([], "xml")
    with pytest.raises(LabIOError) as info:
        emit([], "csv", str(tmp_path))
    assert info.value.path == str(tmp_path)


def test_results_round_trip_through_files(tmp_path):
    results = synthetic_results({1.0: 0.0, 2.0: 0.5, 3.0: 1.0}, trials=4)
    json_path = tmp_path / "results.json"
    emit(results, "json", str(json_path))
    assert [r.fingerprint() for r in load_results(str(json_path))] == [r.fingerprint() for r in results]

    csv_path = tmp_path / "results.csv"
    emit(results, "csv", str(csv_path))
    loaded = load_results(str(csv_path))
    assert [r.dismantlable for r in loaded] == [r.dismantlable for r in results]
    assert [r.cell["c"] for r in loaded] == [r.cell["c"] for r in results]


def test_load_results_errors(tmp_path):
    with pytest.raises(LabIOError):
        load_results(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    with pytest.raises(LabIOError):
        load_results(str(bad))


def test_threshold_on_step_function():
    grid = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]
    results = synthetic_results({c: (1.0 if c >= 3.0 else 0.0) for c in grid})
    estimates = estimate_threshold(results, 0.5, resamples=50)
    assert len(estimates) == 1
    est = estimates[0]
    assert (est.domain, est.d, est.n) == ("box", 2, 500)
    assert est.c_hat == pytest.approx(3.0, abs=0.5)
    assert est.ci[0] <= est.c_hat <= est.ci[1]
    assert est.observed[3.0] == 1.0
    assert est.to_dict()["observed"]["2.5"] == 0.0


def test_threshold_on_gradual_curve():
    results = synthetic_results({1.0: 0.0, 2.0: 0.2, 3.0: 0.5, 4.0: 0.8, 5.0: 1.0}, trials=20)
    est = estimate_threshold(results, 0.5, resamples=100, seed=3)[0]
    assert est.c_hat == pytest.approx(3.0, abs=0.25)
    assert est.ci[0] < est.ci[1]
    assert est.method in ("logistic", "interpolation")


def test_threshold_needs_bracketing():
    results = synthetic_results({1.0: 1.0, 2.0: 1.0, 3.0: 1.0})
    with pytest.raises(ThresholdError) as info:
        estimate_threshold(results, 0.5)
    assert info.value.observed == {("box", 2, 500): (1.0, 1.0)}
    with pytest.raises(ValueError):
        estimate_threshold(results, 1.5)
    with pytest.raises(ThresholdError):
        estimate_threshold(results, 0.5, key="covered")


def test_threshold_is_grouped_by_n():
    results = synthetic_results({1.0: 0.0, 3.0: 1.0}, n=500) + synthetic_results({2.0: 0.0, 4.0: 1.0}, n=2000)
    estimates = estimate_threshold(results, 0.5, resamples=10)
    assert [e.n for e in estimates] == [500, 2000]
    assert estimates[0].c_hat < estimates[1].c_hat


def test_summarize_frequencies():
    results = synthetic_results({1.0: 0.0, 2.0: 0.5}, trials=4)
    results[0].errors = {"betti": "ComplexBudgetError: over budget"}
    table = summarize(results)
    assert list(table["c"]) == [1.0, 2.0]
    assert list(table["trials"]) == [4, 4]
    assert list(table["failed"]) == [1, 0]
    assert table.loc[1, "p_dismantlable"] == 0.5
    assert table.loc[1, "se_dismantlable"] == pytest.approx(0.25)
    assert table.loc[0, "p_covered"] is None
    assert summarize([]).empty


def test_cell_radius():
    cell = Cell(index=0, n=100, c=2.0, d=2, domain="box")
    assert cell.r == radius_for(2.0, 100, 2)
    assert cell.to_dict() == {"n": 100, "c": 2.0, "d": 2, "domain": "box"}
