"""
Tests for the command-line front end: outputs, option precedence and exit codes.
"""

import json

import pytest

from ripslab.cli import main
from ripslab.domains import read_cloud_csv
from ripslab.lab import TrialResult, emit, radius_for
from ripslab.proximity import read_edge_list


@pytest.fixture
def cloud_file(tmp_path):
    path = tmp_path / "cloud.csv"
    assert main(["sample", "--n", "40", "--seed", "3", "--out", str(path)]) == 0
    return path


def test_sample_to_file_is_deterministic(tmp_path, cloud_file):
    again = tmp_path / "again.csv"
    assert main(["sample", "--n", "40", "--seed", "3", "--out", str(again)]) == 0
    assert cloud_file.read_bytes() == again.read_bytes()
    cloud = read_cloud_csv(str(cloud_file))
    assert cloud.n == 40
    assert cloud.dim == 2


def test_sample_to_stdout(capsys):
    assert main(["sample", "--n", "5", "--dim", "3", "--domain", "ball"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "dim,3"
    assert len(lines) == 6


def test_graph_from_cloud_file(tmp_path, cloud_file):
    out = tmp_path / "edges.txt"
    assert main(["graph", "--cloud", str(cloud_file), "--r", "0.3", "--out", str(out)]) == 0
    graph = read_edge_list(str(out))
    assert graph.n == 40


def test_graph_needs_a_radius(cloud_file):
    assert main(["graph", "--cloud", str(cloud_file)]) == 2


def test_dismantle_with_certificate(capsys):
    assert main(["dismantle", "--n", "20", "--r", "2.0", "--certify"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["record"]["complete"]
    assert report["replay_ok"]
    assert report["certificate"]["verdict"] == "certified-contractible"


def test_betti_output(capsys):
    assert main(["betti", "--n", "30", "--c", "1.0", "--dim-cap", "2", "--no-reduce"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report["profile"]["betti"]) == {"0", "1"}
    assert report["profile"]["counts"]["0"] == 30


def test_explicit_zero_dim_cap_is_respected(capsys):
    assert main(["betti", "--n", "30", "--c", "1.0", "--dim-cap", "0", "--no-reduce"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["profile"]["betti"] == {}
    assert report["profile"]["counts"] == {"0": 30}

    # isolated points: the core is disconnected whatever the cap
    assert main(["dismantle", "--n", "20", "--r", "0.001", "--certify", "--dim-cap", "0"]) == 0
    certificate = json.loads(capsys.readouterr().out)["certificate"]
    assert certificate["verdict"] == "refuted"
    assert certificate["evidence"]["b0"] == certificate["evidence"]["core_size"] >= 2


def test_robber_aliases(capsys):
    for robber in ("greedy-distance-maximizing", "uniform-random"):
        assert main(["pursuit", "--n", "15", "--r", "2.0", "--robber", robber]) == 0
        assert json.loads(capsys.readouterr().out)["transcript"]["captured"]


def test_config_file_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("# sampling defaults\nn = 7\nseed = 5\ndomain = ball\n")
    assert main(["sample", "--config", str(config)]) == 0
    from_file = capsys.readouterr().out
    assert len(from_file.splitlines()) == 8

    assert main(["sample", "--config", str(config), "--n", "3"]) == 0
    overridden = capsys.readouterr().out.splitlines()
    assert len(overridden) == 4


def test_config_file_errors(tmp_path):
    unknown = tmp_path / "unknown.conf"
    unknown.write_text("trials = 3\n")
    assert main(["sample", "--config", str(unknown)]) == 2
    assert main(["sample", "--config", str(tmp_path / "missing.conf")]) == 2
    malformed = tmp_path / "malformed.conf"
    malformed.write_text("just words\n")
    assert main(["sample", "--config", str(malformed)]) == 2


def test_usage_errors_exit_with_2():
    assert main(["explode"]) == 2
    assert main(["sample", "--n", "many"]) == 2
    assert main(["sample", "--domain", "torus"]) == 2
    assert main(["sample", "--domain-params", "{oops"]) == 2
    assert main(["sample", "--log-level", "LOUD"]) == 2


def test_failed_invocations_exit_with_1(tmp_path):
    # isolated points: the graph is not cop-win
    assert main(["pursuit", "--n", "30", "--r", "0.01"]) == 1
    assert main(["graph", "--cloud", str(tmp_path / "missing.csv"), "--r", "0.2"]) == 1
    assert main(["sample", "--n", "0"]) == 1


def test_pursuit_on_copwin_graph(capsys):
    assert main(["pursuit", "--n", "25", "--r", "2.0", "--robber", "random", "--seed", "4"]) == 0
    transcript = json.loads(capsys.readouterr().out)["transcript"]
    assert transcript["captured"]
    assert transcript["turns"] <= 25


def test_sweep_and_threshold(tmp_path, capsys):
    results = tmp_path / "sweep.json"
    args = ["sweep", "--n", "40", "--c", "1.0", "6.0", "--trials", "2", "--checks", "dismantle",
            "--allow-large-radius", "--format", "json", "--out", str(results)]
    assert main(args) == 0
    data = json.loads(results.read_text())
    assert len(data) == 4
    assert all(item["dismantlable"] for item in data if item["cell"]["c"] == 6.0)

    assert main(["sweep", "--n", "40", "--c", "1.0", "--trials", "1", "--checks", "dismantle"]) == 0
    header = capsys.readouterr().out.splitlines()[0]
    assert header.startswith("n,c,d,domain,seed")


def test_threshold_on_recorded_results(tmp_path, capsys):
    results = []
    for index, c in enumerate([1.0, 2.0, 3.0, 4.0]):
        for t in range(4):
            results.append(TrialResult(cell={"n": 500, "c": c, "d": 2, "domain": "box"}, cell_index=index,
                                       trial_index=t, seed=t, r=radius_for(c, 500, 2), dismantlable=c >= 3.0))
    path = tmp_path / "results.json"
    emit(results, "json", str(path))

    assert main(["threshold", "--results", str(path), "--resamples", "10"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["key"] == "dismantlable"
    assert report["estimates"][0]["n"] == 500
    assert 2.0 <= report["estimates"][0]["c_hat"] <= 3.0
    assert [row["c"] for row in report["summary"]] == [1.0, 2.0, 3.0, 4.0]

    assert main(["threshold", "--results", str(path), "--format", "csv", "--resamples", "5"]) == 0
    assert capsys.readouterr().out.splitlines()[0].startswith("domain,d,n,c_hat")


def test_sweep_invalid_configuration():
    assert main(["sweep", "--n", "40", "--c", "1.0", "--trials", "0"]) == 2
    assert main(["sweep", "--n", "40"]) == 2
    assert main(["sweep", "--n", "40", "--c", "50"]) == 2


def test_threshold_without_bracketing(tmp_path):
    results = tmp_path / "sure.json"
    assert main(["sweep", "--n", "30", "--c", "6.0", "--trials", "2", "--checks", "dismantle",
                 "--allow-large-radius", "--format", "json", "--out", str(results)]) == 0
    assert main(["threshold", "--results", str(results)]) == 1
    assert main(["threshold"]) == 2
