"""End-to-end command-line runs against files on disk."""

import json

import pytest

from conftest import VERBATIM_AUTONOMOUS_CONFIG
from wfdsim.cli import main


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "scenario.ini"
    path.write_text(VERBATIM_AUTONOMOUS_CONFIG, encoding="utf-8")
    return path


def test_run_writes_trace_and_metrics(tmp_path, config_file, capsys):
    trace = tmp_path / "run.trace"
    metrics = tmp_path / "run.metrics"
    status = main(["run", "--config", str(config_file), "--seed", "15",
                   "--until", "8s", "--trace", str(trace),
                   "--metrics", str(metrics)])
    assert status == 0
    assert trace.exists() and metrics.exists()
    assert (tmp_path / "run.metrics.json").exists()
    assert trace.read_text().splitlines()[0].startswith("#")
    payload = json.loads((tmp_path / "run.metrics.json").read_text())
    assert payload["schema_version"] == 1
    flat = metrics.read_text()
    assert "formation_time = " in flat
    out = capsys.readouterr()
    assert "seed 15" in out.out
    assert "numPingApps" in out.err  # parser warning surfaces on stderr


def test_run_is_reproducible_on_disk(tmp_path, config_file):
    paths = []
    for name in ("a", "b"):
        trace = tmp_path / f"{name}.trace"
        metrics = tmp_path / f"{name}.metrics"
        assert main(["run", "--config", str(config_file), "--seed", "15",
                     "--until", "8s", "--trace", str(trace),
                     "--metrics", str(metrics)]) == 0
        paths.append((trace, metrics))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


def test_validate_accepts_own_trace(tmp_path, config_file, capsys):
    trace = tmp_path / "run.trace"
    main(["run", "--config", str(config_file), "--seed", "15",
          "--until", "8s", "--trace", str(trace)])
    assert main(["validate", "--trace", str(trace)]) == 0
    assert "trace ok" in capsys.readouterr().out


def test_validate_flags_corrupted_trace(tmp_path, config_file, capsys):
    trace = tmp_path / "run.trace"
    main(["run", "--config", str(config_file), "--seed", "15",
          "--until", "8s", "--trace", str(trace)])
    lines = trace.read_text().splitlines()
    ack_id = next(l.split("\t")[0] for l in lines if l.endswith("\tACK"))
    mutated = [l for l in lines if not l.startswith(ack_id + "\t")]
    trace.write_text("\n".join(mutated) + "\n", encoding="utf-8")
    assert main(["validate", "--trace", str(trace)]) == 1
    assert "ack-pairing" in capsys.readouterr().out


def test_sweep_prints_statistics(tmp_path, capsys):
    out = tmp_path / "sweep.json"
    status = main(["sweep", "--seeds", "20", "--out", str(out)])
    assert status == 0
    printed = capsys.readouterr().out
    assert "mean:" in printed
    payload = json.loads(out.read_text())
    assert payload["seeds"] == 20
    assert 1.5 <= payload["mean_s"] <= 3.5


def test_bad_config_is_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("**.host[0].wlan[0].mgmt.WiFiDirectGO = maybe\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_trace_file_is_exit_2(tmp_path):
    assert main(["validate", "--trace", str(tmp_path / "nope.trace")]) == 2
