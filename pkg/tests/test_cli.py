"""End-to-end CLI runs in temporary directories."""

import json

import pytest

from sentinel.cli import main
from sentinel.events import parse_alert_log, parse_event_log

SMALL = {"total_steps": 110, "warmup_steps": 60, "seed": 7}


@pytest.fixture()
def small_config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(SMALL))
    return str(path)


@pytest.fixture()
def simulated(tmp_path, small_config):
    out = tmp_path / "sim"
    assert main(["--config", small_config, "simulate", "--out", str(out)]) == 0
    return out


def test_simulate_outputs(simulated, capsys):
    events = parse_event_log((simulated / "events.jsonl").read_bytes())
    assert events and all(e.step < SMALL["total_steps"] for e in events)
    sidecar = json.loads((simulated / "truth.json").read_text())
    assert sidecar["seed"] == 7
    assert len(sidecar["actors"]) == 42
    assert len(sidecar["ground_truth"]) == 42


def test_simulate_flag_overrides_config_seed(tmp_path, small_config):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["--config", small_config, "simulate", "--out", str(a)]) == 0
    assert main(["--config", small_config, "simulate", "--seed", "8",
                 "--out", str(b)]) == 0
    assert json.loads((b / "truth.json").read_text())["seed"] == 8
    assert (a / "events.jsonl").read_bytes() != (b / "events.jsonl").read_bytes()


def test_simulate_idempotent(tmp_path, small_config):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        assert main(["--config", small_config, "simulate",
                     "--out", str(out)]) == 0
    assert (a / "events.jsonl").read_bytes() == (b / "events.jsonl").read_bytes()
    assert (a / "truth.json").read_bytes() == (b / "truth.json").read_bytes()


def test_detect_on_simulated_log(simulated, tmp_path):
    out = tmp_path / "det"
    assert main(["detect", str(simulated / "events.jsonl"),
                 "--variant", "eg", "--out", str(out)]) == 0
    alerts = parse_alert_log((out / "alerts_eg.jsonl").read_bytes())
    report = json.loads((out / "report_eg.json").read_text())
    assert report["variant"] == "eg"
    assert report["confirmed_alerts"] == sum(
        1 for a in alerts
        if a.tier == "confirmed" and a.step >= SMALL["warmup_steps"])


def test_detect_missing_inputs(tmp_path):
    assert main(["detect", str(tmp_path / "missing.jsonl")]) == 2


def test_detect_eg_pt_requires_model(simulated):
    assert main(["detect", str(simulated / "events.jsonl"),
                 "--variant", "eg-pt"]) == 1


def test_forensics_then_eg_pt(simulated, tmp_path, small_config):
    fout = tmp_path / "model"
    cfg = tmp_path / "fcfg.json"
    cfg.write_text(json.dumps({"n_ham": 300, "n_spam": 80}))
    assert main(["--config", str(cfg), "forensics", "--out", str(fout)]) == 0
    model_path = fout / "forensics_model.json"
    assert model_path.exists()
    out = tmp_path / "det"
    assert main(["detect", str(simulated / "events.jsonl"),
                 "--variant", "eg-pt", "--model", str(model_path),
                 "--out", str(out)]) == 0
    assert (out / "report_eg-pt.json").exists()


def test_experiment_small(tmp_path, small_config):
    out = tmp_path / "exp"
    assert main(["--config", small_config, "experiment", "--runs", "2",
                 "--variants", "lsc", "--out", str(out)]) == 0
    lines = (out / "experiment.csv").read_text().splitlines()
    assert len(lines) == 4  # header, two seeds, mean row
    assert lines[0].startswith("variant,seed,theta_base")
    assert lines[-1].split(",")[1] == "mean"


def test_experiment_rejects_unknown_variant(tmp_path):
    assert main(["experiment", "--variants", "bogus",
                 "--out", str(tmp_path / "x")]) == 1


def test_config_errors(tmp_path):
    missing = str(tmp_path / "nope.json")
    assert main(["--config", missing, "simulate"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["--config", str(bad), "simulate"]) == 1
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"frobnicate": 1}))
    assert main(["--config", str(unknown), "simulate"]) == 1


def test_config_env_var(tmp_path, small_config, monkeypatch):
    monkeypatch.setenv("SENTINEL_CONFIG", small_config)
    out = tmp_path / "env"
    assert main(["simulate", "--out", str(out)]) == 0
    assert json.loads((out / "truth.json").read_text())["seed"] == 7


def test_invalid_runtime_config_exits_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"total_steps": 50, "warmup_steps": 60}))
    assert main(["--config", str(cfg), "simulate",
                 "--out", str(tmp_path / "o")]) == 2
