"""Metric oracles and report plumbing on small hand-built examples."""

import csv
import io

import pytest

from sentinel.events import Alert, Evidence, EvidenceKind, GroundTruth, Scenario
from sentinel.evalkit import (CSV_COLUMNS, actor_metrics, aggregate,
                              alert_metrics, f1_score, reports_to_csv,
                              score_run, ttd, ttd_by_scenario)

_EV = (Evidence(EvidenceKind.POLICY_VIOLATION, 2.0, 0),)


def _alert(actor, step, tier="confirmed"):
    return Alert(tier=tier, actor_id=actor, step=step, score=5.0,
                 evidence=_EV, tom_assisted=False)


TRUTHS = [
    GroundTruth("u001", False),
    GroundTruth("u002", False),
    GroundTruth("u040", True, Scenario.STEALTH, 70),
    GroundTruth("u041", True, Scenario.EMAIL_LEAKAGE, 80),
]


def test_f1_score_oracles():
    assert f1_score(0.0, 0.0) == 0.0
    assert f1_score(1.0, 1.0) == 1.0
    assert f1_score(0.5, 1.0) == pytest.approx(2 / 3)
    # reference operating points and their exact harmonic means
    assert f1_score(0.369, 0.888) == pytest.approx(0.521, abs=1e-3)
    assert f1_score(0.633, 1.000) == pytest.approx(1.266 / 1.633)
    assert f1_score(0.975, 0.875) == pytest.approx(0.922, abs=1e-3)
    assert f1_score(1.000, 0.875) == pytest.approx(0.933, abs=1e-3)


def test_actor_metrics_oracle():
    alerts = [_alert("u040", 75), _alert("u040", 76), _alert("u001", 90),
              _alert("u041", 50, tier="early")]
    p, r, f1 = actor_metrics(alerts, TRUTHS, warmup_steps=60)
    # detected actors: u040 (tp), u001 (fp); u041 missed (early only)
    assert p == pytest.approx(0.5)
    assert r == pytest.approx(0.5)
    assert f1 == pytest.approx(0.5)


def test_alert_metrics_oracle():
    alerts = [_alert("u040", 75), _alert("u001", 90),
              _alert("u040", 74, tier="early"), _alert("u002", 74, tier="early"),
              _alert("u002", 76, tier="early")]
    early_p, confirmed_p, fp = alert_metrics(alerts, TRUTHS)
    assert early_p == pytest.approx(1 / 3)
    assert confirmed_p == pytest.approx(0.5)
    assert fp == 1


def test_ttd_counts_first_confirmed_at_or_after_onset():
    alerts = [_alert("u040", 65),  # before onset: ignored
              _alert("u040", 77), _alert("u040", 99),
              _alert("u041", 83)]
    avg, worst = ttd(alerts, TRUTHS)
    assert avg == pytest.approx((7 + 3) / 2)
    assert worst == 7
    by_scenario = ttd_by_scenario(alerts, TRUTHS)
    assert by_scenario[Scenario.STEALTH] == 7
    assert by_scenario[Scenario.EMAIL_LEAKAGE] == 3
    assert ttd([], TRUTHS) == (None, None)


def test_score_run_drops_warmup_alerts():
    alerts = [_alert("u001", 10), _alert("u040", 75)]
    report = score_run("eg", 1, 4.0, alerts, TRUTHS, warmup_steps=60)
    assert report.actor_precision == 1.0
    assert report.confirmed_alerts == 1
    assert report.ttd_scenario == {"stealth": 5.0}


def test_aggregate_means_and_validation():
    r1 = score_run("eg", 1, 4.0, [_alert("u040", 75)], TRUTHS, 60)
    r2 = score_run("eg", 2, 4.0, [_alert("u040", 79), _alert("u041", 85)],
                   TRUTHS, 60)
    mean = aggregate([r1, r2])
    assert mean.seed == -1
    assert mean.actor_recall == pytest.approx((0.5 + 1.0) / 2)
    assert mean.ttd_avg == pytest.approx((5.0 + 7.0) / 2)
    # scenario means skip seeds where the scenario went undetected
    assert mean.ttd_scenario["email_leakage"] == pytest.approx(5.0)
    with pytest.raises(ValueError, match="nothing"):
        aggregate([])
    with pytest.raises(ValueError, match="mixed variants"):
        aggregate([r1, score_run("ce", 1, 4.0, [], TRUTHS, 60)])


def test_csv_shape_and_formatting():
    r1 = score_run("eg", 1, 4.0, [_alert("u040", 75)], TRUTHS, 60)
    text = reports_to_csv([r1, aggregate([r1])])
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == list(CSV_COLUMNS)
    assert len(rows) == 3
    assert rows[1][0] == "eg" and rows[1][1] == "1"
    assert rows[2][1] == "mean"
    assert rows[1][3] == "1.000000"  # floats carry six decimals
    assert rows[1][-1] == ""  # undetected scenario leaves the cell empty
