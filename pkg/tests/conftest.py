"""Shared fixtures.

The expensive artifacts (trained forensics model, the full variant x seed
alert matrix) are built once per session and shared between the unit tests
and the acceptance suite.
"""

import time

import pytest

from sentinel import evalkit, siem, simkit

SEEDS = tuple(evalkit.DEFAULT_SEEDS)
VARIANTS = ("lsc", "ce", "eg", "eg-pt")


@pytest.fixture(scope="session")
def pretrained_model():
    return evalkit.train_default_model()


@pytest.fixture(scope="session")
def sim_results():
    """seed -> SimResult for the default 10-seed experiment."""
    cfg = simkit.default_config()
    return {seed: simkit.run_simulation(cfg, seed) for seed in SEEDS}


@pytest.fixture(scope="session")
def experiment_matrix(pretrained_model, sim_results):
    """(variant, seed) -> (alerts, report); plus the wall time it took.

    This is the default-config variant x seed matrix behind the qualitative
    replication checks. Alerts are kept (not just reports) so gate audits
    can inspect evidence.
    """
    cfg = simkit.default_config()
    cells = {}
    t0 = time.monotonic()
    for seed in SEEDS:
        sim = sim_results[seed]
        malicious = [t.actor_id for t in sim.truths if t.malicious]
        for name in VARIANTS:
            variant = siem.variant_config(name)
            model = pretrained_model if variant.pretrained_model else None
            alerts = siem.run_detection(
                sim.events, sim.roster, malicious, variant, seed,
                cfg.total_steps, cfg.warmup_steps, model=model)
            report = evalkit.score_run(name, seed, 4.0, alerts, sim.truths,
                                       cfg.warmup_steps)
            cells[(name, seed)] = (alerts, report)
    return {"cells": cells, "elapsed": time.monotonic() - t0}


@pytest.fixture(scope="session")
def lsc_sweep(sim_results):
    """(theta, seed) -> report for the LSC threshold sweep, plus wall time."""
    cfg = simkit.default_config()
    cells = {}
    t0 = time.monotonic()
    for theta in evalkit.SWEEP_THETAS:
        for seed in SEEDS:
            sim = sim_results[seed]
            malicious = [t.actor_id for t in sim.truths if t.malicious]
            variant = siem.variant_config("lsc", theta_base=theta)
            alerts = siem.run_detection(
                sim.events, sim.roster, malicious, variant, seed,
                cfg.total_steps, cfg.warmup_steps)
            cells[(theta, seed)] = evalkit.score_run(
                "lsc", seed, theta, alerts, sim.truths, cfg.warmup_steps)
    return {"cells": cells, "elapsed": time.monotonic() - t0}
