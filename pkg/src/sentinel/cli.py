"""Command-line entry point.

Subcommands: simulate (event log + truth sidecar), forensics (train and
save the email classifier), detect (alerts + run report for one log), and
experiment (full variant x seed matrix plus the LSC theta sweep). A JSON
config file supplies defaults; flags win over config values. The config
path can also come from the SENTINEL_CONFIG environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import evalkit, forensics, siem, simkit
from .events import (parse_event_log, serialize_alert_log,
                     serialize_event_log, truth_from_dict, truth_to_dict)

ENV_CONFIG = "SENTINEL_CONFIG"

_CONFIG_KEYS = {
    "seed", "seeds", "variant", "theta_base", "out_dir",
    "total_steps", "warmup_steps", "mistake_prob", "power_report_every",
    "forensics_model", "n_ham", "n_spam", "train_seed",
}


class ConfigError(ValueError):
    pass


def load_config(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc.msg}")
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(doc) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return doc


def _sim_config(cfg: dict) -> simkit.SimConfig:
    sim = simkit.default_config()
    for key in ("total_steps", "warmup_steps", "mistake_prob",
                "power_report_every"):
        if key in cfg:
            setattr(sim, key, cfg[key])
    sim.validate()
    return sim


def _out_dir(args, cfg: dict) -> Path:
    out = Path(args.out or cfg.get("out_dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args, cfg: dict) -> int:
    sim_config = _sim_config(cfg)
    seed = args.seed if args.seed is not None else cfg.get("seed", 101)
    result = simkit.run_simulation(sim_config, seed)
    out = _out_dir(args, cfg)
    (out / "events.jsonl").write_bytes(serialize_event_log(result.events))
    sidecar = {
        "seed": seed,
        "total_steps": sim_config.total_steps,
        "warmup_steps": sim_config.warmup_steps,
        "actors": simkit.roster_to_dict(result.roster),
        "ground_truth": truth_to_dict(result.truths),
    }
    (out / "truth.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"wrote {len(result.events)} events for {len(result.roster)} actors "
          f"to {out}")
    return 0


def cmd_forensics(args, cfg: dict) -> int:
    seed = cfg.get("train_seed", evalkit.FORENSICS_TRAIN_SEED)
    corpus = forensics.generate_synthetic_corpus(
        seed, cfg.get("n_ham", 1700), cfg.get("n_spam", 300))
    model = forensics.train_classifier(corpus)
    out = _out_dir(args, cfg)
    path = out / "forensics_model.json"
    path.write_bytes(forensics.save_model(model))
    acc = model.accuracies[model.selected_family]
    print(f"trained {model.selected_family} model "
          f"(holdout accuracy {acc:.4f}) -> {path}")
    return 0


def cmd_detect(args, cfg: dict) -> int:
    events_path = Path(args.events)
    truth_path = Path(args.truth) if args.truth else \
        events_path.with_name("truth.json")
    if not events_path.exists():
        print(f"error: event log not found: {events_path}", file=sys.stderr)
        return 2
    if not truth_path.exists():
        print(f"error: truth sidecar not found: {truth_path}", file=sys.stderr)
        return 2
    events = parse_event_log(events_path.read_bytes())
    sidecar = json.loads(truth_path.read_text("utf-8"))
    roster = simkit.roster_from_dict(sidecar["actors"])
    truths = truth_from_dict(sidecar["ground_truth"])
    total = sidecar["total_steps"]
    warmup = sidecar["warmup_steps"]
    name = args.variant or cfg.get("variant", "eg")
    theta = args.theta_base if args.theta_base is not None else \
        cfg.get("theta_base", 4.0)
    variant = siem.variant_config(name, theta_base=theta)
    model = None
    if variant.pretrained_model:
        model_path = args.model or cfg.get("forensics_model")
        if model_path is None:
            print("error: variant eg-pt needs --model PATH", file=sys.stderr)
            return 1
        try:
            model = forensics.load_model(Path(model_path).read_bytes())
        except (OSError, forensics.ModelFormatError) as exc:
            print(f"error: cannot load model {model_path}: {exc}",
                  file=sys.stderr)
            return 2
    seed = args.seed if args.seed is not None else sidecar.get("seed", 101)
    alerts = siem.run_detection(
        events, roster, [t.actor_id for t in truths if t.malicious],
        variant, seed, total, warmup, model=model)
    report = evalkit.score_run(name, seed, theta, alerts, truths, warmup)
    out = _out_dir(args, cfg)
    (out / f"alerts_{name}.jsonl").write_bytes(serialize_alert_log(alerts))
    (out / f"report_{name}.json").write_text(
        json.dumps(_report_dict(report), indent=2, sort_keys=True) + "\n",
        "utf-8")
    print(f"{name}: {report.confirmed_alerts} confirmed alerts, "
          f"actor F1 {report.actor_f1:.3f}")
    return 0


def _report_dict(report: evalkit.RunReport) -> dict:
    doc = dict(report.__dict__)
    doc["seed"] = "mean" if report.seed == -1 else report.seed
    return doc


def cmd_experiment(args, cfg: dict) -> int:
    sim_config = _sim_config(cfg)
    seeds = cfg.get("seeds", list(evalkit.DEFAULT_SEEDS))
    if args.runs is not None:
        seeds = seeds[:args.runs]
        if len(seeds) < args.runs:
            seeds = list(seeds) + [max(seeds, default=100) + i + 1
                                   for i in range(args.runs - len(seeds))]
    variants = (args.variants.split(",") if args.variants
                else ["lsc", "ce", "eg", "eg-pt"])
    for v in variants:
        if v not in ("lsc", "ce", "eg", "eg-pt"):
            print(f"error: unknown variant {v!r}", file=sys.stderr)
            return 1
    matrix, sweep = evalkit.run_experiment(
        variants=variants, seeds=seeds, sim_config=sim_config,
        sweep=args.sweep)
    out = _out_dir(args, cfg)
    (out / "experiment.csv").write_text(evalkit.reports_to_csv(matrix), "utf-8")
    msg = f"wrote {out / 'experiment.csv'} ({len(matrix)} rows)"
    if sweep:
        (out / "sweep.csv").write_text(evalkit.reports_to_csv(sweep), "utf-8")
        msg += f" and {out / 'sweep.csv'} ({len(sweep)} rows)"
    print(msg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sentinel",
        description="Insider-threat simulation and SIEM correlation toolkit")
    parser.add_argument("--config", help="JSON config file "
                        f"(or ${ENV_CONFIG})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate an event log")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("forensics", help="train the email forensics model")
    p.add_argument("--out")
    p.set_defaults(func=cmd_forensics)

    p = sub.add_parser("detect", help="run one variant over an event log")
    p.add_argument("events", help="event JSONL path")
    p.add_argument("--truth", help="truth sidecar (default: truth.json "
                                   "next to the log)")
    p.add_argument("--variant", choices=["lsc", "ce", "eg", "eg-pt"])
    p.add_argument("--theta-base", type=float, dest="theta_base")
    p.add_argument("--model", help="forensics model for eg-pt")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("experiment", help="variant x seed matrix and sweep")
    p.add_argument("--runs", type=int, help="number of seeds to use")
    p.add_argument("--variants", help="comma-separated subset")
    p.add_argument("--sweep", action="store_true",
                   help="also run the LSC theta sweep")
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args, cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
