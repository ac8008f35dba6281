"""Command line entry point: ``pandering {fig1,train,eval,sweep}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .agents import TrainingDiverged
from .config import load_config, parse_seeds
from .model import ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

log = logging.getLogger("pandering")


def _fig1(args, cfg):
    section = cfg["fig1"]
    grid = section.get("beta1_grid", [0.8, 0.85, 0.9, 0.95, 1.0])
    base = cfg["system"] if args.config else harness.fig1_config()
    rows = harness.run_fig1(grid, args.seeds, base, workers=args.workers)
    groups = {}
    for row in rows:
        groups.setdefault((row.system, row.beta1), []).append(row)
    rows += [harness.aggregate(g) for g in groups.values()]
    harness.write_csv(args.out, rows)


def _train(args, cfg):
    checkpoint = args.checkpoint or Path(args.out).with_suffix(".ckpt.json")
    harness.run_training(cfg["system"], cfg["train"], args.seeds, checkpoint_path=checkpoint, curve_path=args.out)


def _eval(args, cfg):
    policy = args.policy or cfg["eval"].get("policy", "greedy")
    rows = harness.run_eval(policy, cfg["system"], args.seeds, workers=args.workers)
    harness.write_csv(args.out, rows)


def _sweep(args, cfg):
    section = cfg["sweep"]
    policy = args.policy or section.get("policy", "dqn")
    ckpt_dir = args.checkpoints or section.get("checkpoint_dir")
    rows = harness.run_sweep(section.get("grid", {}), args.seeds, cfg["system"], policy, ckpt_dir, workers=args.workers)
    harness.write_csv(args.out, rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pandering", description="Pandering attacks on RD and FRD.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML/JSON config file")
        p.add_argument("--seeds", help="seed list such as 0-9 or 1,3,5 (default 0-9)")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--workers", type=int, default=1)

    common(sub.add_parser("fig1", help="single-round greedy malicious study"))
    p = sub.add_parser("train", help="train a DQN attacker; --out receives the learning curve")
    common(p)
    p.add_argument("--checkpoint", help="checkpoint path (default: <out>.ckpt.json)")
    p = sub.add_parser("eval", help="evaluate a baseline or checkpoint")
    common(p)
    p.add_argument("--policy", help="honest|random|random_solver|greedy or a checkpoint path")
    p = sub.add_parser("sweep", help="metric table over system x beta1 x kind x count")
    common(p)
    p.add_argument("--policy", help="dqn (default) or a baseline name")
    p.add_argument("--checkpoints", help="directory holding one checkpoint per learner cell")
    return parser


COMMANDS = {"fig1": _fig1, "train": _train, "eval": _eval, "sweep": _sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        args.seeds = parse_seeds(args.seeds)
        COMMANDS[args.command](args, cfg)
    except TrainingDiverged as exc:
        log.error("training diverged: %s", exc)
        return EXIT_DIVERGED
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
