"""Experiment config files.

A config is a YAML (or JSON) mapping with optional sections::

    system:   SystemConfig fields
    train:    TrainConfig fields
    fig1:     {beta1_grid: [...]}
    eval:     {policy: <baseline name or checkpoint path>}
    sweep:    {grid: {system: [...], beta1: [...], strategic_kind: [...], strategic_count: [...]},
               policy: dqn, checkpoint_dir: <dir>}
"""

from __future__ import annotations

from dataclasses import fields
from pathlib import Path

import yaml

from .agents import TrainConfig
from .model import ConfigError, SystemConfig

SECTIONS = ("system", "train", "fig1", "eval", "sweep")


def _build(cls, values: dict, section: str):
    known = {f.name for f in fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
    try:
        return cls(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid [{section}] section: {exc}") from exc


def parse_config(data: dict | None) -> dict:
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    out = {
        "system": _build(SystemConfig, data.get("system") or {}, "system"),
        "train": _build(TrainConfig, data.get("train") or {}, "train"),
    }
    for section in ("fig1", "eval", "sweep"):
        value = data.get(section) or {}
        if not isinstance(value, dict):
            raise ConfigError(f"[{section}] must be a mapping")
        out[section] = value
    return out


def load_config(path) -> dict:
    if path is None:
        return parse_config({})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return parse_config(data)


def parse_seeds(spec: str | None, default=range(10)) -> list[int]:
    """``"0-9"``, ``"1,4,7"`` or a mix such as ``"0-2,10"``."""
    if spec is None:
        return list(default)
    seeds = []
    for part in str(spec).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = part.split("-", 1)
                seeds.extend(range(int(lo), int(hi) + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise ConfigError(f"bad seed spec {spec!r}") from None
    if not seeds:
        raise ConfigError(f"empty seed spec {spec!r}")
    return seeds
