"""Run configuration: JSON schema, loading and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import jsonschema

from lamina.valued import LaminaError


class ConfigError(LaminaError, ValueError):
    pass


COMMANDS = ("lengths", "periods", "cr-axioms", "atom-scan", "barycenter-check", "reproduce-strubel")
SAMPLED = {"cr-axioms", "barycenter-check", "atom-scan", "periods"}

_entry = {"type": ["string", "number", "object"]}
_matrix = {"type": "array", "items": {"type": "array", "items": _entry}}
_word_list = {"type": "array", "items": {"type": "string", "pattern": "^[aAbB]*$"}}

SCHEMA: dict = {
    "type": "object",
    "additionalProperties": False,
    "required": ["field", "representation", "commands"],
    "properties": {
        "field": {
            "type": "object",
            "additionalProperties": False,
            "required": ["alpha"],
            "properties": {
                "alpha": {"type": ["string", "number"]},
                "precision": {"type": ["integer", "string"]},
                "backend": {"enum": ["exact", "hybrid"]},
            },
        },
        "representation": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["strubel_unipotent", "sl2", "explicit"]},
                "s": _entry,
                "entries": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["c1"],
                    "properties": {"c1": _matrix, "c2": _matrix, "c3": _matrix},
                },
                "n": {"type": "integer", "minimum": 1},
                "c1": _matrix,
                "c3": _matrix,
                "orientation": {"enum": [1, -1]},
            },
        },
        "words": {
            "oneOf": [
                _word_list,
                {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "corpus": {"type": "string"},
                        "enumerate": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["max_len"],
                            "properties": {
                                "max_len": {"type": "integer", "minimum": 1, "maximum": 10},
                                "min_len": {"type": "integer", "minimum": 1},
                                "cyclic": {"type": "boolean"},
                                "canonical": {"type": "boolean"},
                            },
                        },
                    },
                },
            ]
        },
        "commands": {
            "type": "array",
            "minItems": 1,
            "items": {
                "oneOf": [
                    {"enum": list(COMMANDS)},
                    {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["name"],
                        "properties": {
                            "name": {"enum": list(COMMANDS)},
                            "samples": {"type": "integer", "minimum": 1},
                            "basepoints": {"type": "integer", "minimum": 1},
                            "depth": {"type": "integer", "minimum": 1},
                            "max_levels": {"type": "integer", "minimum": 1},
                            "candidates": _word_list,
                            "domain_max_len": {"type": "integer", "minimum": 2, "maximum": 8},
                            "translates": _word_list,
                            "n": {"type": "integer", "minimum": 1, "maximum": 4},
                            "alphas": {"type": "array", "items": {"type": ["string", "number"]}},
                            "expected": {"type": "object"},
                        },
                    },
                ]
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "format": {"enum": ["csv", "json"]},
            },
        },
        "seed": {"type": "integer"},
    },
}


@dataclass
class RunConfig:
    raw: dict
    base_dir: Path

    @property
    def field(self) -> dict:
        return self.raw["field"]

    @property
    def representation(self) -> dict:
        return self.raw["representation"]

    @property
    def commands(self) -> list:
        return [c if isinstance(c, dict) else {"name": c} for c in self.raw["commands"]]

    @property
    def seed(self) -> Optional[int]:
        return self.raw.get("seed")

    @property
    def output(self) -> dict:
        return self.raw.get("output", {})

    @property
    def precision(self):
        return self.field.get("precision", 16)


def validate(raw: Any, base_dir: Path | str = ".") -> RunConfig:
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {e.message}") from None
    cfg = RunConfig(raw, Path(base_dir))
    names = {c["name"] for c in cfg.commands}
    if names & SAMPLED and cfg.seed is None:
        raise ConfigError(f"seed is mandatory for sampled commands {sorted(names & SAMPLED)}")
    return cfg


def load(path: Path | str, overrides: Optional[dict] = None) -> RunConfig:
    """Read and validate a config file; ``overrides`` replace top-level keys before validation."""
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {p} is not valid JSON: {e}") from None
    if overrides and isinstance(raw, dict):
        raw.update(overrides)
    return validate(raw, p.parent)
