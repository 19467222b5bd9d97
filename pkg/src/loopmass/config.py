"""Run configuration: JSON file, schema validation, dotted overrides."""

from __future__ import annotations

import copy
import json

import jsonschema

SCHEMA_VERSION = 1

# Shipped and versioned with the package; unknown keys are rejected.
CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "schema_version": {"type": "integer", "enum": [SCHEMA_VERSION]},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"n": {"type": "number", "minimum": 0.0, "maximum": 2.0}},
        },
        "points": {
            "type": "array",
            "minItems": 2,
            "maxItems": 4,
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
        "scale": {"type": "number", "exclusiveMinimum": 0.0},
        "normalization": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "A": {"type": "number", "exclusiveMinimum": 0.0},
                "varrho": {"type": "number"},
                "sigma": {"type": "number"},
            },
        },
        "lattice": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rows": {"type": "integer", "minimum": 4},
                "cols": {"type": "integer", "minimum": 4},
                "l_max": {"type": "integer", "minimum": 6},
                "boundary_mode": {"type": "string", "enum": ["free", "half_plane"]},
                "node_budget": {"type": "integer", "minimum": 1},
                "marks": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "integer"},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
                "distances": {"type": "array", "items": {"type": "integer"}},
            },
        },
        "sle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0.0},
                "T": {"type": "number", "exclusiveMinimum": 0.0},
                "runs": {"type": "integer", "minimum": 100},
                "seed": {"type": "integer"},
                "kappa": {"type": "number", "exclusiveMinimum": 0.0},
            },
        },
        "stencil": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "h": {"type": "number", "exclusiveMinimum": 0.0},
                "order": {"type": "integer", "enum": [2, 4]},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "residual": {"type": "number", "exclusiveMinimum": 0.0},
                "ope_c": {"type": "number", "exclusiveMinimum": 0.0},
            },
        },
    },
}

DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "model": {"n": 1.0},
    # default marked points: asymmetric enough that the drift probe
    # separates the kappa values cleanly at the default run count
    "points": [[0.0, 0.0], [0.45, 0.1], [1.3, 0.6], [0.3, 1.4]],
    "scale": 1.0,
    "normalization": {"A": 1.0, "varrho": 0.0, "sigma": 0.0},
    "lattice": {
        "rows": 8,
        "cols": 8,
        "l_max": 12,
        "boundary_mode": "free",
        "node_budget": 10**9,
    },
    "sle": {"dt": 1e-4, "T": 0.01, "runs": 20000, "seed": 1, "kappa": 6.0},
    "stencil": {"order": 2},
    "tolerances": {"residual": 1e-4, "ope_c": 1e-6},
}


# Every CLI invocation emits one record of this shape.
RESULT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "required": ["command", "inputs", "outputs", "provenance"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object"},
        "outputs": {"type": "object"},
        "provenance": {
            "type": "object",
            "additionalProperties": False,
            "required": ["version", "seed", "timestamp"],
            "properties": {
                "version": {"type": "string"},
                "seed": {"type": ["integer", "null"]},
                "timestamp": {"type": "string"},
            },
        },
    },
}


class ConfigError(ValueError):
    pass


def _coerce(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg: dict, dotted: str):
    """Apply one ``section.key=value`` override in place."""
    if "=" not in dotted:
        raise ConfigError(f"override {dotted!r} is not of the form key=value")
    path, raw = dotted.split("=", 1)
    keys = path.split(".")
    target = cfg
    for k in keys[:-1]:
        if not isinstance(target.get(k), dict):
            target[k] = {}
        target = target[k]
    target[keys[-1]] = _coerce(raw)


def load_config(path: str | None = None, overrides=()) -> dict:
    """Defaults, optional config file, then dotted overrides; validated."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as fh:
            user = json.load(fh)
        for key, val in user.items():
            if isinstance(val, dict) and isinstance(cfg.get(key), dict):
                cfg[key].update(val)
            else:
                cfg[key] = val
    for item in overrides:
        apply_override(cfg, item)
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc.message}") from exc
    return cfg
