"""JSON experiment configs: parsing, validation, serialization and presets.

Example document::

    {
      "schema_version": 1,
      "seed": 1601,
      "d": 16, "n": 32, "m": 500,
      "key_dist": {"family": "normal", "mean": 0.0, "sd": 1.0},
      "query_dist": {"family": "normal", "mean": 0.0, "sd": 1.0},
      "rules": [
        {"label": "raw", "rule": "raw_scores"},
        {"label": "lp3", "rule": "lp_norm", "p": 3}
      ],
      "replications": 100,
      "epsilon": 0.01
    }
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .attention import AttentionError, RuleKind, ScalingRule
from .simulation import RAW_SCORES, ExperimentConfig, Normal, RawScores, Uniform

SCHEMA_VERSION = 1

_TOP_LEVEL = {"schema_version", "seed", "d", "n", "m", "key_dist", "query_dist",
              "rules", "replications", "epsilon"}


class ConfigError(ValueError):
    """A config document that does not parse or validate; ``where`` names the field or line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _int(doc: dict, key: str, where: str, default=None) -> int:
    value = doc.get(key, default)
    if value is None:
        raise ConfigError(f"{where}{key}", "missing required field")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}{key}", f"expected an integer, got {value!r}")
    return value


def _float(doc: dict, key: str, where: str, default=None) -> float:
    value = doc.get(key, default)
    if value is None:
        raise ConfigError(f"{where}{key}", "missing required field")
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}{key}", f"expected a finite number, got {value!r}")
    return float(value)


def _dist(doc: Any, where: str):
    if doc is None:
        return Normal()
    if not isinstance(doc, dict):
        raise ConfigError(where, "expected an object")
    family = doc.get("family")
    try:
        if family == "normal":
            return Normal(_float(doc, "mean", f"{where}.", 0.0), _float(doc, "sd", f"{where}.", 1.0))
        if family == "uniform":
            return Uniform(_float(doc, "lo", f"{where}.", 0.0), _float(doc, "hi", f"{where}.", 1.0))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(where, str(exc)) from None
    raise ConfigError(f"{where}.family", f"expected 'normal' or 'uniform', got {family!r}")


def _rule(doc: Any, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(where, "expected an object with 'label' and 'rule'")
    label = doc.get("label")
    if not isinstance(label, str) or not label:
        raise ConfigError(f"{where}.label", "expected a nonempty string")
    name = doc.get("rule")
    if name == "raw_scores":
        return label, RAW_SCORES
    try:
        kind = RuleKind(name)
    except ValueError:
        choices = ", ".join(["raw_scores"] + [k.value for k in RuleKind])
        raise ConfigError(f"{where}.rule", f"unknown rule {name!r}; expected one of {choices}") from None
    p = _float(doc, "p", f"{where}.") if kind is RuleKind.LP_NORM else None
    try:
        return label, ScalingRule(kind, p)
    except AttentionError as exc:
        raise ConfigError(f"{where}.p", str(exc)) from None


def config_from_dict(doc: Any) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a JSON object")
    unknown = sorted(set(doc) - _TOP_LEVEL)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    version = _int(doc, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version}, expected {SCHEMA_VERSION}")
    rules_doc = doc.get("rules")
    if not isinstance(rules_doc, list) or not rules_doc:
        raise ConfigError("rules", "expected a nonempty list")
    rules = [_rule(r, f"rules[{i}]") for i, r in enumerate(rules_doc)]
    seen = set()
    for i, (label, _) in enumerate(rules):
        if label in seen:
            raise ConfigError(f"rules[{i}].label", f"duplicate label {label!r}")
        seen.add(label)

    fields = {}
    for key in ("seed", "d", "n", "m"):
        fields[key] = _int(doc, key, "")
    fields["replications"] = _int(doc, "replications", "", 100)
    fields["epsilon"] = _float(doc, "epsilon", "", 0.01)
    if not 0 <= fields["seed"] < 2**64:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")
    for key in ("d", "n", "m", "replications"):
        if fields[key] < 1:
            raise ConfigError(key, "must be >= 1")
    if not 0 < fields["epsilon"] < 0.5:
        raise ConfigError("epsilon", "must be in (0, 0.5)")
    return ExperimentConfig(
        rules=tuple(rules),
        key_dist=_dist(doc.get("key_dist"), "key_dist"),
        query_dist=_dist(doc.get("query_dist"), "query_dist"),
        **fields,
    )


def _dist_to_dict(dist) -> dict:
    if isinstance(dist, Normal):
        return {"family": "normal", "mean": dist.mean, "sd": dist.sd}
    return {"family": "uniform", "lo": dist.lo, "hi": dist.hi}


def rule_to_dict(label: str, rule) -> dict:
    if isinstance(rule, RawScores):
        return {"label": label, "rule": "raw_scores"}
    out = {"label": label, "rule": rule.kind.value}
    if rule.p is not None:
        out["p"] = rule.p
    return out


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "d": cfg.d,
        "n": cfg.n,
        "m": cfg.m,
        "key_dist": _dist_to_dict(cfg.key_dist),
        "query_dist": _dist_to_dict(cfg.query_dist),
        "rules": [rule_to_dict(lbl, r) for lbl, r in cfg.rules],
        "replications": cfg.replications,
        "epsilon": cfg.epsilon,
    }


def loads_config(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return config_from_dict(doc)


def load_config(path) -> ExperimentConfig:
    return loads_config(Path(path).read_text(encoding="utf-8"))


def dumps_config(cfg: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2) + "\n"


# Preset seeds are fixed so regenerated configs always reproduce the same run.
FIGURE1_SEED = 1601
FIGURE2_SEED = 25632


def preset(name: str) -> ExperimentConfig:
    """Configs mirroring the two published simulation figures."""
    if name == "figure1":
        return ExperimentConfig(
            seed=FIGURE1_SEED, d=16, n=32, m=500,
            rules=(("raw_scores", RAW_SCORES),
                   ("unscaled", ScalingRule(RuleKind.UNSCALED)),
                   ("sqrt_dim", ScalingRule(RuleKind.SQRT_DIM))),
        )
    if name == "figure2":
        return ExperimentConfig(
            seed=FIGURE2_SEED, d=256, n=32, m=500,
            rules=(("raw_scores", RAW_SCORES),
                   ("sqrt_dim", ScalingRule(RuleKind.SQRT_DIM)),
                   ("key_length_sum", ScalingRule(RuleKind.KEY_LENGTH_SUM))),
        )
    raise ConfigError("preset", f"unknown preset {name!r}; expected figure1 or figure2")
