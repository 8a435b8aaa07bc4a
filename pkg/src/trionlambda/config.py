"""Run configuration: YAML parsing, schema and physics validation, presets.

Config files state every rate, Rabi frequency and detuning as a linear
frequency in GHz; :meth:`RunConfig.params` multiplies by exactly 2*pi.
"""
import copy
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import jsonschema
import numpy as np
import yaml

from .trion import TWO_PI, TrionParams

MODEL_KEYS = TrionParams.field_names()
DIMENSIONLESS = ("branching_b",)
RATE_KEYS = ("omega1_rabi", "omega2_rabi", "gamma_r", "gamma_p_relax", "gamma_p_deph")

BASE_MODEL = {
    "omega1_rabi": 0.0,
    "omega2_rabi": 0.0,
    "delta1": 0.0,
    "delta2": 0.0,
    "gamma_r": 0.5,
    "branching_b": 0.01,
    "gamma_p_relax": 9.3,
    "gamma_p_deph": 8.8,
}

PRESETS = {
    "qd1": dict(BASE_MODEL),
    # qd2 reuses the qd1 decay rates.
    "qd2": dict(BASE_MODEL),
}

PRESET_METADATA = {
    "qd1": {
        "fundamental_thz": 384.7,
        "auger_shift_thz": 3.2,
        "auger_shift_mev": 13.2,
        "calibrated_omega1_ghz": [5.5, 31.9, 43.2],
    },
    "qd2": {
        "fundamental_thz": 384.7,
        "auger_shift_thz": 3.2,
        "auger_shift_mev": 13.2,
        "calibrated_omega1_ghz": [67.7],
        "note": "decay rates copied from qd1",
    },
}

COMMAND_BLOCKS = {
    "steady": "steady",
    "sweep": "sweep",
    "spectrum": "spectrum",
    "g2": "g2",
    "fit-rabi": "fit_rabi",
    "rate-compare": "rate_compare",
}


class ConfigError(ValueError):
    def __init__(self, violations):
        super().__init__("\n".join(violations))
        self.violations = list(violations)


def load_schema():
    text = resources.files("trionlambda").joinpath("schema/config.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class RunConfig:
    model: dict  # fully resolved, GHz
    blocks: dict = field(default_factory=dict)
    preset: Optional[str] = None

    def params(self):
        kw = {k: (v if k in DIMENSIONLESS else TWO_PI * v) for k, v in self.model.items()}
        return TrionParams(**kw)

    def to_json(self):
        doc = {"preset": self.preset, "model": self.model, "blocks": self.blocks}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        return cls(model=doc["model"], blocks=doc["blocks"], preset=doc["preset"])

    def output_path(self):
        return self.blocks.get("output", {}).get("path")


def grid_values(spec):
    """Expand a {start, stop, num} or {values} mapping into an array."""
    if "values" in spec:
        return np.asarray(spec["values"], dtype=np.float64)
    return np.linspace(spec["start"], spec["stop"], int(spec["num"]))


def to_internal(field_name, values):
    values = np.asarray(values, dtype=np.float64)
    return values if field_name in DIMENSIONLESS else TWO_PI * values


# --- line anchoring -------------------------------------------------------

def _line_index(node, path=(), out=None):
    if out is None:
        out = {}
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            _line_index(value, path + (key.value,), out)
            out[path + (key.value,)] = key.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            _line_index(item, path + (i,), out)
    return out


def _anchor(lines, path):
    path = tuple(path)
    while path and path not in lines:
        path = path[:-1]
    return lines.get(path, 1)


def _fmt(source, line, message):
    return f"{source}:{line}: {message}"


# --- validation -----------------------------------------------------------

def _schema_violations(doc, lines, source):
    validator = jsonschema.Draft202012Validator(load_schema())
    out = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path))):
        path = tuple(err.absolute_path)
        if err.validator == "additionalProperties" and isinstance(err.instance, dict):
            allowed = set(err.schema.get("properties", {}))
            for key in sorted(set(err.instance) - allowed):
                where = "/".join(map(str, path + (key,)))
                out.append(_fmt(source, _anchor(lines, path + (key,)), f"unknown key '{where}'"))
            continue
        where = "/".join(map(str, path)) or "<root>"
        out.append(_fmt(source, _anchor(lines, path), f"{where}: {err.message}"))
    return out


def _grid_violations(spec, path, lines, source, label):
    out = []
    if "values" in spec:
        vals = np.asarray(spec["values"], dtype=np.float64)
        if vals.size > 1 and np.any(np.diff(vals) <= 0):
            out.append(_fmt(source, _anchor(lines, path + ("values",)), f"{label} grid is not strictly ascending"))
    elif {"start", "stop", "num"} <= set(spec):
        if spec["num"] > 1 and not spec["stop"] > spec["start"]:
            out.append(_fmt(source, _anchor(lines, path + ("stop",)), f"{label} grid is not ascending (stop <= start)"))
        if spec["num"] == 1 and spec["stop"] != spec["start"]:
            out.append(_fmt(source, _anchor(lines, path + ("num",)), f"{label} grid with num=1 needs start == stop"))
    return out


def _physics_violations(doc, model, lines, source):
    out = []
    for key in RATE_KEYS:
        if model[key] < 0:
            out.append(_fmt(source, _anchor(lines, ("model", key)), f"{key} must be >= 0"))
    if not model["gamma_r"] > 0:
        out.append(_fmt(source, _anchor(lines, ("model", "gamma_r")), "gamma_r must be > 0"))
    if not 0.0 <= model["branching_b"] < 1.0:
        out.append(_fmt(source, _anchor(lines, ("model", "branching_b")), "branching_b out of range [0, 1)"))
    for key, value in model.items():
        if not np.isfinite(value):
            out.append(_fmt(source, _anchor(lines, ("model", key)), f"{key} is not finite"))

    sweep = doc.get("sweep", {})
    for i, axis in enumerate(sweep.get("axes", [])):
        out += _grid_violations(axis, ("sweep", "axes", i), lines, source, f"sweep axis '{axis.get('field')}'")
    axes = sweep.get("axes", [])
    if len(axes) == 2 and axes[0].get("field") == axes[1].get("field"):
        out.append(_fmt(source, _anchor(lines, ("sweep", "axes", 1)), "sweep axes must use different fields"))
    if "spectrum" in doc:
        out += _grid_violations(doc["spectrum"]["frequencies"], ("spectrum", "frequencies"), lines, source, "spectrum frequency")
    if "g2" in doc:
        out += _grid_violations(doc["g2"]["delays"], ("g2", "delays"), lines, source, "g2 delay")
    if "rate_compare" in doc:
        axis = doc["rate_compare"]["axis"]
        out += _grid_violations(axis, ("rate_compare", "axis"), lines, source, f"rate_compare axis '{axis.get('field')}'")
    if "fit_rabi" in doc:
        fit = doc["fit_rabi"]
        if len(fit["powers"]) != len(fit["intensities"]):
            out.append(_fmt(source, _anchor(lines, ("fit_rabi", "intensities")), "powers and intensities differ in length"))
        if any(pw <= 0 for pw in fit["powers"]):
            out.append(_fmt(source, _anchor(lines, ("fit_rabi", "powers")), "powers must be > 0"))
    return out


def parse_config(text, source="<config>", preset_override=None):
    """Parse and validate config text. Raises ConfigError listing every violation."""
    try:
        node = yaml.compose(text)
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 1
        raise ConfigError([_fmt(source, line, f"YAML syntax error: {getattr(exc, 'problem', exc)}")]) from exc
    if doc is None:
        doc, lines = {}, {(): 1}
    else:
        lines = _line_index(node)
    if not isinstance(doc, dict):
        raise ConfigError([_fmt(source, 1, "top level must be a mapping")])

    violations = _schema_violations(doc, lines, source)
    if violations:
        raise ConfigError(violations)

    preset = preset_override or doc.get("preset")
    model = dict(PRESETS[preset] if preset else BASE_MODEL)
    model.update({k: v for k, v in doc.get("model", {}).items()})
    model = {k: model[k] for k in MODEL_KEYS}

    violations = _physics_violations(doc, model, lines, source)
    if violations:
        raise ConfigError(violations)

    blocks = {k: copy.deepcopy(v) for k, v in doc.items() if k not in ("preset", "model")}
    return RunConfig(model=model, blocks=blocks, preset=preset)


def load_config(path, preset_override=None):
    """Read and validate ``path``. OSError propagates for unreadable files."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, source=str(path), preset_override=preset_override)
