"""Line-oriented ``key = value`` run configuration.

Grammar::

    line    := blank | '#' comment | key '=' value
    value   := item (',' item)*
    item    := integer | 'p/q' rational | decimal float | word

Everything after ``#`` on a line is a comment.  Keys:

    model           builtin name (trig_curve, round_circle, ...)
    params          comma list of model parameters (tori, boy_surface)
    f_cos f_sin     cosine / sine coefficients of f  (trig_curve)
    h_cos h_sin     cosine / sine coefficients of the height (trig_curve)
    r, i            multiplicity and arc level
    resolution      samples (curves) or mesh resolution (surfaces)
    seed count max_degree      random sweep
    sweep_arcs      1 to also trace arcs for every accepted sweep sample
    out svg         output directory, 1/0 for SVG plots
    tol.<name>      immersion transversality fold cusp gap tube dedup step
    nf.<name>       r k z j t tu tv s high pair_high steps  (normal-form suite)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .prim_map import DEFAULT_THRESHOLDS

DEFAULT_TOLERANCES = dict(DEFAULT_THRESHOLDS, tube=1e-3, dedup=1e-6, step=1e-2)

_NF_KEYS = {"r", "k", "z", "j", "t", "tu", "tv", "s", "high", "pair_high", "steps"}
_LIST_KEYS = {"params", "f_cos", "f_sin", "h_cos", "h_sin"}
_INT_KEYS = {"r", "i", "resolution", "seed", "count", "max_degree", "sweep_arcs", "svg"}
_STR_KEYS = {"model", "out"}

_INT = re.compile(r"[+-]?\d+\Z")
_RAT = re.compile(r"[+-]?\d+/\d+\Z")


class ConfigError(ValueError):
    pass


def parse_scalar(text: str):
    text = text.strip()
    if _INT.match(text):
        return int(text)
    if _RAT.match(text):
        num, den = text.split("/")
        if int(den) == 0:
            raise ConfigError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    try:
        return float(text)
    except ValueError:
        return text


def parse_value(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    return [parse_scalar(item) for item in text.split(",")]


@dataclass
class RunConfig:
    model: str | None = None
    params: list = field(default_factory=list)
    curve: dict = field(default_factory=dict)
    r: int | None = None
    i: int | None = None
    resolution: int | None = None
    seed: int | None = None
    count: int = 100
    max_degree: int = 4
    sweep_arcs: bool = False
    out: str | None = None
    svg: bool = False
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    normal_form: dict = field(default_factory=dict)

    @property
    def thresholds(self) -> dict:
        return {k: self.tolerances[k] for k in DEFAULT_THRESHOLDS}

    def model_params(self) -> list:
        if self.model == "trig_curve":
            missing = [k for k in ("f_cos", "f_sin", "h_cos", "h_sin") if k not in self.curve]
            if missing:
                raise ConfigError(f"trig_curve needs keys {', '.join(missing)}")
            return [self.curve[k] for k in ("f_cos", "f_sin", "h_cos", "h_sin")]
        return list(self.params)

    def set_tolerance(self, name: str, value) -> None:
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {name!r}; known: {', '.join(sorted(DEFAULT_TOLERANCES))}")
        if isinstance(value, str) or isinstance(value, list):
            raise ConfigError(f"tolerance {name} needs a number")
        value = float(value)
        if not value > 0:
            raise ConfigError(f"tolerance {name} must be positive")
        self.tolerances[name] = value

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "params": [str(p) for p in self.params],
            "curve": {k: [str(c) for c in v] for k, v in sorted(self.curve.items())},
            "r": self.r,
            "i": self.i,
            "resolution": self.resolution,
            "seed": self.seed,
            "count": self.count,
            "max_degree": self.max_degree,
            "sweep_arcs": self.sweep_arcs,
            "tolerances": {k: self.tolerances[k] for k in sorted(self.tolerances)},
            "normal_form": {k: [str(c) for c in v] if isinstance(v, list) else str(v) for k, v in sorted(self.normal_form.items())},
        }


def _set(cfg: RunConfig, key: str, value: list, where: str) -> None:
    def one():
        if len(value) != 1:
            raise ConfigError(f"{where}: {key} takes a single value")
        return value[0]

    if key.startswith("tol."):
        cfg.set_tolerance(key[4:], one())
    elif key.startswith("nf."):
        name = key[3:]
        if name not in _NF_KEYS:
            raise ConfigError(f"{where}: unknown normal-form key {key!r}")
        if any(isinstance(v, float) for v in value):
            raise ConfigError(f"{where}: {key} must be exact (integers or p/q rationals)")
        if any(isinstance(v, str) for v in value):
            raise ConfigError(f"{where}: {key} must be numeric")
        cfg.normal_form[name] = value if name in ("s", "high", "pair_high") else one()
    elif key in _STR_KEYS:
        v = one()
        setattr(cfg, key, str(v))
    elif key in _INT_KEYS:
        v = one()
        if not isinstance(v, int):
            raise ConfigError(f"{where}: {key} must be an integer")
        if key == "seed" and not 0 <= v < 2**64:
            raise ConfigError(f"{where}: seed must be a 64-bit unsigned integer")
        if key in ("sweep_arcs", "svg"):
            v = bool(v)
        setattr(cfg, key, v)
    elif key in _LIST_KEYS:
        if any(isinstance(v, str) for v in value):
            raise ConfigError(f"{where}: {key} must be numeric")
        if key == "params":
            cfg.params = value
        else:
            cfg.curve[key] = value
    else:
        raise ConfigError(f"{where}: unknown key {key!r}")


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        _set(cfg, key, parse_value(value), f"{source}:{lineno}")
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))


def apply_override(cfg: RunConfig, item: str) -> None:
    """Apply one ``--tol-override KEY=VAL``."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not KEY=VAL")
    key, value = (p.strip() for p in item.split("=", 1))
    if key.startswith("tol."):
        key = key[4:]
    cfg.set_tolerance(key, parse_scalar(value))
