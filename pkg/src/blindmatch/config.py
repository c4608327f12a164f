"""Experiment configuration: a flat ``key = value`` text file.

Values are Python literals (numbers, lists, booleans, quoted strings); bare
words such as ``er``, ``default`` or ``resolvent(0.1)`` are read as strings.
Unknown keys are rejected. Example::

    graph = er
    n = 50
    filter1 = resolvent(0.1)
    filter2 = resolvent(0.3)
    m_samples = [1000, 10000, 100000]
    sweep_axis = M
"""
from __future__ import annotations

import ast
import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError, InvalidArgumentError
from .matching import SOLVERS
from .signals import EXCITATIONS, GraphFilter
from .spectral import SCAN_MODES

GRAPH_MODELS = ("er", "ba", "wigner", "dataset")
# sweep axis name -> config key holding its values
AXES = {"M": "m_samples", "sigma2": "sigma2", "n": "n", "alpha": "alpha", "beta": "beta"}
_INT_KEYS = {"n", "m0", "m_attach", "m_samples", "trials", "seed"}


@dataclass(frozen=True)
class ExperimentConfig:
    graph: str = "er"
    n: int | list = 50
    p: float = 0.4
    m0: int = 4
    m_attach: int = 4
    beta: float | list = 0.1
    dataset_path: str | None = None
    sample_q: float = 0.98
    relabel: bool = False
    filter1: str = "resolvent(0.1)"
    filter2: str = "resolvent(0.3)"
    alpha: float | list | None = None
    sigma2: float | list = 0.01
    excitation: str = "standard_normal"
    m_samples: int | list = 100000
    auto_m: bool = False
    trials: int = 50
    seed: int = 0
    solver: str = "auto"
    eps: float | str = "default"
    varsigma: float | str = "default"
    identifiability_mode: str = "self_swap"
    sweep_axis: str | None = None
    baseline: bool = True
    outputs: str = "results"

    def __post_init__(self):
        _validate(self)

    # -- grid -----------------------------------------------------------
    def axis_values(self) -> list:
        if self.sweep_axis is None:
            return [None]
        return list(getattr(self, AXES[self.sweep_axis]))

    def grid(self) -> list[dict]:
        """One dict of resolved scalar parameters per sweep point."""
        points = []
        for value in self.axis_values():
            point = {key: getattr(self, key) for key in ("n", "sigma2", "m_samples", "alpha", "beta")}
            if self.sweep_axis is not None:
                point[AXES[self.sweep_axis]] = value
            if self.auto_m:
                n = point["n"]
                point["m_samples"] = int(math.ceil(750 * n * math.log(n)))
            points.append(point)
        return points

    def filters_for(self, alpha) -> tuple[GraphFilter, GraphFilter]:
        f1 = GraphFilter.parse(self.filter1)
        if alpha is None:
            return f1, GraphFilter.parse(self.filter2)
        return f1, GraphFilter.resolvent(f1.params[0] + alpha)

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, str) and f.name not in ("dataset_path", "outputs"):
                lines.append(f"{f.name} = {value}")
            else:
                lines.append(f"{f.name} = {value!r}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def with_overrides(self, **kwargs) -> ExperimentConfig:
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        try:
            return replace(self, **kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _validate(cfg: ExperimentConfig) -> None:
    def fail(key, msg):
        raise ConfigError(f"{key}: {msg}")

    if cfg.graph not in GRAPH_MODELS:
        fail("graph", f"must be one of {GRAPH_MODELS}, got {cfg.graph!r}")
    if cfg.sweep_axis is not None and cfg.sweep_axis not in AXES:
        fail("sweep_axis", f"must be one of {tuple(AXES)}, got {cfg.sweep_axis!r}")
    axis_key = AXES.get(cfg.sweep_axis)
    checks = {
        "n": lambda v: _is_int(v) and v >= 2,
        "sigma2": lambda v: _is_num(v) and v >= 0,
        "m_samples": lambda v: _is_int(v) and v >= 2,
        "alpha": lambda v: _is_num(v) and v >= 0,
        "beta": lambda v: _is_num(v) and 0 < v < 1,
    }
    for key, ok in checks.items():
        value = getattr(cfg, key)
        if key == "alpha" and value is None:
            if cfg.sweep_axis == "alpha":
                fail("alpha", "sweep over alpha needs a list of values")
            continue
        if key == axis_key:
            if not isinstance(value, list) or not value:
                fail(key, "sweep axis values must be a non-empty list")
            bad = [v for v in value if not ok(v)]
            if bad:
                fail(key, f"invalid values {bad}")
        elif isinstance(value, list):
            fail(key, f"list given but sweep_axis is {cfg.sweep_axis!r}")
        elif not ok(value):
            fail(key, f"invalid value {value!r}")
    if not (0 <= cfg.p <= 1):
        fail("p", "must lie in [0, 1]")
    if not (_is_int(cfg.m0) and _is_int(cfg.m_attach) and cfg.m0 >= cfg.m_attach >= 1):
        fail("m0", "need integers m0 >= m_attach >= 1")
    if not (0 <= cfg.sample_q <= 1):
        fail("sample_q", "must lie in [0, 1]")
    if cfg.graph == "dataset" and not cfg.dataset_path:
        fail("dataset_path", "required when graph = dataset")
    if cfg.graph == "dataset" and cfg.sweep_axis == "n":
        fail("sweep_axis", "dataset graphs have a fixed n")
    for key in ("filter1", "filter2"):
        try:
            GraphFilter.parse(getattr(cfg, key))
        except (InvalidArgumentError, TypeError) as exc:
            fail(key, str(exc))
    if cfg.alpha is not None and GraphFilter.parse(cfg.filter1).kind != "resolvent":
        fail("alpha", "alpha offsets require filter1 to be a resolvent filter")
    if cfg.excitation not in EXCITATIONS:
        fail("excitation", f"must be one of {EXCITATIONS}")
    if not (_is_int(cfg.trials) and cfg.trials >= 1):
        fail("trials", "must be an integer >= 1")
    if not (_is_int(cfg.seed) and cfg.seed >= 0):
        fail("seed", "must be a non-negative integer")
    if cfg.solver not in SOLVERS:
        fail("solver", f"must be one of {SOLVERS}")
    if cfg.identifiability_mode not in SCAN_MODES:
        fail("identifiability_mode", f"must be one of {SCAN_MODES}")
    for key in ("eps", "varsigma"):
        value = getattr(cfg, key)
        if value != "default" and not (_is_num(value) and value > 0):
            fail(key, "must be a positive number or 'default'")
    for key in ("auto_m", "baseline", "relabel"):
        if not isinstance(getattr(cfg, key), bool):
            fail(key, "must be True or False")


def _parse_value(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


def _integral(value):
    # accept 1e5-style literals for integer fields
    if isinstance(value, list):
        return [_integral(v) for v in value]
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def parse_config_text(text: str) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parsed = _parse_value(value)
        if parsed == "None" or parsed is None:
            parsed = None
        if isinstance(parsed, tuple):
            parsed = list(parsed)
        if key in _INT_KEYS:
            parsed = _integral(parsed)
        values[key] = parsed
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text)
