"""Experiment configuration: one JSON document, rationals given as decimal or fraction strings."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema

from .fock.space import GridSpec
from .levy import DEFAULT_TOLERANCES
from .scalars import EXACT, FLOAT, parse_pair
from .schurmann import MINUS, PAPER_PLUS

SCHEMA_VERSION = 1

_RATIONAL = {"type": "string", "pattern": r"^-?\d+(\.\d+)?(/\d+)?$"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["d", "L"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "d": {"type": "integer", "minimum": 1, "maximum": 4},
        "L": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "minItems": 1,
                "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _RATIONAL},
            },
        },
        "interval": {"type": "array", "minItems": 2, "maxItems": 2, "items": _RATIONAL},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "T_max": _RATIONAL,
                "m": {"type": "integer", "minimum": 1},
                "N": {"type": "integer", "minimum": 0, "maximum": 6},
            },
        },
        "depths": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0, "maximum": 10}},
        "levy_depths": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0, "maximum": 8}},
        "table_depth": {"type": "integer", "minimum": 0, "maximum": 6},
        "times": {"type": "array", "minItems": 1, "items": _RATIONAL},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "number", "minimum": 0} for k in DEFAULT_TOLERANCES},
        },
        "psi_sign": {"enum": [MINUS, PAPER_PLUS]},
        "drift_sign": {"enum": [1, -1]},
        "mode": {"enum": [EXACT, FLOAT]},
        "out": {"type": "string"},
        "seed": {"type": "integer"},
    },
}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ExperimentConfig:
    d: int
    L: tuple
    R: Fraction = Fraction(0)
    S: Fraction = Fraction(1)
    T_max: Fraction = Fraction(1)
    m: int = 32
    N: int = 3
    depths: tuple = (1, 2, 3, 4, 5)
    levy_depths: tuple = (4, 5, 6)
    table_depth: int = 2
    times: tuple = (Fraction(1, 2), Fraction(1))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    psi_sign: str = MINUS
    drift_sign: int = 1
    mode: str = EXACT
    out: str = "results"
    seed: int = 0

    def grid(self, N: int | None = None) -> GridSpec:
        return GridSpec(self.T_max, self.m, 1, self.N if N is None else N)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "d": self.d,
            "L": [[[str(e.real), str(e.imag)] for e in row] for row in self.L],
            "interval": [str(self.R), str(self.S)],
            "grid": {"T_max": str(self.T_max), "m": self.m, "N": self.N},
            "depths": list(self.depths),
            "levy_depths": list(self.levy_depths),
            "table_depth": self.table_depth,
            "times": [str(t) for t in self.times],
            "tolerances": dict(self.tolerances),
            "psi_sign": self.psi_sign,
            "drift_sign": self.drift_sign,
            "mode": self.mode,
            "out": self.out,
            "seed": self.seed,
        }


def _path(error: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(p) for p in error.absolute_path)


def _aligned(x: Fraction, width: Fraction) -> bool:
    return (x / width).denominator == 1


def parse_config(doc: dict) -> ExperimentConfig:
    """Validate a config document; every failure names the offending field path."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError(_path(errors[0]), errors[0].message)
    d = doc["d"]
    if len(doc["L"]) != d:
        raise ConfigError("/L", f"expected {d} rows, got {len(doc['L'])}")
    L = []
    for i, row in enumerate(doc["L"]):
        if len(row) != d:
            raise ConfigError(f"/L/{i}", f"expected {d} entries, got {len(row)}")
        L.append(tuple(parse_pair(e) for e in row))
    cfg = ExperimentConfig(d, tuple(L))
    if "interval" in doc:
        cfg.R, cfg.S = (Fraction(x) for x in doc["interval"])
    grid = doc.get("grid", {})
    cfg.T_max = Fraction(grid.get("T_max", cfg.T_max))
    cfg.m = grid.get("m", cfg.m)
    cfg.N = grid.get("N", cfg.N)
    for key in ("depths", "levy_depths"):
        if key in doc:
            setattr(cfg, key, tuple(sorted(set(doc[key]))))
    if "times" in doc:
        cfg.times = tuple(Fraction(t) for t in doc["times"])
    cfg.tolerances.update(doc.get("tolerances", {}))
    for key in ("table_depth", "psi_sign", "drift_sign", "mode", "out", "seed"):
        if key in doc:
            setattr(cfg, key, doc[key])
    _check_grid(cfg)
    return cfg


def _check_grid(cfg: ExperimentConfig):
    width = cfg.T_max / cfg.m
    if cfg.T_max <= 0:
        raise ConfigError("/grid/T_max", "must be positive")
    if not (0 <= cfg.R < cfg.S <= cfg.T_max):
        raise ConfigError("/interval", f"need 0 <= R < S <= T_max, got [{cfg.R}, {cfg.S}]")
    for name, x in (("R", cfg.R), ("S", cfg.S)):
        if not _aligned(x, width):
            raise ConfigError("/interval", f"{name} = {x} is not a multiple of the cell width {width}")
    for i, j in enumerate(cfg.depths):
        if not _aligned((cfg.S - cfg.R) / 2**j, width):
            raise ConfigError(f"/depths/{i}", f"depth {j} splits [{cfg.R}, {cfg.S}] below the grid width {width}")
    for i, t in enumerate(cfg.times):
        if t <= 0:
            raise ConfigError(f"/times/{i}", "times must be positive")
        if not _aligned(t / 2**cfg.table_depth, width) or t > cfg.T_max:
            raise ConfigError(f"/times/{i}", f"t = {t} at table depth {cfg.table_depth} is off the grid")


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError("/", f"no such file {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("/", f"invalid JSON: {exc}") from None
    return parse_config(doc)


def default_config_dict(d: int = 1) -> dict:
    L = [[["1", "0"]]] if d == 1 else [[["1", "0"], ["1/2", "0"]], [["0", "1/2"], ["1", "0"]]]
    return {"schema_version": SCHEMA_VERSION, "d": d, "L": L}
