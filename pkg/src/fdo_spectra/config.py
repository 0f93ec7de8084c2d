"""Strict JSON run configuration for the command-line runner."""

from __future__ import annotations

import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .potential import PotentialSpec
from .spectral import Grid

COMMANDS = ("spectrum", "bounds", "phasespace", "verify", "asymptotics")

DEFAULTS = {
    "potential": {"p": 2, "beta": 0},
    "grid": {"L": 20, "N": 256},
    "lambdas": [10, 25, 50],
}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class RunConfig:
    spec: PotentialSpec
    grid: Grid
    lambdas: tuple
    command: Optional[str] = None
    output_dir: Path = field(default_factory=lambda: Path("."))
    a_override: Optional[float] = None
    epsilon_override: Optional[float] = None
    emit_svg: bool = False


def _real(obj, key, path, *, positive=False):
    if key not in obj:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required key")
    v = obj[key]
    where = f"{path}.{key}" if path else key
    if isinstance(v, bool) or not isinstance(v, numbers.Real) or not math.isfinite(v):
        raise ConfigError(where, f"expected a finite number, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(where, f"must be positive, got {v!r}")
    return float(v)


def _strict(obj, allowed, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected a JSON object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}" if path else unknown[0], "unknown key")


def parse_config(text) -> RunConfig:
    """Validate a UTF-8 JSON document into a ``RunConfig``."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError("", f"not UTF-8: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"malformed JSON: {exc}") from None
    _strict(raw, ("potential", "grid", "lambdas", "a_override", "epsilon_override",
                  "command", "output_dir", "emit_svg"), "")

    for key in ("potential", "grid", "lambdas"):
        if key not in raw:
            raise ConfigError(key, "missing required key")
    pot = raw["potential"]
    _strict(pot, ("p", "beta"), "potential")
    p = _real(pot, "p", "potential")
    beta = _real(pot, "beta", "potential")
    try:
        spec = PotentialSpec(p, beta)
    except ValueError as exc:
        raise ConfigError("potential", str(exc)) from None

    g = raw["grid"]
    _strict(g, ("L", "N"), "grid")
    L = _real(g, "L", "grid", positive=True)
    N = g.get("N")
    if isinstance(N, bool) or not isinstance(N, numbers.Integral):
        raise ConfigError("grid.N", f"expected an integer, got {N!r}")
    if N < 8 or N % 2:
        raise ConfigError("grid.N", f"must be even and >= 8, got {N}")
    grid = Grid(L, int(N))

    lams = raw["lambdas"]
    if not isinstance(lams, list) or not lams:
        raise ConfigError("lambdas", "expected a non-empty list")
    values = []
    for i, v in enumerate(lams):
        if isinstance(v, bool) or not isinstance(v, numbers.Real) or not (math.isfinite(v) and v > 0):
            raise ConfigError(f"lambdas[{i}]", f"expected a positive number, got {v!r}")
        if values and v <= values[-1]:
            raise ConfigError(f"lambdas[{i}]", "lambdas must be strictly increasing")
        values.append(float(v))

    command = raw.get("command")
    if command is not None and command not in COMMANDS:
        raise ConfigError("command", f"expected one of {', '.join(COMMANDS)}")
    a_ov = _real(raw, "a_override", "", positive=True) if raw.get("a_override") is not None else None
    e_ov = None
    if raw.get("epsilon_override") is not None:
        e_ov = _real(raw, "epsilon_override", "", positive=True)
        if e_ov > 1:
            raise ConfigError("epsilon_override", "must lie in (0, 1]")
    out = raw.get("output_dir", ".")
    if not isinstance(out, str) or not out:
        raise ConfigError("output_dir", "expected a non-empty string")
    svg = raw.get("emit_svg", False)
    if not isinstance(svg, bool):
        raise ConfigError("emit_svg", "expected true or false")
    return RunConfig(spec=spec, grid=grid, lambdas=tuple(values), command=command,
                     output_dir=Path(out), a_override=a_ov, epsilon_override=e_ov, emit_svg=svg)


def default_config(command=None) -> RunConfig:
    doc = dict(DEFAULTS)
    if command:
        doc["command"] = command
    return parse_config(json.dumps(doc))
