"""Experiment configuration: a TOML file, validated before anything runs.

Schema (all sections except ``group`` are optional)::

    kind = "wiener"            # identities | frames | almost-diag | wiener | section6
    seed = 0

    [group]
    moduli = [12]

    [lattice]                  # Lambda = prod a_j Z_{N_j} x prod b_j Z_{N_j}
    pos_steps = [2]
    freq_steps = [2]

    [window]
    type = "gaussian"          # delta | subgroup-indicator | gaussian | random | csv
    steps = [4]                # subgroup-indicator only
    width = [3.0]              # gaussian only, optional
    path = "g.csv"             # csv only (index, re, im)
    tight = true               # replace g by the tight window S^{-1/2} g when possible

    [weight]                   # on G x G^ (section6: on G)
    type = "polynomial"        # constant | polynomial | subexponential
    s = 1.0
    a = 1.0                    # subexponential: exp(a |z|^b) (1 + |z|)^s
    b = 0.5

    [symbol]
    type = "random"            # identity | shift | neumann | random | csv
    x = [1]                    # shift: pi(x, xi); neumann: 2 I + T_x
    xi = [0]
    decay = 1.0                # random: spreading envelope exp(-decay d(omega, u))
    scale = 1.0
    plus_identity = false      # random: add the identity symbol (well-conditioned)
    count = 1                  # random: number of symbols drawn
    path = "sigma.csv"         # csv: rows x, xi, re, im

    [tolerances]               # override the defaults in DEFAULT_TOLERANCES
    identity = 1e-10

    [output]
    dir = "out"                # relative to the config file
    save_symbols = false
    save_window = false
    seeds = 100                # identities: number of random draws

Paths are resolved relative to the config file.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

KINDS = ("identities", "frames", "almost-diag", "wiener", "section6")
WINDOWS = ("delta", "subgroup-indicator", "gaussian", "random", "csv")
WEIGHTS = ("constant", "polynomial", "subexponential")
SYMBOLS = ("identity", "shift", "neumann", "random", "csv")

DEFAULT_TOLERANCES = {
    "identity": 1e-10,     # transform and calculus identities
    "frame": 1e-10,        # tight frame bounds equal 1
    "factorization": 1e-10,
    "domination": 1e-12,   # relative slack in |M| <= h
    "inverse": 1e-10,
    "pinv": 1e-8,
    "section6": 1e-12,
}

_SECTIONS = {
    "group": {"moduli"},
    "lattice": {"pos_steps", "freq_steps"},
    "window": {"type", "steps", "width", "path", "tight"},
    "weight": {"type", "s", "a", "b"},
    "symbol": {"type", "x", "xi", "decay", "scale", "plus_identity", "count", "path"},
    "tolerances": set(DEFAULT_TOLERANCES),
    "output": {"dir", "save_symbols", "save_window", "seeds"},
}


class ConfigError(ValueError):
    pass


def _ints(name, value, length=None) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool)
                                              for v in value):
        raise ConfigError(f"{name} must be a list of integers, got {value!r}")
    if length is not None and len(value) != length:
        raise ConfigError(f"{name} needs {length} entries, got {len(value)}")
    return tuple(value)


def _num(name, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}")
    return float(value)


@dataclass
class ExperimentConfig:
    kind: str
    moduli: tuple[int, ...]
    seed: int = 0
    pos_steps: tuple[int, ...] | None = None
    freq_steps: tuple[int, ...] | None = None
    window: dict = field(default_factory=lambda: {"type": "gaussian", "tight": True})
    weight: dict = field(default_factory=lambda: {"type": "constant"})
    symbol: dict = field(default_factory=lambda: {"type": "identity"})
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output: dict = field(default_factory=dict)
    source: Path | None = None

    @property
    def base_dir(self) -> Path:
        return self.source.parent if self.source is not None else Path.cwd()

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def output_dir(self) -> Path:
        default = (self.source.stem + "_out") if self.source is not None else "out"
        return self.resolve(self.output.get("dir", default))

    def as_dict(self) -> dict:
        """Echo of the validated settings, as stored in the report."""
        return {
            "kind": self.kind, "seed": self.seed, "moduli": list(self.moduli),
            "pos_steps": list(self.pos_steps) if self.pos_steps else None,
            "freq_steps": list(self.freq_steps) if self.freq_steps else None,
            "window": self.window, "weight": self.weight, "symbol": self.symbol,
            "tolerances": self.tolerances,
        }


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"no such config file: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None
    return parse_config(raw, source=path)


def parse_config(raw: dict, source: Path | None = None) -> ExperimentConfig:
    unknown = set(raw) - set(_SECTIONS) - {"kind", "seed"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    for sec, keys in _SECTIONS.items():
        if sec in raw:
            if not isinstance(raw[sec], dict):
                raise ConfigError(f"[{sec}] must be a table")
            bad = set(raw[sec]) - keys
            if bad:
                raise ConfigError(f"unknown keys in [{sec}]: {sorted(bad)}")

    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a nonnegative integer, got {seed!r}")
    if "group" not in raw or "moduli" not in raw["group"]:
        raise ConfigError("[group] moduli is required")
    moduli = _ints("group.moduli", raw["group"]["moduli"])
    if not moduli or any(m < 1 for m in moduli):
        raise ConfigError(f"moduli must be positive, got {list(moduli)}")
    r = len(moduli)

    cfg = ExperimentConfig(kind=kind, moduli=moduli, seed=seed, source=source)

    lat = raw.get("lattice")
    if lat is not None:
        cfg.pos_steps = _ints("lattice.pos_steps", lat.get("pos_steps", [1] * r), r)
        cfg.freq_steps = _ints("lattice.freq_steps", lat.get("freq_steps", [1] * r), r)
        for name, steps in (("pos_steps", cfg.pos_steps), ("freq_steps", cfg.freq_steps)):
            for c, m in zip(steps, moduli):
                if c < 1 or m % c:
                    raise ConfigError(f"lattice.{name}: step {c} does not divide modulus {m}")
    elif kind in ("frames", "almost-diag", "wiener"):
        raise ConfigError(f"kind={kind} needs a [lattice] section")

    win = dict(raw.get("window", {"type": "gaussian"}))
    win.setdefault("type", "gaussian")
    win.setdefault("tight", True)
    if win["type"] not in WINDOWS:
        raise ConfigError(f"window.type must be one of {WINDOWS}")
    if not isinstance(win["tight"], bool):
        raise ConfigError("window.tight must be true or false")
    if win["type"] == "subgroup-indicator":
        steps = _ints("window.steps", win.get("steps", []), r)
        for c, m in zip(steps, moduli):
            if c < 1 or m % c:
                raise ConfigError(f"window.steps: {c} does not divide {m}")
        win["steps"] = list(steps)
    if win["type"] == "gaussian" and "width" in win:
        w = win["width"]
        w = [w] * r if not isinstance(w, list) else w
        if len(w) != r or any(_num("window.width", x) <= 0 for x in w):
            raise ConfigError("window.width must be positive, one per factor")
        win["width"] = [float(x) for x in w]
    if win["type"] == "csv":
        if "path" not in win:
            raise ConfigError("window.type = csv needs a path")
        if source is not None and not cfg.resolve(win["path"]).exists():
            raise ConfigError(f"window file not found: {win['path']}")
    cfg.window = win

    wt = dict(raw.get("weight", {"type": "constant"}))
    wt.setdefault("type", "constant")
    if wt["type"] not in WEIGHTS:
        raise ConfigError(f"weight.type must be one of {WEIGHTS}")
    if wt["type"] in ("polynomial", "subexponential"):
        wt["s"] = _num("weight.s", wt.get("s", 0.0))
        if wt["s"] < 0:
            raise ConfigError("weight.s must be >= 0 for a submultiplicative weight")
    if wt["type"] == "subexponential":
        wt["a"] = _num("weight.a", wt.get("a", 1.0))
        wt["b"] = _num("weight.b", wt.get("b", 0.5))
        if wt["a"] <= 0 or not 0 < wt["b"] < 1:
            raise ConfigError("subexponential weight needs a > 0 and 0 < b < 1")
    cfg.weight = wt

    sym = dict(raw.get("symbol", {"type": "identity"}))
    sym.setdefault("type", "identity")
    if sym["type"] not in SYMBOLS:
        raise ConfigError(f"symbol.type must be one of {SYMBOLS}")
    if sym["type"] in ("shift", "neumann"):
        sym["x"] = list(_ints("symbol.x", sym.get("x", [0] * r), r))
        sym["xi"] = list(_ints("symbol.xi", sym.get("xi", [0] * r), r))
        if any(not 0 <= c < m for c, m in zip(sym["x"] + sym["xi"], moduli + moduli)):
            raise ConfigError("symbol.x / symbol.xi coordinates out of range")
    if sym["type"] == "random":
        sym["decay"] = _num("symbol.decay", sym.get("decay", 1.0))
        sym["scale"] = _num("symbol.scale", sym.get("scale", 1.0))
        sym.setdefault("plus_identity", False)
        count = sym.setdefault("count", 1)
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise ConfigError("symbol.count must be a positive integer")
        if sym["decay"] < 0:
            raise ConfigError("symbol.decay must be >= 0")
    if sym["type"] == "csv":
        if "path" not in sym:
            raise ConfigError("symbol.type = csv needs a path")
        if source is not None and not cfg.resolve(sym["path"]).exists():
            raise ConfigError(f"symbol file not found: {sym['path']}")
    cfg.symbol = sym

    tol = dict(DEFAULT_TOLERANCES)
    for k, val in raw.get("tolerances", {}).items():
        tol[k] = _num(f"tolerances.{k}", val)
        if tol[k] <= 0:
            raise ConfigError(f"tolerances.{k} must be positive")
    cfg.tolerances = tol

    out = dict(raw.get("output", {}))
    seeds = out.get("seeds", 100)
    if isinstance(seeds, bool) or not isinstance(seeds, int) or seeds < 1:
        raise ConfigError("output.seeds must be a positive integer")
    cfg.output = out

    if kind == "section6" and r != 1:
        raise ConfigError("kind=section6 needs a single cyclic factor")
    return cfg
