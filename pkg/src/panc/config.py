"""Experiment configuration, the three relay placements and a key/value
text format that round-trips."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

SCHEMES = ("OriginOpt", "CtOpt", "Random", "Fixed", "Genie", "CXNC", "CXNCAlpha")
PANC_SCHEMES = SCHEMES[:5]
METHODS = ("mc", "exact", "ct")

_R3 = math.sqrt(3.0) / 3.0
RELAY_POSITIONS = {
    "strong_sr": (0.0, 0.0),
    "symmetric": (1.0 / 3.0, 0.0),
    "strong_rd": (0.8, 0.0),
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _grid(lo, hi, step):
    return tuple(float(x) for x in range(lo, hi + 1, step))


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "symmetric"
    s1: tuple = (0.0, _R3)
    s2: tuple = (0.0, -_R3)
    dest: tuple = (1.0, 0.0)
    relay: tuple = RELAY_POSITIONS["symmetric"]
    pathloss_exponent: float = 3.0
    snr_db: tuple = field(default_factory=lambda: _grid(0, 30, 2))
    schemes: tuple = SCHEMES
    methods: tuple = ("mc", "exact")
    n_channels: int = 10_000
    n_symbols: int = 1_000
    analytic_channels: int = 200
    seed: int = 1
    er_ave: float = 1.0
    use_alpha: bool = True
    alpha_mode: str = "instantaneous"
    block_size: int = 256
    workers: int = 1
    out: str = "sweep.csv"

    def validate(self):
        pts = {"s1": self.s1, "s2": self.s2, "dest": self.dest, "relay": self.relay}
        for k, v in pts.items():
            if len(v) != 2 or not all(math.isfinite(x) for x in v):
                raise ConfigError(f"{k} must be a finite 2-D point")
        names = list(pts)
        for i in range(4):
            for j in range(i + 1, 4):
                if tuple(pts[names[i]]) == tuple(pts[names[j]]):
                    raise ConfigError(f"{names[i]} and {names[j]} coincide")
        if self.pathloss_exponent <= 0:
            raise ConfigError("pathloss_exponent must be positive")
        if not self.snr_db:
            raise ConfigError("empty SNR grid")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("SNR grid must be strictly increasing")
        if not self.schemes:
            raise ConfigError("empty scheme list")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad:
            raise ConfigError(f"unknown schemes {bad}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("duplicate schemes")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ConfigError(f"methods must be drawn from {METHODS}")
        if self.n_channels <= 0 or self.n_symbols <= 0:
            raise ConfigError("trials must be positive")
        if not 0 <= self.analytic_channels <= self.n_channels:
            raise ConfigError("analytic_channels must lie in [0, n_channels]")
        if self.er_ave <= 0:
            raise ConfigError("er_ave must be positive")
        if self.alpha_mode not in ("instantaneous", "statistical"):
            raise ConfigError("alpha_mode must be instantaneous or statistical")
        if self.block_size <= 0 or self.workers <= 0:
            raise ConfigError("block_size and workers must be positive")
        return self

    @property
    def trials(self):
        return self.n_channels * self.n_symbols

    def replace(self, **kw):
        return dataclasses.replace(self, **kw)

    # key/value text format

    def to_text(self):
        lines = []
        for f in dataclasses.fields(self):
            lines.append(f"{f.name} = {_fmt(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        types = {f.name: f for f in dataclasses.fields(cls)}
        defaults = cls()
        kw = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            try:
                kw[key] = _parse(val, getattr(defaults, key))
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from None
        return cls(**kw)

    def dump(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read())


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(text, like):
    if isinstance(like, bool):
        low = text.lower()
        if low not in ("true", "false"):
            raise ValueError(f"expected true/false, got {text!r}")
        return low == "true"
    if isinstance(like, tuple):
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if like and isinstance(like[0], str) or like == ():
            return tuple(parts)
        return tuple(float(p) for p in parts)
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    return text


def preset(name, **overrides) -> ExperimentConfig:
    if name not in RELAY_POSITIONS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(RELAY_POSITIONS)}")
    cfg = ExperimentConfig(name=name, relay=RELAY_POSITIONS[name])
    return cfg.replace(**overrides).validate() if overrides else cfg.validate()
