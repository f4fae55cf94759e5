"""Flat key-value run configuration.

One ``key = value`` per line; ``#`` starts a comment.  Unknown keys and
unparsable values raise ConfigError naming the key.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError, RarelabError
from .smooth import SmoothWaveParams
from .torus import ViscousParams


@dataclass(frozen=True)
class RunConfig:
    gamma: float = 1.4
    mu: float = 0.1
    lam: float = 0.1
    rho_minus: float = 1.0
    rho_plus: float = 3.0
    u1_minus: float = 0.0
    epsilon: float = 0.05
    delta: float | None = None  # overrides rho_plus when set
    d: int = 2
    n1: int = 0  # lower bound on x1 nodes; 0 = derived from L
    n_transverse: int = 16
    L: float | None = None  # None = lambda2^+ t_final + 40
    t_final: float = 20.0
    cfl: float = 0.4
    output_dir: str = "rarelab-out"

    # file key -> attribute
    KEYS = {"lambda": "lam"}

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{self.key_of(f.name)}: value must be finite")
        if self.gamma < 1:
            raise ConfigError("gamma: must be >= 1")
        if self.mu <= 0 or 2 * self.mu + self.lam <= 0:
            raise ConfigError("mu/lambda: need mu > 0 and 2 mu + lambda > 0")
        if self.rho_minus <= 0:
            raise ConfigError("rho_minus: must be positive")
        if self.delta is not None and self.delta <= 0:
            raise ConfigError("delta: must be positive")
        if self.delta is None and self.rho_plus <= self.rho_minus:
            raise ConfigError("rho_plus: must exceed rho_minus")
        if self.d not in (1, 2, 3):
            raise ConfigError("d: must be 1, 2 or 3")
        n = self.n_transverse
        if n < 16 or n & (n - 1):
            raise ConfigError("n_transverse: must be a power of two >= 16")
        if self.t_final <= 0:
            raise ConfigError("t_final: must be positive")
        if not 0 < self.cfl <= 0.5:
            raise ConfigError("cfl: must lie in (0, 0.5]")
        if self.n1 < 0:
            raise ConfigError("n1: must be non-negative")
        if self.L is not None and self.L < self.min_half_length:
            raise ConfigError(f"L: must be >= lambda2^+ t_final + 40 = {self.min_half_length:.6g}")

    @staticmethod
    def key_of(attr: str) -> str:
        return {v: k for k, v in RunConfig.KEYS.items()}.get(attr, attr)

    @property
    def rho_plus_eff(self) -> float:
        return self.rho_minus + self.delta if self.delta is not None else self.rho_plus

    @property
    def delta_eff(self) -> float:
        return self.rho_plus_eff - self.rho_minus

    @property
    def theta(self) -> float:
        """Target for supnorm_to_fan at t_final."""
        return 0.1 * self.delta_eff

    def wave(self) -> SmoothWaveParams:
        try:
            return SmoothWaveParams.from_densities(self.rho_minus, self.rho_plus_eff,
                                                   self.u1_minus, self.gamma)
        except RarelabError as exc:
            raise ConfigError(f"rho_minus/rho_plus/u1_minus: {exc}") from exc

    def viscous(self) -> ViscousParams:
        return ViscousParams(self.mu, self.lam)

    @property
    def min_half_length(self) -> float:
        return self.wave().states.lambda2_plus * self.t_final + 40.0

    @property
    def half_length(self) -> float:
        L = self.L if self.L is not None else self.min_half_length
        return max(L, (self.n1 - 1) / (2.0 * self.n_transverse))

    def echo(self) -> str:
        """Canonical text form; parses back to an equal config."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            out.append(f"{self.key_of(f.name)} = {v!r}" if not isinstance(v, str)
                       else f"{self.key_of(f.name)} = {v}")
        return "\n".join(out) + "\n"


_INT_KEYS = {"d", "n1", "n_transverse"}
_STR_KEYS = {"output_dir"}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    known = {RunConfig.key_of(f.name): f.name for f in fields(RunConfig)}
    vals = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"unknown configuration key {key!r}")
        try:
            if key in _STR_KEYS:
                v = val
            elif key in _INT_KEYS:
                v = int(val)
            elif val.lower() in ("", "none"):
                v = None
            else:
                v = float(val)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {val!r}") from None
        vals[known[key]] = v
    return replace(base or RunConfig(), **vals)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
