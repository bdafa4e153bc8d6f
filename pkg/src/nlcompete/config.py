"""Flat key-value scenario configuration.

Format: one `key = value` per line, dotted keys for sections, `#` starts a
comment.  Unknown keys, duplicates, and malformed values are rejected with
the offending line number; parsing never raises anything but ConfigError.

Example::

    grid.n = 200
    kernel.u = tophat 0.3
    coef.m = cosine offset=1 amplitude=0.3 frequency=1
    coef.b = const 0.5
    init.u = random lo=0.05 hi=0.65 modes=4
    rng.seed = 42
    sweep.b = linspace 0.25 1.75 7
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .competition import ModelParams
from .errors import ConfigError
from .grid import SpatialGrid, build_grid
from .kernels import KernelSpec
from .operators import BoundaryRegime, DispersalOperator, assemble_dispersal
from .profiles import ProfileSpec, init_rng, random_positive_profile

SWEEPABLE = ("b", "c", "d", "D", "alpha", "beta")

_COEF_DEFAULTS = {
    "m": ProfileSpec("const", {"value": 1.0}),
    "M": ProfileSpec("const", {"value": 1.0}),
    "b": ProfileSpec("const", {"value": 0.5}),
    "c": ProfileSpec("const", {"value": 0.5}),
    "b1": ProfileSpec("const", {"value": 1.0}),
    "c1": ProfileSpec("const", {"value": 1.0}),
}


@dataclass(frozen=True)
class InitSpec:
    kind: str  # const | profile | random
    profile: ProfileSpec | None = None
    lo: float = 0.1
    hi: float = 1.0
    modes: int = 4

    def realize(self, grid: SpatialGrid, rng) -> np.ndarray:
        if self.kind == "random":
            return random_positive_profile(rng, grid, self.lo, self.hi, self.modes)
        vals = self.profile.evaluate(grid)
        if np.any(vals < 0):
            raise ConfigError("initial-data profile takes negative values")
        return vals


@dataclass
class ScenarioConfig:
    path: str
    grid_lo: float = 0.0
    grid_hi: float = 1.0
    grid_n: int = 200
    regime: str = "noflux"
    kernel_u: KernelSpec = field(default_factory=lambda: KernelSpec("tophat", 0.3))
    kernel_v: KernelSpec = field(default_factory=lambda: KernelSpec("tophat", 0.3))
    rate_d: float = 1.0
    rate_D: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0
    coefs: dict = field(default_factory=lambda: dict(_COEF_DEFAULTS))
    init_u: InitSpec = field(default_factory=lambda: InitSpec("random"))
    init_v: InitSpec = field(default_factory=lambda: InitSpec("random"))
    horizon: float = 200.0
    n_inits: int = 8
    s_samples: int = 11
    verify: bool = True
    bracket_delta: float = 0.01
    bracket_eps: float = 0.01
    init_lo: float = 0.1
    init_hi: float = 1.0
    modes: int = 4
    rng_algorithm: str = "pcg64"
    seed: int = 42
    figures: bool = True
    sweep: dict = field(default_factory=dict)  # name -> list of floats
    sweep_filter: str = "none"

    def build_grid(self, n: int | None = None) -> SpatialGrid:
        return build_grid(self.grid_lo, self.grid_hi, n or self.grid_n)

    def _regime(self, grid: SpatialGrid) -> BoundaryRegime:
        if self.regime == "periodic":
            return BoundaryRegime.periodic(grid.span)
        return BoundaryRegime(self.regime)

    def build_operators(self, grid: SpatialGrid, overrides: dict | None = None):
        ov = overrides or {}
        reg = self._regime(grid)
        op_u = assemble_dispersal(
            self.kernel_u, grid, reg, ov.get("d", self.rate_d), ov.get("alpha", self.alpha)
        )
        op_v = assemble_dispersal(
            self.kernel_v, grid, reg, ov.get("D", self.rate_D), ov.get("beta", self.beta)
        )
        return op_u, op_v

    def build_params(
        self, grid: SpatialGrid | None = None, overrides: dict | None = None
    ) -> ModelParams:
        grid = grid or self.build_grid()
        ov = overrides or {}
        op_u, op_v = self.build_operators(grid, ov)
        fields = {}
        for name in ("m", "M", "b", "c", "b1", "c1"):
            if name in ov:
                fields[name] = np.full(grid.n, float(ov[name]))
            else:
                fields[name] = self.coefs[name].evaluate(grid)
        return ModelParams(op_u=op_u, op_v=op_v, **fields)

    def initial_pair(self, grid: SpatialGrid, stream: int = 0):
        rng = init_rng(self.seed, stream)
        return self.init_u.realize(grid, rng), self.init_v.realize(grid, rng)

    def sweep_rows(self):
        """Cartesian product of the sweep axes, in declaration order."""
        if not self.sweep:
            raise ConfigError("sweep requested but no sweep axes configured")
        names = list(self.sweep)
        grids = [self.sweep[n] for n in names]
        if any(len(g) == 0 for g in grids):
            raise ConfigError("sweep axis with an empty range")
        rows = []
        for combo in itertools.product(*grids):
            row = dict(zip(names, combo))
            if self.sweep_filter == "weak":
                b = row.get("b", self._const_coef("b"))
                c = row.get("c", self._const_coef("c"))
                b1 = self._const_coef("b1")
                c1 = self._const_coef("c1")
                if b * c > b1 * c1 + 1e-12:
                    continue
            rows.append(row)
        return names, rows

    def _const_coef(self, name):
        spec = self.coefs[name]
        if spec.kind != "const":
            raise ConfigError(
                f"sweep filtering needs constant coefficient {name}, got {spec.kind}"
            )
        return spec.params["value"]


def _parse_float(tok: str) -> float:
    val = float(tok)
    if not np.isfinite(val):
        raise ConfigError(f"non-finite number {tok!r}")
    return val


def _parse_kv(tokens):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = _parse_float(v)
    return out


def _parse_profile(value: str) -> ProfileSpec:
    tokens = value.split()
    if not tokens:
        raise ConfigError("empty profile")
    kind = tokens[0]
    if kind == "const":
        if len(tokens) != 2:
            raise ConfigError("const profile takes exactly one value")
        return ProfileSpec("const", {"value": _parse_float(tokens[1])})
    return ProfileSpec(kind, _parse_kv(tokens[1:]))


def _parse_kernel(value: str) -> KernelSpec:
    tokens = value.split()
    if len(tokens) != 2:
        raise ConfigError("kernel spec is 'family width'")
    return KernelSpec(tokens[0], _parse_float(tokens[1]))


def _parse_init(value: str) -> InitSpec:
    tokens = value.split()
    if not tokens:
        raise ConfigError("empty init spec")
    if tokens[0] == "const":
        if len(tokens) != 2:
            raise ConfigError("const init takes exactly one value")
        return InitSpec("profile", ProfileSpec("const", {"value": _parse_float(tokens[1])}))
    if tokens[0] == "random":
        kv = _parse_kv(tokens[1:])
        return InitSpec(
            "random",
            lo=kv.get("lo", 0.1),
            hi=kv.get("hi", 1.0),
            modes=int(kv.get("modes", 4)),
        )
    return InitSpec("profile", _parse_profile(value))


def _parse_range(value: str):
    tokens = value.split()
    if not tokens:
        raise ConfigError("empty sweep range")
    if tokens[0] == "linspace":
        if len(tokens) != 4:
            raise ConfigError("linspace takes start stop count")
        start, stop = _parse_float(tokens[1]), _parse_float(tokens[2])
        count = int(tokens[3])
        if count < 1:
            raise ConfigError("linspace count must be at least 1")
        return [float(x) for x in np.linspace(start, stop, count)]
    if tokens[0] == "list":
        return [_parse_float(t) for t in tokens[1:]]
    raise ConfigError(f"unknown sweep range kind {tokens[0]!r}")


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("on", "true", "yes", "1"):
        return True
    if v in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"expected on/off, got {value!r}")


def parse_config_text(text: str, path: str = "<string>") -> ScenarioConfig:
    cfg = ScenarioConfig(path=path)
    cfg.coefs = dict(_COEF_DEFAULTS)
    cfg.sweep = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if "=" not in line:
                raise ConfigError("expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigError("empty key")
            if key in seen:
                raise ConfigError(f"duplicate key {key!r}")
            seen.add(key)
            _apply_key(cfg, key, value)
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        except Exception as exc:  # total parsing: everything becomes ConfigError
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return cfg


def _apply_key(cfg: ScenarioConfig, key: str, value: str):
    if key == "grid.lo":
        cfg.grid_lo = _parse_float(value)
    elif key == "grid.hi":
        cfg.grid_hi = _parse_float(value)
    elif key == "grid.n":
        cfg.grid_n = int(value)
    elif key == "regime":
        if value not in ("noflux", "hostile", "periodic"):
            raise ConfigError(f"unknown regime {value!r}")
        cfg.regime = value
    elif key == "kernel.u":
        cfg.kernel_u = _parse_kernel(value)
    elif key == "kernel.v":
        cfg.kernel_v = _parse_kernel(value)
    elif key == "rates.d":
        cfg.rate_d = _parse_float(value)
    elif key == "rates.D":
        cfg.rate_D = _parse_float(value)
    elif key == "mix.alpha":
        cfg.alpha = _parse_float(value)
    elif key == "mix.beta":
        cfg.beta = _parse_float(value)
    elif key.startswith("coef."):
        name = key[5:]
        if name not in _COEF_DEFAULTS:
            raise ConfigError(f"unknown coefficient {name!r}")
        cfg.coefs[name] = _parse_profile(value)
    elif key == "init.u":
        cfg.init_u = _parse_init(value)
    elif key == "init.v":
        cfg.init_v = _parse_init(value)
    elif key == "controls.horizon":
        cfg.horizon = _parse_float(value)
        if cfg.horizon <= 0:
            raise ConfigError("horizon must be positive")
    elif key == "controls.n_inits":
        cfg.n_inits = int(value)
        if cfg.n_inits < 1:
            raise ConfigError("n_inits must be at least 1")
    elif key == "controls.s_samples":
        cfg.s_samples = int(value)
        if cfg.s_samples < 2:
            raise ConfigError("s_samples must be at least 2")
    elif key == "controls.verify":
        cfg.verify = _parse_bool(value)
    elif key == "controls.bracket_delta":
        cfg.bracket_delta = _parse_float(value)
    elif key == "controls.bracket_eps":
        cfg.bracket_eps = _parse_float(value)
    elif key == "controls.init_lo":
        cfg.init_lo = _parse_float(value)
    elif key == "controls.init_hi":
        cfg.init_hi = _parse_float(value)
    elif key == "controls.modes":
        cfg.modes = int(value)
    elif key == "rng.algorithm":
        if value != "pcg64":
            raise ConfigError(f"unsupported rng algorithm {value!r}; only pcg64")
        cfg.rng_algorithm = value
    elif key == "rng.seed":
        cfg.seed = int(value)
        if cfg.seed < 0:
            raise ConfigError("seed must be nonnegative")
    elif key == "output.figures":
        cfg.figures = _parse_bool(value)
    elif key.startswith("sweep."):
        name = key[6:]
        if name == "filter":
            if value not in ("none", "weak"):
                raise ConfigError(f"unknown sweep filter {value!r}")
            cfg.sweep_filter = value
        elif name in SWEEPABLE:
            cfg.sweep[name] = _parse_range(value)
        else:
            raise ConfigError(f"parameter {name!r} is not sweepable")
    else:
        raise ConfigError(f"unknown key {key!r}")


def parse_config(path) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, str(path))
