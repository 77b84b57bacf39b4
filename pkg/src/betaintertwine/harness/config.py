"""Run configuration: defaults, INI files and command-line overrides."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

SUITES = ("generator", "semigroup", "kernel", "sde", "ensemble")


class ConfigError(ValueError):
    """Malformed or out-of-domain configuration."""


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _ints(text):
    return tuple(int(v) for v in text.replace(",", " ").split())


def _pairs(text):
    # "1:1, 2:2, 2.5:1.5"
    out = []
    for item in text.replace(",", " ").split():
        a, _, b = item.partition(":")
        if not b:
            raise ConfigError(f"expected a:b pairs, got {item!r}")
        out.append((float(a), float(b)))
    return tuple(out)


@dataclass(frozen=True)
class Grid:
    """Parameter sweeps shared by the algebraic suites."""

    thetas: tuple = (0.5, 0.75, 1.0, 1.5, 2.0)
    ds: tuple = (2.0, 3.0, 5.5)
    jacobi: tuple = ((1.0, 1.0), (2.0, 2.0), (2.5, 1.5))
    ns: tuple = (1, 2, 3)
    max_weight: int = 5
    times: tuple = (0.1, 1.0, 5.0)
    identity_thetas: tuple = (0.5, 0.75, 1.0, 2.0)
    identity_max_weight: int = 6
    identity_max_n: int = 5
    operator_max_weight: int = 4
    operator_max_n: int = 4
    kernel_thetas: tuple = (0.5, 1.0, 2.0)
    kernel_max_weight: int = 4
    kernel_max_n: int = 3


@dataclass(frozen=True)
class Budget:
    paths: int = 10_000
    dt: float = 0.01
    bias_paths: int = 100_000
    bias_dt: float = 0.1
    samples: int = 100_000
    kernel_samples: int = 100_000
    nodes: int = 48


@dataclass(frozen=True)
class Tolerances:
    generator: float = 1e-10
    semigroup: float = 1e-9
    identities: float = 1e-12
    operator: float = 1e-9
    kernel: float = 1e-6
    corollary: float = 1e-6
    nse: float = 3.0


@dataclass(frozen=True)
class RunConfig:
    suite: str = "all"
    seed: int = 20240611
    output: str | None = None
    control: bool = False
    grid: Grid = field(default_factory=Grid)
    budget: Budget = field(default_factory=Budget)
    tolerances: Tolerances = field(default_factory=Tolerances)

    def suites(self) -> tuple[str, ...]:
        return SUITES if self.suite == "all" else (self.suite,)

    def validate(self) -> "RunConfig":
        if self.suite not in SUITES + ("all",):
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {SUITES + ('all',)}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        g, b = self.grid, self.budget
        if any(t < 0.5 for t in g.thetas + g.identity_thetas + g.kernel_thetas):
            raise ConfigError("theta values must be >= 0.5 (beta >= 1)")
        if any(n < 1 for n in g.ns) or g.max_weight < 0 or g.kernel_max_n > 3:
            raise ConfigError("n must be >= 1, weights >= 0, kernel quadrature needs n <= 3")
        if any(t < 0 for t in g.times):
            raise ConfigError("times must be nonnegative")
        if any(d < 2 for d in g.ds) or any(min(p) < 1 for p in g.jacobi):
            raise ConfigError("intertwining grids need d >= 2 and a, b >= 1")
        if b.paths < 2 or b.samples < 2 or b.bias_paths < 2 or b.dt <= 0 or b.bias_dt <= 0:
            raise ConfigError("budgets must be positive (at least two paths/samples)")
        return self


_PARSERS = {
    "thetas": _floats, "ds": _floats, "jacobi": _pairs, "ns": _ints, "times": _floats,
    "identity_thetas": _floats, "kernel_thetas": _floats,
}


def _coerce(cls, key, text):
    names = {f.name: f for f in fields(cls)}
    if key not in names:
        raise ConfigError(f"unknown key {key!r} for [{cls.__name__.lower()}]")
    try:
        if key in _PARSERS:
            return _PARSERS[key](text)
        default = getattr(cls(), key)
        if isinstance(default, bool):
            return text.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(float(text)) if "e" in text.lower() else int(text)
        return float(text)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {text!r}") from exc


def _update(obj, items):
    cls = type(obj)
    return replace(obj, **{k: _coerce(cls, k, v) for k, v in items})


def apply_overrides(config: RunConfig, overrides) -> RunConfig:
    """Apply ``section.key=value`` (or bare ``key=value`` for the grid) overrides."""
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        section, _, name = key.strip().rpartition(".")
        section = section or "grid"
        if section not in ("grid", "budget", "tolerances"):
            raise ConfigError(f"unknown section {section!r}")
        sub = getattr(config, section)
        config = replace(config, **{section: _update(sub, [(name, value.strip())])})
    return config


def load_config(path=None, base: RunConfig | None = None) -> RunConfig:
    """Read an INI file with optional ``[run]``, ``[grid]``, ``[budget]`` and ``[tolerances]`` sections."""
    config = base or RunConfig()
    if path is None:
        return config
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for section in parser.sections():
        items = list(parser.items(section))
        if section == "run":
            kw = {}
            for k, v in items:
                if k == "suite":
                    kw["suite"] = v.strip()
                elif k == "seed":
                    try:
                        kw["seed"] = int(v)
                    except ValueError as exc:
                        raise ConfigError(f"bad seed {v!r}") from exc
                elif k in ("output", "out"):
                    kw["output"] = v.strip()
                elif k == "control":
                    kw["control"] = v.strip().lower() in ("1", "true", "yes", "on")
                else:
                    raise ConfigError(f"unknown key {k!r} in [run]")
            config = replace(config, **kw)
        elif section in ("grid", "budget", "tolerances"):
            config = replace(config, **{section: _update(getattr(config, section), items)})
        else:
            raise ConfigError(f"unknown section [{section}]")
    return config
