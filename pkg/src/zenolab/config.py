"""Experiment configuration files.

The format is INI (``configparser``): four sections of ``key = value`` lines,
``;`` or ``#`` comments, lists separated by commas. See ``configs/`` and the
README for the full grammar. Example::

    [model]
    preset = xy            ; xy | two-level
    J = 1.0
    h = 0.5
    lo = -2
    hi = 2
    beta = 1.0

    [zeno]
    site = 0
    amplitude0 = 1.0, 0.0  ; re, im
    amplitude1 = 1.0, 0.0

    [experiment]
    name = zeno-converge
    t = 1.0
    n = 10, 20, 40
    seed = 0

    [output]
    format = csv
    directory = results
"""

from __future__ import annotations

import configparser
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lattice import DENSE_MAX_SITES, ChainGeometry, SitePureState, XYParameters

log = logging.getLogger(__name__)

EXPERIMENTS = (
    "azc",
    "zeno-converge",
    "continuous",
    "gibbs-product",
    "kms",
    "rw-entropy",
    "rte-dense",
    "rte-quasifree",
    "complex-zeno",
)
PRESETS = ("xy", "two-level")
FORMATS = ("csv", "json")
XY_ONLY = ("gibbs-product", "rte-dense", "rte-quasifree")


class ConfigError(ValueError):
    """Invalid configuration; the runner exits with status 2."""


@dataclass(frozen=True)
class ModelSection:
    preset: str = "xy"
    J: float = 1.0
    h: float = 0.5
    lo: int = -2
    hi: int = 2
    beta: float = 1.0

    @property
    def params(self) -> XYParameters:
        return XYParameters(self.J, self.h)

    @property
    def geometry(self) -> ChainGeometry:
        return ChainGeometry(self.lo, self.hi)


@dataclass(frozen=True)
class ZenoSection:
    site: int = 0
    amplitudes: tuple[complex, complex] = (1.0, 0.0)

    @property
    def state(self) -> SitePureState:
        return SitePureState(self.amplitudes)


@dataclass(frozen=True)
class ExperimentSection:
    name: str
    t: tuple[float, ...] = (1.0,)
    n: tuple[int, ...] = (8, 16, 32, 64)
    K: tuple[float, ...] = (10.0, 100.0, 1000.0)
    betas: tuple[float, ...] = ()
    window: tuple[float, float, int] = (0.0, 10.0, 101)
    N: int = 1001
    sites: tuple[int, ...] = (0,)
    levels: int = 6
    t_max: float | None = None
    trials: int = 100
    pairs: int = 20
    zeno: bool = False
    target: str = "gibbs"

    @property
    def times(self) -> np.ndarray:
        start, stop, count = self.window
        return np.linspace(start, stop, int(count))


@dataclass(frozen=True)
class OutputSection:
    format: str = "csv"
    directory: str = "results"


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSection
    zeno: ZenoSection
    experiment: ExperimentSection
    output: OutputSection
    seed: int = 0
    fingerprint: str = field(default="", compare=False)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _complex(text: str) -> complex:
    parts = _floats(text)
    if len(parts) != 2:
        raise ConfigError(f"amplitude must be 're, im', got {text!r}")
    return complex(parts[0], parts[1])


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keep J / K / N case
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from exc
    if not parser.has_section("experiment") or "name" not in parser["experiment"]:
        raise ConfigError("config needs an [experiment] section with a name")

    try:
        m = parser["model"] if parser.has_section("model") else {}
        model = ModelSection(
            preset=m.get("preset", "xy").strip(),
            J=float(m.get("J", 1.0)),
            h=float(m.get("h", 0.5)),
            lo=int(m.get("lo", -2)),
            hi=int(m.get("hi", 2)),
            beta=float(m.get("beta", 1.0)),
        )
        z = parser["zeno"] if parser.has_section("zeno") else {}
        amps = np.array(
            [_complex(z.get("amplitude0", "1, 0")), _complex(z.get("amplitude1", "0, 0"))]
        )
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ConfigError("zeno amplitudes vanish")
        if abs(norm - 1.0) > 1e-9:
            log.warning("zeno amplitudes have norm %.12g; normalizing", norm)
        amps = amps / norm
        zeno = ZenoSection(site=int(z.get("site", 0)), amplitudes=(complex(amps[0]), complex(amps[1])))

        e = parser["experiment"]
        kwargs = {"name": e["name"].strip()}
        for key, conv in (("t", _floats), ("K", _floats), ("betas", _floats), ("n", _ints), ("sites", _ints)):
            if key in e:
                kwargs[key] = conv(e[key])
        if "window" in e:
            w = _floats(e["window"])
            if len(w) != 3:
                raise ConfigError("window must be 'start, stop, count'")
            kwargs["window"] = (w[0], w[1], int(w[2]))
        for key in ("N", "levels", "trials", "pairs"):
            if key in e:
                kwargs[key] = int(e[key])
        if "t_max" in e:
            kwargs["t_max"] = float(e["t_max"])
        if "zeno" in e:
            kwargs["zeno"] = _bool(e["zeno"])
        if "target" in e:
            kwargs["target"] = e["target"].strip()
        experiment = ExperimentSection(**kwargs)

        o = parser["output"] if parser.has_section("output") else {}
        output = OutputSection(format=o.get("format", "csv").strip(), directory=o.get("directory", "results").strip())
        seed = int(e.get("seed", 0))
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc

    cfg = ExperimentConfig(model, zeno, experiment, output, seed, hashlib.sha256(text.encode()).hexdigest())
    validate(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def validate(cfg: ExperimentConfig) -> None:
    exp, model = cfg.experiment, cfg.model
    if exp.name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp.name!r}; valid names: {', '.join(EXPERIMENTS)}")
    if model.preset not in PRESETS:
        raise ConfigError(f"unknown model preset {model.preset!r}; valid: {', '.join(PRESETS)}")
    if cfg.output.format not in FORMATS:
        raise ConfigError(f"unknown output format {cfg.output.format!r}")
    if exp.name in XY_ONLY and model.preset != "xy":
        raise ConfigError(f"experiment {exp.name} needs the xy model preset")
    if model.lo > model.hi:
        raise ConfigError("model chain is empty (lo > hi)")
    n_sites = model.hi - model.lo + 1
    if model.preset == "xy" and exp.name != "rte-quasifree":
        if n_sites > DENSE_MAX_SITES:
            raise ConfigError(
                f"{n_sites} sites exceed the dense cap of {DENSE_MAX_SITES}; use rte-quasifree for long chains"
            )
        if not model.lo <= cfg.zeno.site <= model.hi:
            raise ConfigError("zeno site lies outside the model chain")
    if not model.beta > 0:
        raise ConfigError("beta must be positive")
    for key in ("t", "n", "K"):
        if not getattr(exp, key):
            raise ConfigError(f"grid {key} is empty")
    if any(k < 1 for k in exp.n):
        raise ConfigError("n values must be positive")
    if any(k < 0 for k in exp.K):
        raise ConfigError("K values must be nonnegative")
    if any(b <= 0 for b in exp.betas):
        raise ConfigError("betas must be positive")
    if exp.window[2] < 1 or (exp.window[2] > 1 and exp.window[1] <= exp.window[0]):
        raise ConfigError("window needs stop > start and a positive count")
    if exp.levels < 2:
        raise ConfigError("levels must be at least 2")
    if exp.target not in ("gibbs", "zeno"):
        raise ConfigError("target must be gibbs or zeno")
    if exp.name == "rte-quasifree" and (exp.N % 2 != 1 or exp.N < 3):
        raise ConfigError("rte-quasifree needs an odd N >= 3")
    if exp.name in ("rte-dense",) and model.preset == "xy":
        if not (model.lo < cfg.zeno.site < model.hi):
            raise ConfigError("rte-dense needs an interior zeno site")
