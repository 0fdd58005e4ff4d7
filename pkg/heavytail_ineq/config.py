"""
Run configuration.

Configurations are flat ``key = value`` files with dotted keys, e.g.::

    command = profile
    measure.family = generalized-cauchy
    measure.alpha = 2
    grid.t.min = 1e-4
    grid.t.max = 0.5
    grid.t.points = 100

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from heavytail_ineq import const
from heavytail_ineq.errors import ConfigError, ParameterError
from heavytail_ineq.measures import Family, Measure1D, PhiFunction, QuadratureSpec

_LOG = logging.getLogger(__name__)

COMMANDS = ("profile", "duality", "lyapunov", "constants", "weak", "verify")
SECTIONS = ("command", "measure", "grid", "quadrature", "mc", "output", "lyapunov", "verify")


class _Reader:
    """Typed access to raw config values that reports the offending line."""

    def __init__(self, values: Mapping[str, Any], lines: Mapping[str, int] | None = None):
        self.values = values
        self.lines = lines or {}

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, line=self.lines.get(key), field=key)

    def has(self, key: str) -> bool:
        return key in self.values and str(self.values[key]).strip() != ""

    def get(self, key: str, cast: Callable, default: Any) -> Any:
        if not self.has(key):
            return default
        raw = self.values[key]
        try:
            return cast(str(raw).strip())
        except (TypeError, ValueError) as err:
            raise self.error(key, f"cannot read {raw!r}: {err}") from err

    def floats(self, key: str) -> tuple[float, ...]:
        return self.get(key, lambda text: tuple(float(v) for v in text.split(",") if v.strip()), ())


def _grid(reader: _Reader, name: str, default: tuple[float, ...], lower: float, upper: float) -> tuple[float, ...]:
    prefix = f"grid.{name}"
    if f"{prefix}.values" in reader.values:
        values = reader.floats(f"{prefix}.values")
        key = f"{prefix}.values"
    elif any(reader.has(f"{prefix}.{part}") for part in ("min", "max", "points")):
        lo = reader.get(f"{prefix}.min", float, default[0] if default else lower)
        hi = reader.get(f"{prefix}.max", float, default[-1] if default else upper)
        points = reader.get(f"{prefix}.points", int, len(default))
        key = f"{prefix}.points"
        if points < 1:
            raise reader.error(key, "grid needs at least one point")
        if not 0 < lo <= hi:
            raise reader.error(f"{prefix}.min", f"need 0 < min <= max, got {lo}, {hi}")
        values = tuple(float(v) for v in np.geomspace(lo, hi, points))
    else:
        return default
    if not values:
        raise reader.error(key, f"{prefix} is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise reader.error(key, f"{prefix} must be strictly increasing")
    if values[0] <= lower or values[-1] >= upper:
        raise reader.error(key, f"{prefix} must lie inside ({lower:g}, {upper:g})")
    return values


@dataclass
class QuadratureConfig:
    abs_tol: float = const.QUAD_ABS_TOL
    rel_tol: float = const.QUAD_REL_TOL
    tail_eps: float = const.QUAD_TAIL_EPS
    max_depth: int = const.QUAD_MAX_DEPTH

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> "QuadratureConfig":
        reader = _Reader(data, lines)
        cfg = cls(
            abs_tol=reader.get("quadrature.abs_tol", float, const.QUAD_ABS_TOL),
            rel_tol=reader.get("quadrature.rel_tol", float, const.QUAD_REL_TOL),
            tail_eps=reader.get("quadrature.tail_eps", float, const.QUAD_TAIL_EPS),
            max_depth=reader.get("quadrature.max_depth", int, const.QUAD_MAX_DEPTH),
        )
        try:
            cfg.to_spec()
        except ParameterError as err:
            raise ConfigError(str(err), field="quadrature") from err
        return cfg

    def to_spec(self) -> QuadratureSpec:
        return QuadratureSpec(self.abs_tol, self.rel_tol, self.tail_eps, self.max_depth)


@dataclass
class GridConfig:
    t: tuple[float, ...] = tuple(float(v) for v in np.geomspace(1e-4, 0.5 - 1e-9, 100))
    s: tuple[float, ...] = tuple(float(v) for v in np.geomspace(1e-4, 0.2, 50))
    x_min: float = 0.0
    x_max: float = 100.0
    x_points: int = 4001
    n: tuple[int, ...] = (1,)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> "GridConfig":
        reader = _Reader(data, lines)
        default = cls()
        x_min = reader.get("grid.x.min", float, default.x_min)
        x_max = reader.get("grid.x.max", float, default.x_max)
        x_points = reader.get("grid.x.points", int, default.x_points)
        if not 0 <= x_min < x_max:
            raise reader.error("grid.x.max", f"need 0 <= x.min < x.max, got {x_min}, {x_max}")
        if x_points < 2:
            raise reader.error("grid.x.points", "x grid needs at least two points")
        n_values = reader.get("grid.n.values", lambda text: tuple(int(v) for v in text.split(",") if v.strip()),
                              default.n)
        if not n_values or any(v < 1 for v in n_values):
            raise reader.error("grid.n.values", "dimensions must be positive integers")
        return cls(
            t=_grid(reader, "t", default.t, 0.0, 1.0),
            s=_grid(reader, "s", default.s, 0.0, 0.5),
            x_min=x_min,
            x_max=x_max,
            x_points=x_points,
            n=n_values,
        )

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.x_points)


@dataclass
class MonteCarloConfig:
    seed: int = 0
    samples: int = const.MC_DEFAULT_SAMPLES
    blocks: int = const.MC_DEFAULT_BLOCKS
    sigma: float = const.MC_SIGMA

    def __post_init__(self):
        if self.blocks < 2 or self.samples < self.blocks:
            raise ConfigError(f"need samples >= blocks >= 2, got {self.samples} and {self.blocks}", field="mc")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}", field="mc.seed")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> "MonteCarloConfig":
        reader = _Reader(data, lines)
        return cls(
            seed=reader.get("mc.seed", int, 0),
            samples=reader.get("mc.samples", lambda text: int(float(text)), const.MC_DEFAULT_SAMPLES),
            blocks=reader.get("mc.blocks", int, const.MC_DEFAULT_BLOCKS),
            sigma=reader.get("mc.sigma", float, const.MC_SIGMA),
        )


def parse_phi(text: str) -> PhiFunction:
    """Build a PhiFunction from ``name[:arg[:arg]]``, e.g. ``power:0.5`` or ``power_log:0.5:0.25``."""
    name, *args = [part.strip() for part in text.split(":")]
    values = [float(a) for a in args]
    builders = {
        "linear": (PhiFunction.linear, 0),
        "power": (PhiFunction.power, 1),
        "smoothed_power": (PhiFunction.smoothed_power, 1),
        "log_type": (PhiFunction.log_type, 1),
        "power_log": (PhiFunction.power_log, 2),
    }
    if name not in builders:
        raise ValueError(f"unknown Phi {name!r}; expected one of {', '.join(builders)}")
    builder, arity = builders[name]
    if len(values) != arity:
        raise ValueError(f"Phi {name!r} takes {arity} argument(s), got {len(values)}")
    return builder(*values)


_REQUIRED_PARAMETER = {
    Family.CAUCHY: "alpha",
    Family.CAUCHY_SMOOTH: "alpha",
    Family.SUBEXPONENTIAL: "p",
    Family.VQ: "q",
    Family.PHI: "phi",
}


@dataclass
class MeasureConfig:
    family: str = Family.CAUCHY.value
    alpha: float | None = None
    p: float | None = None
    q: float | None = None
    phi: str | None = None
    dimension: int = 1

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> "MeasureConfig":
        reader = _Reader(data, lines)
        family = reader.get("measure.family", str, Family.CAUCHY.value)
        if family not in {f.value for f in Family}:
            raise reader.error("measure.family", f"unknown family {family!r}")
        cfg = cls(
            family=family,
            alpha=reader.get("measure.alpha", float, None),
            p=reader.get("measure.p", float, None),
            q=reader.get("measure.q", float, None),
            phi=reader.get("measure.phi", str, None),
            dimension=reader.get("measure.n", int, 1),
        )
        if cfg.dimension < 1:
            raise reader.error("measure.n", "dimension must be at least 1")
        required = _REQUIRED_PARAMETER.get(Family(family))
        if required and getattr(cfg, required) is None:
            raise reader.error(f"measure.{required}", f"{family} needs measure.{required}")
        try:
            cfg.build()
        except (ParameterError, ValueError) as err:
            raise ConfigError(str(err), field="measure") from err
        return cfg

    def build(self, quadrature: QuadratureSpec | None = None) -> Measure1D:
        family = Family(self.family)
        extra = {} if quadrature is None else {"quadrature": quadrature}
        if family is Family.CAUCHY:
            return Measure1D.cauchy(self.alpha, **extra)
        if family is Family.CAUCHY_SMOOTH:
            return Measure1D.cauchy_smooth(self.alpha, **extra)
        if family is Family.SUBEXPONENTIAL:
            return Measure1D.subexponential(self.p, **extra)
        if family is Family.EXPONENTIAL:
            return Measure1D.exponential(**extra)
        if family is Family.VQ:
            return Measure1D.vq(self.q, **extra)
        if not self.phi:
            raise ParameterError("phi-measure needs measure.phi")
        return Measure1D.phi_measure(parse_phi(self.phi), **extra)


@dataclass
class OutputConfig:
    directory: Path = Path(".")
    prefix: str = ""

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> "OutputConfig":
        reader = _Reader(data, lines)
        fallback = os.getenv(const.ENV_OUTPUT_DIR, ".")
        return cls(directory=Path(reader.get("output.dir", str, fallback)), prefix=reader.get("output.prefix", str, ""))

    def path(self, name: str) -> Path:
        return self.directory / f"{self.prefix}{name}"


@dataclass
class LyapunovConfig:
    family: str = "cauchy"
    gamma: float = 0.25
    a: float = 2.0
    kappa_u: float | None = None
    r_max: float = 100.0

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> "LyapunovConfig":
        reader = _Reader(data, lines)
        family = reader.get("lyapunov.family", str, "cauchy")
        if family not in ("cauchy", "subexp", "exp-potential", "vq"):
            raise reader.error("lyapunov.family", f"unknown certificate family {family!r}")
        return cls(
            family=family,
            gamma=reader.get("lyapunov.gamma", float, 0.25),
            a=reader.get("lyapunov.a", float, 2.0),
            kappa_u=reader.get("lyapunov.kappa_u", float, None),
            r_max=reader.get("lyapunov.r_max", float, 100.0),
        )


@dataclass
class VerifyConfig:
    kind: str = "weighted-poincare"
    constant: float | None = None
    scale: float = 1.0
    engine: str | None = None
    witnesses: int = 50

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> "VerifyConfig":
        reader = _Reader(data, lines)
        kind = reader.get("verify.kind", str, "weighted-poincare")
        if kind not in ("weighted-poincare", "weak-poincare", "isoperimetric"):
            raise reader.error("verify.kind", f"unknown check {kind!r}")
        engine = reader.get("verify.engine", str, None)
        if engine is not None and engine not in ("quadrature", "mc"):
            raise reader.error("verify.engine", f"engine must be quadrature or mc, got {engine!r}")
        scale = reader.get("verify.scale", float, 1.0)
        if not scale > 0:
            raise reader.error("verify.scale", "scale must be positive")
        return cls(
            kind=kind,
            constant=reader.get("verify.constant", float, None),
            scale=scale,
            engine=engine,
            witnesses=reader.get("verify.witnesses", int, 50),
        )


@dataclass
class RunConfig:
    command: str
    measure: MeasureConfig = field(default_factory=MeasureConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    mc: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    lyapunov: LyapunovConfig = field(default_factory=LyapunovConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], lines: Mapping[str, int] | None = None) -> "RunConfig":
        reader = _Reader(data, lines)
        command = reader.get("command", str, "")
        if command not in COMMANDS:
            raise reader.error("command", f"command must be one of {', '.join(COMMANDS)}, got {command!r}")
        return cls(
            command=command,
            measure=MeasureConfig.from_mapping(data, lines),
            grid=GridConfig.from_mapping(data, lines),
            quadrature=QuadratureConfig.from_mapping(data, lines),
            mc=MonteCarloConfig.from_mapping(data, lines),
            output=OutputConfig.from_mapping(data, lines),
            lyapunov=LyapunovConfig.from_mapping(data, lines),
            verify=VerifyConfig.from_mapping(data, lines),
        )

    def build_measure(self) -> Measure1D:
        return self.measure.build(self.quadrature.to_spec())


def parse_config_text(text: str) -> tuple[dict[str, str], dict[str, int]]:
    """Split ``key = value`` lines into values and the line number of each key."""
    values: dict[str, str] = {}
    lines: dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=number)
        if key.split(".", 1)[0] not in SECTIONS:
            raise ConfigError(f"unknown section {key.split('.', 1)[0]!r}", line=number, field=key)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", line=number, field=key)
        values[key] = value
        lines[key] = number
    return values, lines


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    values, lines = parse_config_text(text)
    _LOG.debug("Loaded %d keys from %s", len(values), path)
    return RunConfig.from_mapping(values, lines)
