"""Plain-text run configuration: ``[section]`` headers and ``key = value`` lines."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from ..kmc_engine.bias import BiasField
from ..kmc_engine.engine import SimConfig
from ..lattice_curve import (
    LatticeCurve, diamond, discretize_shape, disk, fmt_float, read_snapshot, square,
)
from ..observables import Observables


class ConfigError(ValueError):
    pass


SHAPES = {"disk": disk, "square": square, "diamond": diamond}

# section -> key -> (kind, required)
SCHEMA: dict[str, dict[str, tuple[str, bool]]] = {
    "simulation": {
        "N": ("int", True),
        "beta": ("float", True),
        "horizon_T": ("float", True),
        "seed": ("int", True),
        "snapshot_cadence": ("float?", False),
        "observable_cadence": ("float?", False),
        "r0": ("float?", False),
        "record_events": ("bool", False),
        "stop_area_fraction": ("float?", False),
        "dt_max": ("float?", False),
    },
    "initial": {
        "shape": ("str", True),
        "size": ("float?", False),
        "file": ("str?", False),
    },
    "bias": {
        "field": ("bias", False),
    },
    "output": {
        "directory": ("str", True),
        "replicas": ("int", True),
        "observables": ("list", False),
    },
}


@dataclass(frozen=True)
class RunConfig:
    N: int
    beta: float
    horizon_T: float
    seed: int
    shape: str
    directory: str
    replicas: int
    size: float | None = None
    file: str | None = None
    snapshot_cadence: float | None = None
    observable_cadence: float | None = None
    r0: float | None = None
    record_events: bool = True
    stop_area_fraction: float | None = None
    dt_max: float | None = None
    bias: BiasField | None = None
    observables: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.replicas < 1:
            raise ConfigError("replicas must be at least 1")
        if self.shape == "file":
            if not self.file:
                raise ConfigError("shape = file needs a file key")
        elif self.shape in SHAPES:
            if self.size is None:
                raise ConfigError(f"shape = {self.shape} needs a size key")
        else:
            raise ConfigError(f"unknown initial shape {self.shape!r}")
        for name in self.observables:
            try:
                Observables.parse_name(name)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        try:
            self.sim_config(0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def sim_config(self, replica: int = 0) -> SimConfig:
        return SimConfig(N=self.N, beta=self.beta, horizon_T=self.horizon_T, seed=self.seed,
                         bias=self.bias, snapshot_cadence=self.snapshot_cadence,
                         observable_cadence=self.observable_cadence, r0=self.r0,
                         record_events=self.record_events,
                         stop_area_fraction=self.stop_area_fraction, dt_max=self.dt_max,
                         replica=replica)

    def initial_curve(self, base: Path | None = None) -> LatticeCurve:
        if self.shape == "file":
            p = Path(self.file)
            if base is not None and not p.is_absolute():
                p = base / p
            curve, _, _ = read_snapshot(p)
            if curve.N != self.N:
                raise ConfigError(f"initial snapshot has N={curve.N}, config N={self.N}")
            return curve
        return discretize_shape(SHAPES[self.shape](self.size), self.N)

    def observer(self) -> Observables | None:
        return Observables.from_names(self.observables) if self.observables else None

    def with_values(self, **kw) -> "RunConfig":
        return replace(self, **kw)


def _parse_value(kind: str, raw: str, where: str):
    raw = raw.strip()
    opt = kind.endswith("?")
    base = kind.rstrip("?")
    if opt and raw.lower() == "none":
        return None
    try:
        if base == "int":
            return int(raw)
        if base == "float":
            return float(raw)
        if base == "bool":
            if raw.lower() in ("true", "yes", "1"):
                return True
            if raw.lower() in ("false", "no", "0"):
                return False
            raise ValueError(raw)
        if base == "str":
            return raw
        if base == "bias":
            return BiasField.from_spec(raw)
        if base == "list":
            return tuple(x.strip() for x in raw.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {base}: {exc}") from None
    raise AssertionError(kind)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    section = None
    values: dict[str, object] = {}
    seen: dict[tuple[str, str], int] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        where = f"{source}:{n}"
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"{where}: unknown section [{section}]")
            continue
        if "=" not in s:
            raise ConfigError(f"{where}: expected 'key = value'")
        if section is None:
            raise ConfigError(f"{where}: key outside any section")
        key, raw = (p.strip() for p in s.split("=", 1))
        if key not in SCHEMA[section]:
            raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
        if (section, key) in seen:
            raise ConfigError(f"{where}: duplicate key {key!r} (first at line {seen[section, key]})")
        seen[section, key] = n
        kind, _ = SCHEMA[section][key]
        values[key] = _parse_value(kind, raw, where)
    for sec, keys in SCHEMA.items():
        for key, (_, required) in keys.items():
            if required and (sec, key) not in seen:
                raise ConfigError(f"{source}: missing required key {key!r} in [{sec}]")
    if "field" in values:
        values["bias"] = values.pop("field")
    return RunConfig(**values)


def read_config(path) -> RunConfig:
    p = Path(path)
    return parse_config(p.read_text(), str(p))


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, BiasField):
        return v.to_spec()
    if isinstance(v, tuple):
        return ", ".join(v)
    return str(v)


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for sec, keys in SCHEMA.items():
        lines.append(f"[{sec}]")
        for key in keys:
            attr = "bias" if key == "field" else key
            lines.append(f"{key} = {_fmt(getattr(cfg, attr))}")
        lines.append("")
    return "\n".join(lines)


def write_config(path, cfg: RunConfig) -> None:
    Path(path).write_text(serialize_config(cfg))


def override(cfg: RunConfig, key: str, raw: str) -> RunConfig:
    """Replace one field from its text form, as used by sweeps."""
    for keys in SCHEMA.values():
        if key in keys:
            val = _parse_value(keys[key][0], raw, f"override {key}")
            return replace(cfg, **{("bias" if key == "field" else key): val})
    raise ConfigError(f"unknown key {key!r}")
