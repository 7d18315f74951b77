"""Scenario documents: line-oriented ``section.key = value`` text.

Blank lines and ``#`` comments are ignored and ``-`` unsets an optional
key. Every key belongs to one of the sections below; unknown keys are
errors. ``load_config`` applies defaults
and validates; ``emit_config`` writes every key back out so that
``load_config(emit_config(cfg)) == cfg``.
"""
from __future__ import annotations

import math
import types
import typing
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..controller import DEFAULT_HEATER_BUDGET, DEFAULT_SENSORS, MODES, STORAGE_SETPOINT, SensorModel
from ..environment import KINDS
from ..errors import ConfigError, InvalidInputError
from ..tess_model import DEFAULT_RATE_CONSTANT, DELIVERY_MODES, SCHEDULES
from ..thermo_props import BUILTIN_SORBENTS, HydrateVariant, SorbentSpec
from .budget import BudgetModel, MassEntry, PowerEntry


@dataclass(frozen=True)
class GeometryConfig:
    r_inner: float | None = None  # m
    r_outer: float | None = None  # m
    shape: str = "sphere"
    cube_side: float | None = None  # m, inner cube edge
    cube_wall: float | None = None  # m
    aerogel_thickness: float = 0.0015  # m


@dataclass(frozen=True)
class MaterialsConfig:
    k_aerogel: float = 0.02  # W/(m K)
    k_structure: float = 0.2  # W/(m K), polymer shell and container fill
    emissivity_inner: float = 0.8
    emissivity_outer: float = 0.8
    emissivity_surface: float = 0.8
    cp_electronics: float = 800.0  # J/(kg K)
    cp_battery: float = 900.0
    cp_structure: float = 1400.0
    cp_salt: float = 1130.0
    cp_insulation: float = 1000.0
    core_contact_R: float = 0.5  # K/W, electronics stack to inner sphere
    bed_contact_R: float = 0.5  # K/W, salt bed to inner sphere
    support_R: float | None = 1.5  # K/W, outer sphere to its mount; unset = none


@dataclass(frozen=True)
class NodesConfig:
    count: int = 3
    initial_temperature_K: float = 293.15
    mass_electronics_g: float = 21.0
    mass_battery_g: float = 25.0
    mass_inner_g: float = 126.0
    mass_outer_g: float = 178.0
    mass_container_g: float = 21.0
    mass_insulation_g: float = 3.0


@dataclass(frozen=True)
class TessConfig:
    enabled: bool = False
    sorbent: str = "LiCl"
    salt_mass_g: float = 25.0
    water_g: float = 25.0
    initial_x: float = 0.0
    delivery: str = "liquid"
    schedule: str = "batch"
    rate_constant_per_s: float = DEFAULT_RATE_CONSTANT
    degradation: float | None = None  # unset: 1.0 for liquid, 0.0 for vapor
    water_temperature_K: float = 273.15
    charge_power_W: float = 0.0
    charge_efficiency: float = 1.0


@dataclass(frozen=True)
class ControllerConfig:
    mode: str = "passive"
    setpoint_K: float = STORAGE_SETPOINT
    band_K: float = 1.0
    heater_power_W: float = 0.0
    max_feed_g_s: float = 0.0
    energy_budget_J: float = DEFAULT_HEATER_BUDGET
    sensor: str = "TMP36"
    heater_node: str = "core"
    period_s: float = 10.0
    sensors: tuple[SensorModel, ...] = DEFAULT_SENSORS


@dataclass(frozen=True)
class EnvironmentConfig:
    kind: str | None = None
    temperature_K: float | None = None
    day_temperature_K: float | None = None
    night_temperature_K: float | None = None
    period_s: float | None = None
    phase_s: float = 0.0
    table: tuple[tuple[float, float], ...] | None = None
    table_file: str | None = None
    solar_power_W: float = 0.0
    solar_node: str = "outer"


BudgetConfig = BudgetModel


@dataclass(frozen=True)
class RunConfig:
    duration_s: float | None = None
    output_interval_s: float = 60.0
    dissipation_W: float | None = None  # unset: budget heat-lost total
    dissipation_node: str = "core"
    threshold_K: float = STORAGE_SETPOINT
    rtol: float = 1e-8
    atol: float = 1e-6


SECTIONS = {
    "geometry": GeometryConfig,
    "materials": MaterialsConfig,
    "nodes": NodesConfig,
    "tess": TessConfig,
    "controller": ControllerConfig,
    "environment": EnvironmentConfig,
    "budget": BudgetConfig,
    "run": RunConfig,
}
REQUIRED_KEYS = ("geometry.r_inner", "geometry.r_outer", "environment.kind", "run.duration_s")


@dataclass(frozen=True)
class ScenarioConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    materials: MaterialsConfig = field(default_factory=MaterialsConfig)
    nodes: NodesConfig = field(default_factory=NodesConfig)
    tess: TessConfig = field(default_factory=TessConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    environment: EnvironmentConfig = field(default_factory=EnvironmentConfig)
    budget: BudgetConfig = field(default_factory=BudgetConfig)
    run: RunConfig = field(default_factory=RunConfig)
    sorbents: tuple[SorbentSpec, ...] = ()
    base_dir: str | None = field(default=None, compare=False)

    def sorbent_table(self) -> dict[str, SorbentSpec]:
        table = dict(BUILTIN_SORBENTS)
        table.update({s.name: s for s in self.sorbents})
        return table

    def get(self, path: str):
        section, key = _split_path(path)
        return getattr(getattr(self, section), key)

    def with_value(self, path: str, value) -> "ScenarioConfig":
        section, key = _split_path(path)
        sec = getattr(self, section)
        return replace(self, **{section: replace(sec, **{key: value})})


def _split_path(path: str) -> tuple[str, str]:
    section, _, key = path.partition(".")
    if section not in SECTIONS or key not in {f.name for f in fields(SECTIONS[section])}:
        raise ConfigError(f"unknown parameter path {path!r}", key=path)
    return section, key


# -- scalar conversion --------------------------------------------------------

def _hints(cls) -> dict[str, object]:
    return typing.get_type_hints(cls)


def _base_type(hint):
    """Strip ``| None`` from an annotation."""
    if typing.get_origin(hint) in (typing.Union, types.UnionType):
        return next(a for a in typing.get_args(hint) if a is not type(None))
    return hint


def numeric_keys() -> set[str]:
    out = set()
    for name, cls in SECTIONS.items():
        for fname, hint in _hints(cls).items():
            if _base_type(hint) in (float, int):
                out.add(f"{name}.{fname}")
    return out


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("NaN is not allowed")
    return value


def _parse_sensors(text: str) -> tuple[SensorModel, ...]:
    out = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        parts = [p.strip() for p in item.split(":")]
        if len(parts) != 4:
            raise ValueError(f"sensor entry must be name:bias_K:quantization_K:node, got {item!r}")
        out.append(SensorModel(parts[0], _parse_float(parts[1]), _parse_float(parts[2]), parts[3]))
    return tuple(out)


def _parse_table(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if item:
            t, _, v = item.partition(":")
            out.append((_parse_float(t), _parse_float(v)))
    return tuple(out)


def _optional(hint) -> bool:
    return typing.get_origin(hint) in (typing.Union, types.UnionType) and type(None) in typing.get_args(hint)


def _convert(hint, text: str):
    if _optional(hint) and text == "-":
        return None
    base = _base_type(hint)
    if base is float:
        return _parse_float(text)
    if base is int:
        return int(text)
    if base is bool:
        return _parse_bool(text)
    if base is str:
        return text
    if base == tuple[SensorModel, ...]:
        return _parse_sensors(text)
    if base == tuple[tuple[float, float], ...]:
        return _parse_table(text)
    raise TypeError(f"unsupported config type {hint}")


def _format(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple) and value and isinstance(value[0], SensorModel):
        return "; ".join(f"{s.name}:{s.bias!r}:{s.quantization!r}:{s.attach_node}" for s in value)
    if isinstance(value, tuple):
        return ", ".join(f"{t!r}:{v!r}" for t, v in value)
    return str(value)


def _opt(text: str) -> float | None:
    text = text.strip()
    return None if text in ("", "-") else _parse_float(text)


def _fmt_opt(value: float | None) -> str:
    return "-" if value is None else repr(value)


# -- loading ------------------------------------------------------------------

def _parse_lines(text: str) -> list[tuple[int, str, str]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'section.key = value', got {raw.strip()!r}", line=lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if "." not in key:
            raise ConfigError(f"key {key!r} has no section prefix", line=lineno, key=key)
        out.append((lineno, key, value))
    return out


def _parse_sorbents(entries: list[tuple[int, str, str]]) -> tuple[SorbentSpec, ...]:
    raw: dict[str, dict] = {}
    for lineno, key, value in entries:
        parts = key.split(".")
        try:
            if len(parts) == 3 and parts[2] in ("dHfd_kJ_mol", "molar_mass_g_mol"):
                raw.setdefault(parts[1], {"hydrates": {}})[parts[2]] = _parse_float(value)
            elif len(parts) == 4 and parts[2] == "hydrate":
                vals = [v.strip() for v in value.split(",")]
                if len(vals) not in (2, 3):
                    raise ValueError("hydrate needs 'dHfh, dHr[, min_stable_C]'")
                stable = _opt(vals[2]) if len(vals) == 3 else None
                raw.setdefault(parts[1], {"hydrates": {}})["hydrates"][int(parts[3])] = (
                    _parse_float(vals[0]), _parse_float(vals[1]), stable)
            else:
                raise ConfigError(f"unknown key {key!r}", line=lineno, key=key)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", line=lineno, key=key) from None
    specs = []
    for name, d in raw.items():
        missing = [k for k in ("dHfd_kJ_mol", "molar_mass_g_mol") if k not in d]
        if missing or not d["hydrates"]:
            raise ConfigError(f"sorbent {name!r} needs dHfd_kJ_mol, molar_mass_g_mol and hydrates",
                              key=f"sorbent.{name}")
        hydrates = [HydrateVariant(x, *d["hydrates"][x]) for x in sorted(d["hydrates"])]
        try:
            specs.append(SorbentSpec(name, d["dHfd_kJ_mol"], d["molar_mass_g_mol"], tuple(hydrates)))
        except InvalidInputError as exc:
            raise ConfigError(str(exc), key=f"sorbent.{name}") from None
    return tuple(specs)


def _parse_budget(entries: list[tuple[int, str, str]]) -> BudgetConfig:
    mass, power, scalars = [], [], {}
    for lineno, key, value in entries:
        parts = key.split(".", 2)
        try:
            if len(parts) == 3 and parts[1] == "mass":
                vals = [v.strip() for v in value.split(",")]
                if len(vals) != 3:
                    raise ValueError("mass entry needs 'mass_g, deviation, max_g'")
                mass.append(MassEntry(parts[2], _parse_float(vals[0]), _parse_float(vals[1]), _parse_float(vals[2])))
            elif len(parts) == 3 and parts[1] == "power":
                vals = [v.strip() for v in value.split(",")]
                if len(vals) != 4:
                    raise ValueError("power entry needs 'current_mA, voltage_V, power_mW, heat_mW'")
                power.append(PowerEntry(parts[2], *(_opt(v) for v in vals)))
            elif len(parts) == 2 and parts[1] in ("listed_mass_total_g", "listed_heat_total_mW"):
                scalars[parts[1]] = _opt(value)
            else:
                raise ConfigError(f"unknown key {key!r}", line=lineno, key=key)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", line=lineno, key=key) from None
    cfg = BudgetConfig(**scalars)
    if mass:
        cfg = replace(cfg, mass=tuple(mass))
    if power:
        cfg = replace(cfg, power=tuple(power))
    return cfg


def load_config(document: str, base_dir: str | Path | None = None) -> ScenarioConfig:
    """Parse, default and validate a scenario document."""
    by_section: dict[str, list[tuple[int, str, str]]] = {}
    seen: dict[str, int] = {}
    for lineno, key, value in _parse_lines(document):
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first on line {seen[key]})", line=lineno, key=key)
        seen[key] = lineno
        section = key.split(".", 1)[0]
        if section not in SECTIONS and section != "sorbent":
            raise ConfigError(f"unknown section {section!r} in key {key!r}", line=lineno, key=key)
        by_section.setdefault(section, []).append((lineno, key, value))

    missing = [k for k in REQUIRED_KEYS if k not in seen]
    shape = next((v for _, k, v in by_section.get("geometry", []) if k == "geometry.shape"), "sphere")
    if shape == "cube":
        missing = [k for k in missing if not k.startswith("geometry.r_")]
        missing += [k for k in ("geometry.cube_side", "geometry.cube_wall") if k not in seen]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    kwargs = {}
    for section, cls in SECTIONS.items():
        entries = by_section.get(section, [])
        if section == "budget":
            kwargs[section] = _parse_budget(entries)
            continue
        hints = _hints(cls)
        values = {}
        for lineno, key, value in entries:
            name = key.split(".", 1)[1]
            if name not in hints:
                raise ConfigError(f"unknown key {key!r}", line=lineno, key=key)
            try:
                values[name] = _convert(hints[name], value)
            except (ValueError, InvalidInputError) as exc:
                raise ConfigError(f"{key}: {exc}", line=lineno, key=key) from None
        kwargs[section] = cls(**values)
    cfg = ScenarioConfig(**kwargs, sorbents=_parse_sorbents(by_section.get("sorbent", [])),
                         base_dir=str(base_dir) if base_dir is not None else None)
    validate_config(cfg)
    return cfg


def load_config_file(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return load_config(text, base_dir=path.parent)


def emit_config(cfg: ScenarioConfig) -> str:
    lines = []
    for section in SECTIONS:
        sec = getattr(cfg, section)
        if section == "budget":
            for e in sec.mass:
                lines.append(f"budget.mass.{e.name} = {e.mass_g!r}, {e.deviation!r}, {e.max_mass_g!r}")
            for e in sec.power:
                vals = ", ".join(_fmt_opt(v) for v in (e.current_mA, e.voltage_V, e.power_mW, e.heat_lost_mW))
                lines.append(f"budget.power.{e.name} = {vals}")
            lines.append(f"budget.listed_mass_total_g = {_fmt_opt(sec.listed_mass_total_g)}")
            lines.append(f"budget.listed_heat_total_mW = {_fmt_opt(sec.listed_heat_total_mW)}")
            continue
        for f in fields(sec):
            value = getattr(sec, f.name)
            lines.append(f"{section}.{f.name} = {_format(value)}")
        lines.append("")
    for s in cfg.sorbents:
        lines.append(f"sorbent.{s.name}.dHfd_kJ_mol = {s.dehydrated_formation_enthalpy_dHfd!r}")
        lines.append(f"sorbent.{s.name}.molar_mass_g_mol = {s.molar_mass_dehydrated!r}")
        for h in s.hydrates:
            extra = "" if h.min_stable_temperature is None else f", {h.min_stable_temperature!r}"
            lines.append(
                f"sorbent.{s.name}.hydrate.{h.water_moles_x} = "
                f"{h.hydrated_formation_enthalpy_dHfh!r}, {h.reaction_enthalpy_dHr!r}{extra}"
            )
    return "\n".join(lines).rstrip() + "\n"


# -- validation ---------------------------------------------------------------

def _positive(cfg: ScenarioConfig, path: str, allow_zero: bool = False) -> None:
    value = cfg.get(path)
    if value is None:
        return
    ok = value >= 0 if allow_zero else value > 0
    if not ok or (isinstance(value, float) and math.isinf(value)):
        raise ConfigError(f"{path} must be {'>= 0' if allow_zero else '> 0'}, got {value}", key=path)


def node_ids(cfg: ScenarioConfig) -> tuple[str, ...]:
    """Node names of the network built from ``cfg``.

    ``nodes.count`` counts the structural nodes; a two-node layout merges the
    inner shell into the outer one. The salt bed is an extra node present
    only when the TESS is enabled.
    """
    ids = ("core", "inner", "outer") if cfg.nodes.count == 3 else ("core", "outer")
    return ids + (("bed",) if cfg.tess.enabled else ())


def validate_config(cfg: ScenarioConfig) -> None:
    g = cfg.geometry
    if g.shape not in ("sphere", "cube"):
        raise ConfigError(f"geometry.shape must be sphere or cube, got {g.shape!r}", key="geometry.shape")
    for path in ("geometry.r_inner", "geometry.r_outer", "geometry.cube_side", "geometry.cube_wall",
                 "geometry.aerogel_thickness"):
        _positive(cfg, path)
    if g.shape == "sphere":
        if g.r_inner is None or g.r_outer is None:
            raise ConfigError("sphere geometry needs geometry.r_inner and geometry.r_outer", key="geometry.r_inner")
        if g.r_outer <= g.r_inner + g.aerogel_thickness:
            raise ConfigError("geometry.r_outer must exceed r_inner + aerogel_thickness", key="geometry.r_outer")
    else:
        if g.cube_side is None or g.cube_wall is None:
            raise ConfigError("cube geometry needs geometry.cube_side and geometry.cube_wall", key="geometry.cube_side")
        if g.cube_wall <= g.aerogel_thickness:
            raise ConfigError("geometry.cube_wall must exceed geometry.aerogel_thickness", key="geometry.cube_wall")

    m = cfg.materials
    for name in ("k_aerogel", "k_structure", "cp_electronics", "cp_battery", "cp_structure", "cp_salt",
                 "cp_insulation", "core_contact_R", "bed_contact_R", "support_R"):
        _positive(cfg, f"materials.{name}")
    for name in ("emissivity_inner", "emissivity_outer", "emissivity_surface"):
        eps = getattr(m, name)
        if not 0 < eps <= 1:
            raise ConfigError(f"materials.{name} must be in (0, 1], got {eps}", key=f"materials.{name}")

    n = cfg.nodes
    if n.count not in (2, 3):
        raise ConfigError(f"nodes.count must be 2 or 3, got {n.count}", key="nodes.count")
    _positive(cfg, "nodes.initial_temperature_K")
    for name in ("mass_electronics_g", "mass_battery_g", "mass_inner_g", "mass_outer_g",
                 "mass_container_g", "mass_insulation_g"):
        _positive(cfg, f"nodes.{name}", allow_zero=True)
    if n.mass_electronics_g + n.mass_battery_g <= 0:
        raise ConfigError("core node needs positive electronics or battery mass", key="nodes.mass_electronics_g")
    if n.mass_outer_g <= 0:
        raise ConfigError("nodes.mass_outer_g must be > 0", key="nodes.mass_outer_g")
    if n.count == 3 and n.mass_inner_g + n.mass_insulation_g <= 0:
        raise ConfigError("nodes.mass_inner_g must be > 0", key="nodes.mass_inner_g")

    t = cfg.tess
    if t.sorbent not in cfg.sorbent_table():
        raise ConfigError(f"unknown sorbent {t.sorbent!r}", key="tess.sorbent")
    _positive(cfg, "tess.salt_mass_g")
    for name in ("water_g", "initial_x", "rate_constant_per_s", "degradation", "charge_power_W"):
        _positive(cfg, f"tess.{name}", allow_zero=True)
    _positive(cfg, "tess.water_temperature_K")
    if t.delivery not in DELIVERY_MODES:
        raise ConfigError(f"tess.delivery must be one of {DELIVERY_MODES}", key="tess.delivery")
    if t.schedule not in SCHEDULES:
        raise ConfigError(f"tess.schedule must be one of {SCHEDULES}", key="tess.schedule")
    if not 0 < t.charge_efficiency <= 1:
        raise ConfigError("tess.charge_efficiency must be in (0, 1]", key="tess.charge_efficiency")
    if t.initial_x > cfg.sorbent_table()[t.sorbent].x_max:
        raise ConfigError("tess.initial_x exceeds the sorbent's top hydrate", key="tess.initial_x")

    c = cfg.controller
    if c.mode not in MODES:
        raise ConfigError(f"controller.mode must be one of {MODES}, got {c.mode!r}", key="controller.mode")
    for name in ("band_K", "heater_power_W", "max_feed_g_s", "energy_budget_J"):
        _positive(cfg, f"controller.{name}", allow_zero=True)
    _positive(cfg, "controller.setpoint_K")
    _positive(cfg, "controller.period_s")
    node_names = set(node_ids(cfg))
    for s in c.sensors:
        if s.attach_node not in node_names:
            raise ConfigError(f"sensor {s.name} attached to unknown node {s.attach_node!r}", key="controller.sensors")
        if s.quantization < 0:
            raise ConfigError(f"sensor {s.name} quantization must be >= 0", key="controller.sensors")
    if c.mode != "passive" and c.sensor not in {s.name for s in c.sensors}:
        raise ConfigError(f"controller.sensor {c.sensor!r} is not among controller.sensors", key="controller.sensor")
    if c.mode == "heater":
        if c.heater_power_W <= 0:
            raise ConfigError("heater mode needs controller.heater_power_W > 0", key="controller.heater_power_W")
        if c.heater_node not in node_names:
            raise ConfigError(f"unknown heater node {c.heater_node!r}", key="controller.heater_node")
    if c.mode == "tess_valve":
        if not t.enabled or t.schedule != "valve":
            raise ConfigError("tess_valve mode needs tess.enabled = true and tess.schedule = valve",
                              key="controller.mode")
        if c.max_feed_g_s <= 0:
            raise ConfigError("tess_valve mode needs controller.max_feed_g_s > 0", key="controller.max_feed_g_s")

    e = cfg.environment
    if e.kind not in KINDS:
        raise ConfigError(f"environment.kind must be one of {KINDS}, got {e.kind!r}", key="environment.kind")
    if e.kind == "constant" and e.temperature_K is None:
        raise ConfigError("constant environment needs environment.temperature_K", key="environment.temperature_K")
    if e.kind in ("square_wave", "sinusoid"):
        for name in ("day_temperature_K", "night_temperature_K", "period_s"):
            if getattr(e, name) is None:
                raise ConfigError(f"{e.kind} environment needs environment.{name}", key=f"environment.{name}")
    if e.kind == "table" and e.table is None and e.table_file is None:
        raise ConfigError("table environment needs environment.table or environment.table_file",
                          key="environment.table")
    for name in ("temperature_K", "day_temperature_K", "night_temperature_K", "period_s"):
        _positive(cfg, f"environment.{name}")
    _positive(cfg, "environment.solar_power_W", allow_zero=True)
    if e.solar_power_W > 0 and e.solar_node not in node_names:
        raise ConfigError(f"unknown solar node {e.solar_node!r}", key="environment.solar_node")

    r = cfg.run
    _positive(cfg, "run.duration_s", allow_zero=True)
    for name in ("output_interval_s", "threshold_K", "rtol", "atol"):
        _positive(cfg, f"run.{name}")
    _positive(cfg, "run.dissipation_W", allow_zero=True)
    if r.dissipation_node not in node_names:
        raise ConfigError(f"unknown dissipation node {r.dissipation_node!r}", key="run.dissipation_node")
    for entry in cfg.budget.mass:
        if entry.mass_g < 0 or entry.deviation <= 0 or entry.max_mass_g < 0:
            raise ConfigError(f"budget.mass.{entry.name} has invalid values", key=f"budget.mass.{entry.name}")

