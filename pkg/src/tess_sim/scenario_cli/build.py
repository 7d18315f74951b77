"""Turn a validated scenario config into simulator objects."""
from __future__ import annotations

import math
from pathlib import Path

from ..controller import ControlPolicy, SensorModel
from ..environment import EnvironmentProfile, load_table_csv
from ..errors import ConfigError
from ..tess_model import DEFAULT_DEGRADATION, SaltBed, TessSource, TessState, WaterReservoir
from ..thermal_network import (
    BOUNDARY,
    EnclosureGeometry,
    ThermalLink,
    ThermalNetwork,
    ThermalNode,
    enclosure_radiation_coefficient,
    slab_resistance,
    spherical_shell_resistance,
    surface_radiation_coefficient,
)
from .budget import validate_budget
from .config import ScenarioConfig, node_ids


def _shell_terms(cfg: ScenarioConfig) -> dict[str, float]:
    """Wall conduction resistance, gap radiation coefficient and outer area."""
    g, m = cfg.geometry, cfg.materials
    if g.shape == "sphere":
        r_i, r_o, r_a = g.r_inner, g.r_outer, g.r_inner + g.aerogel_thickness
        r_wall = (spherical_shell_resistance(r_i, r_a, m.k_aerogel)
                  + spherical_shell_resistance(r_a, r_o, m.k_structure))
        a_gap_in, a_gap_out = 4.0 * math.pi * r_a**2, 4.0 * math.pi * r_o**2
        a_surface = a_gap_out
    else:
        a, t, ta = g.cube_side, g.cube_wall, g.aerogel_thickness
        # each layer as a slab over the geometric mean of its bounding face areas
        r_wall = (slab_resistance(ta, 6.0 * a * (a + 2 * ta), m.k_aerogel)
                  + slab_resistance(t - ta, 6.0 * (a + 2 * ta) * (a + 2 * t), m.k_structure))
        a_gap_in, a_gap_out = 6.0 * (a + 2 * ta) ** 2, 6.0 * (a + 2 * t) ** 2
        a_surface = a_gap_out
    c_gap = enclosure_radiation_coefficient(a_gap_in, a_gap_out, m.emissivity_inner, m.emissivity_outer)
    return {"r_wall": r_wall, "c_gap": c_gap, "a_surface": a_surface}


def build_network(cfg: ScenarioConfig) -> ThermalNetwork:
    n, m, t = cfg.nodes, cfg.materials, cfg.tess
    t0 = n.initial_temperature_K
    c_core = (n.mass_electronics_g * m.cp_electronics + n.mass_battery_g * m.cp_battery) / 1000.0
    c_inner = (n.mass_inner_g * m.cp_structure + n.mass_insulation_g * m.cp_insulation) / 1000.0
    c_outer = n.mass_outer_g * m.cp_structure / 1000.0
    shell = _shell_terms(cfg)
    inner = "inner" if n.count == 3 else "outer"
    if n.count == 2:
        c_outer += c_inner
    nodes = [ThermalNode("core", c_core, t0)]
    links = [ThermalLink.conduction("core", inner, m.core_contact_R, "core_contact")]
    if n.count == 3:
        nodes.append(ThermalNode("inner", c_inner, t0))
        links += [
            ThermalLink.conduction("inner", "outer", shell["r_wall"], "wall"),
            ThermalLink.radiation("inner", "outer", shell["c_gap"], "gap"),
        ]
    nodes.append(ThermalNode("outer", c_outer, t0))
    links.append(ThermalLink.radiation(
        "outer", BOUNDARY, surface_radiation_coefficient(shell["a_surface"], m.emissivity_surface), "surface"))
    if m.support_R is not None:
        links.append(ThermalLink.conduction("outer", BOUNDARY, m.support_R, "support"))
    if t.enabled:
        c_bed = (n.mass_container_g * m.cp_structure + t.salt_mass_g * m.cp_salt) / 1000.0
        nodes.append(ThermalNode("bed", c_bed, t0))
        links.append(ThermalLink.conduction("bed", inner, m.bed_contact_R, "bed_contact"))
    network = ThermalNetwork(nodes, links)
    assert tuple(network.node_ids) == node_ids(cfg)
    return network


def dissipation_watts(cfg: ScenarioConfig) -> float:
    if cfg.run.dissipation_W is not None:
        return cfg.run.dissipation_W
    return validate_budget(cfg.budget).default_dissipation_W


def build_dissipation(cfg: ScenarioConfig) -> dict[str, float]:
    return {cfg.run.dissipation_node: dissipation_watts(cfg)}


def build_sensors(cfg: ScenarioConfig) -> tuple[SensorModel, ...]:
    return cfg.controller.sensors


def build_policy(cfg: ScenarioConfig) -> ControlPolicy:
    c = cfg.controller
    return ControlPolicy(
        mode=c.mode,
        setpoint=c.setpoint_K,
        hysteresis_band=c.band_K,
        heater_power=c.heater_power_W,
        max_feed_rate=c.max_feed_g_s,
        energy_budget=c.energy_budget_J,
        sensor=c.sensor,
        heater_node=c.heater_node,
    )


def build_source(cfg: ScenarioConfig) -> TessSource | None:
    t = cfg.tess
    if not t.enabled:
        return None
    degradation = DEFAULT_DEGRADATION[t.delivery] if t.degradation is None else t.degradation
    bed = SaltBed(cfg.sorbent_table()[t.sorbent], t.salt_mass_g, t.initial_x, t.rate_constant_per_s, degradation)
    reservoir = WaterReservoir(t.water_g, t.water_temperature_K, t.delivery)
    return TessSource(TessState(bed, reservoir), node="bed", schedule=t.schedule,
                      charge_power=t.charge_power_W, charging_efficiency=t.charge_efficiency)


def build_environment(cfg: ScenarioConfig) -> EnvironmentProfile:
    e = cfg.environment
    if e.kind == "constant":
        return EnvironmentProfile("constant", e.temperature_K, solar_power=e.solar_power_W)
    if e.kind == "table":
        table = e.table
        if table is None:
            path = Path(e.table_file)
            if not path.is_absolute() and cfg.base_dir is not None:
                path = Path(cfg.base_dir) / path
            try:
                table = load_table_csv(path)
            except OSError as exc:
                raise ConfigError(f"cannot read environment table {path}: {exc}",
                                  key="environment.table_file") from None
        return EnvironmentProfile("table", table=table, solar_power=e.solar_power_W)
    return EnvironmentProfile(e.kind, e.day_temperature_K, e.night_temperature_K, e.period_s, e.phase_s,
                              solar_power=e.solar_power_W)


def build_enclosure(cfg: ScenarioConfig) -> EnclosureGeometry:
    """Single-wall equivalent of the configured enclosure for the shape comparison.

    The composite wall is folded into one effective conductivity so that
    the equal-volume counterpart uses identical materials.
    """
    g, m = cfg.geometry, cfg.materials
    r_wall = _shell_terms(cfg)["r_wall"]
    if g.shape == "sphere":
        thickness = g.r_outer - g.r_inner
        k_eff = (1.0 / g.r_inner - 1.0 / g.r_outer) / (4.0 * math.pi * r_wall)
        return EnclosureGeometry("sphere", g.r_inner, thickness, k_eff, m.emissivity_surface)
    a, t = g.cube_side, g.cube_wall
    k_eff = t / (6.0 * a * (a + 2 * t) * r_wall)
    return EnclosureGeometry("cube", a, t, k_eff, m.emissivity_surface)
