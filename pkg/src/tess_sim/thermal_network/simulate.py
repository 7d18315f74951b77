"""Transient simulation of a network with controller, heat source and environment.

The run is split into segments at every controller tick, output sample,
environment discontinuity and heater-budget exhaustion; inside a segment
the actuation is frozen and the right-hand side is smooth. Cumulative
energies are carried as extra ODE components so the audit uses the
integrator's own quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..controller import CONTROL_PERIOD, ControlPolicy, SensorModel, control_step, sense
from ..environment import EnvironmentProfile, ambient_at
from ..errors import InvalidInputError
from .elements import ThermalNetwork, link_flows
from .integrator import StepStats, integrate
from .solve import NetworkState

_EPS = 1e-9


@dataclass
class SimulationResult:
    columns: list[str]
    rows: list[list[float]]
    node_ids: list[str]
    sensor_names: list[str]
    initial_state: NetworkState
    final_state: NetworkState
    control_log: list[tuple[float, float, bool]] = field(default_factory=list)
    audit_residual: float = 0.0  # J
    heat_exchanged: float = 0.0  # J
    heater_energy: float = 0.0  # J
    final_source_states: tuple[float, ...] = ()
    stats: StepStats = field(default_factory=StepStats)

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows])

    @property
    def times(self) -> np.ndarray:
        return self.column("time_s")


def series_columns(node_ids: Sequence[str], sensor_names: Sequence[str]) -> list[str]:
    return (
        ["time_s"]
        + [f"T_{n}_K" for n in node_ids]
        + ["Q_source_W", "Q_boundary_W", "actuation", "q_heater_W", "feed_g_s",
           "x_bar", "water_g", "q_tess_W", "heat_released_J", "T_ambient_K"]
        + [f"S_{s}_K" for s in sensor_names]
        + ["E_stored_J", "E_source_J", "E_boundary_J", "E_exchanged_J"]
    )


class _Model:
    def __init__(self, network, environment, source, base_dissipation, solar_index, heater_index):
        self.network = network
        self.env = environment
        self.source = source
        self.compiled = network.compiled_links()
        self.caps = network.capacities
        self.n = len(self.caps)
        self.n_links = len(self.compiled)
        self.base = list(base_dissipation)
        self.solar_index = solar_index
        self.heater_index = heater_index
        self.src_index = network.index[source.node] if source is not None else -1
        # layout: temps | link heats | E_src, E_bnd, E_exch, E_heater | source states
        self.i_energy = self.n + self.n_links
        self.i_src = self.i_energy + 4
        self.size = self.i_src + (source.n_states if source is not None else 0)
        # segment parameters
        self.heater_power = 0.0
        self.feed = 0.0
        self.charging = False
        self.solar = 0.0

    def initial(self) -> np.ndarray:
        y = np.zeros(self.size)
        y[: self.n] = self.network.initial_temperatures()
        if self.source is not None:
            y[self.i_src:] = self.source.initial_states()
        return y

    def terms(self, t: float, y: np.ndarray):
        n = self.n
        temps = y[:n]
        boundary = ambient_at(self.env, t)
        flows = link_flows(self.compiled, temps, boundary)
        net = list(self.base)
        if self.solar:
            net[self.solar_index] += self.solar
        if self.heater_power:
            net[self.heater_index] += self.heater_power
        q_src = sum(net)
        exch = sum(abs(q) for q in net)
        q_tess = 0.0
        dsrc = ()
        if self.source is not None:
            q_tess, dsrc = self.source.rates(temps[self.src_index], y[self.i_src:], self.feed, self.charging)
            net[self.src_index] += q_tess
            q_src += q_tess
            exch += abs(q_tess)
        q_bnd = 0.0
        for (ia, ib, _, _), q in zip(self.compiled, flows):
            exch += abs(q)
            if ia >= 0:
                net[ia] -= q
            else:
                q_bnd -= q
            if ib >= 0:
                net[ib] += q
            else:
                q_bnd += q
        return boundary, flows, net, q_src, q_bnd, exch, q_tess, dsrc

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        _, flows, net, q_src, q_bnd, exch, _, dsrc = self.terms(t, y)
        caps = self.caps
        return np.array(
            [net[i] / caps[i] for i in range(self.n)]
            + flows
            + [q_src, q_bnd, exch, self.heater_power]
            + list(dsrc)
        )


def simulate(
    network: ThermalNetwork,
    environment: EnvironmentProfile,
    duration: float,
    output_interval: float,
    controller: ControlPolicy | None = None,
    source=None,
    sensors: Sequence[SensorModel] = (),
    dissipation=None,
    solar_node: str | None = None,
    control_period: float = CONTROL_PERIOD,
    rtol: float = 1e-8,
    atol: float = 1e-6,
    max_rejections: int = 50,
) -> SimulationResult:
    """Run the network for ``duration`` seconds, sampling every ``output_interval``.

    ``source`` is a heat source object such as :class:`tess_sim.tess_model.TessSource`.
    The controller is evaluated every ``control_period`` seconds regardless
    of its mode, so a passive controller and no controller give identical
    trajectories.
    """
    if duration < 0:
        raise InvalidInputError(f"duration must be >= 0, got {duration}")
    if not output_interval > 0:
        raise InvalidInputError(f"output interval must be > 0, got {output_interval}")
    if not control_period > 0:
        raise InvalidInputError("control period must be > 0")
    sensors = list(sensors)
    for s in sensors:
        if s.attach_node not in network.index:
            raise InvalidInputError(f"sensor {s.name} attached to unknown node {s.attach_node!r}")
    policy = controller or ControlPolicy("passive")
    control_sensor = None
    if policy.mode != "passive":
        matches = [s for s in sensors if s.name == policy.sensor]
        if not matches:
            raise InvalidInputError(f"controller sensor {policy.sensor!r} is not among the sensors")
        control_sensor = matches[0]
    heater_index = -1
    if policy.mode == "heater":
        if policy.heater_node not in network.index:
            raise InvalidInputError(f"heater node {policy.heater_node!r} not in network")
        heater_index = network.index[policy.heater_node]
    if policy.mode == "tess_valve" and (source is None or not source.metered):
        raise InvalidInputError("tess_valve control needs a valve-scheduled TESS source")
    if source is not None and source.node not in network.index:
        raise InvalidInputError(f"source node {source.node!r} not in network")
    solar_index = -1
    if environment.solar_power > 0:
        if solar_node is None or solar_node not in network.index:
            raise InvalidInputError(f"solar load needs a valid node, got {solar_node!r}")
        solar_index = network.index[solar_node]

    if dissipation is None:
        base = network.dissipation()
    elif isinstance(dissipation, dict):
        base = [0.0] * len(network.nodes)
        for k, v in dissipation.items():
            base[network.index[k]] += float(v)
    else:
        base = [float(v) for v in dissipation]

    model = _Model(network, environment, source, base, solar_index, heater_index)
    node_ids = network.node_ids
    columns = series_columns(node_ids, [s.name for s in sensors])
    y = model.initial()
    initial_state = NetworkState.initial(network)
    caps = model.caps
    t0_temps = list(y[: model.n])
    stats = StepStats()
    result = SimulationResult(columns, [], node_ids, [s.name for s in sensors], initial_state,
                              initial_state, stats=stats)
    if duration == 0:
        return result

    n_out = int(math.floor(duration / output_interval + _EPS))
    out_times = [k * output_interval for k in range(n_out + 1)]
    if duration - out_times[-1] > _EPS * max(1.0, duration):
        out_times.append(duration)
    out_k = 0
    tick_k = 0
    actuation = False
    t = 0.0
    h = None
    ie = model.i_energy

    def record(t: float, y: np.ndarray) -> None:
        boundary, _, _, q_src, q_bnd, exch, q_tess, _ = model.terms(t, y)
        temps = y[: model.n]
        if source is not None:
            st = y[model.i_src:]
            x_bar, water, released = source.x_bar(st), source.reservoir(st), source.heat_released(st)
        else:
            x_bar = water = released = 0.0
        stored = sum(c * (T - T0) for c, T, T0 in zip(caps, temps, t0_temps))
        row = (
            [t] + temps.tolist()
            + [q_src, q_bnd, 1.0 if actuation else 0.0, model.heater_power, model.feed,
               x_bar, water, q_tess, released, boundary]
            + [sense(s, temps[network.index[s.attach_node]]) for s in sensors]
            + [stored, y[ie], y[ie + 1], y[ie + 2]]
        )
        result.rows.append([float(v) for v in row])

    def budget_left(y: np.ndarray) -> float:
        return policy.energy_budget - y[ie + 3]

    budget_floor = _EPS * max(1.0, policy.energy_budget if math.isfinite(policy.energy_budget) else 1.0)

    while True:
        next_tick = tick_k * control_period
        if abs(t - next_tick) <= _EPS * max(1.0, t):
            if control_sensor is not None:
                sensed = sense(control_sensor, y[network.index[control_sensor.attach_node]])
                exhausted = source.exhausted(y[model.i_src:]) if source is not None else False
                actuation = control_step(policy, sensed, actuation, budget_left(y), exhausted)
                result.control_log.append((t, sensed, actuation))
            tick_k += 1
            next_tick = tick_k * control_period
        model.feed = policy.max_feed_rate if (actuation and policy.mode == "tess_valve") else 0.0
        model.heater_power = 0.0
        if actuation and policy.mode == "heater" and budget_left(y) > budget_floor:
            model.heater_power = policy.heater_power
        model.charging = source is not None and source.charge_power > 0 and environment.is_day(t)
        model.solar = environment.solar_power if (solar_index >= 0 and environment.is_day(t)) else 0.0
        if out_k < len(out_times) and abs(t - out_times[out_k]) <= _EPS * max(1.0, t):
            record(t, y)
            out_k += 1
        if out_k >= len(out_times):
            break
        seg_end = min(next_tick, out_times[out_k])
        bps = environment.breakpoints(t, seg_end)
        if bps:
            seg_end = bps[0]
        if model.heater_power > 0:
            t_ex = t + budget_left(y) / model.heater_power
            if t_ex < seg_end:
                seg_end = t_ex
        y, h = integrate(model.rhs, t, y, seg_end, h0=h, rtol=rtol, atol=atol, n_temps=model.n,
                         max_rejections=max_rejections, stats=stats)
        t = seg_end

    n, nl = model.n, model.n_links
    final = NetworkState(t, tuple(y[:n].tolist()), tuple(y[n:n + nl].tolist()))
    result.final_state = final
    stored = sum(c * (T - T0) for c, T, T0 in zip(caps, y[:n], t0_temps))
    result.audit_residual = float(stored - (y[ie] - y[ie + 1]))
    result.heat_exchanged = float(y[ie + 2])
    result.heater_energy = float(y[ie + 3])
    result.final_source_states = tuple(y[model.i_src:].tolist())
    return result
