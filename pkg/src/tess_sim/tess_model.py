"""Thermochemical heat source: salt-bed hydration, water reservoir, kinetics, recharge.

The bed's hydration is tracked as a real-valued mean level ``x_bar`` (mol
water per mol salt). The cumulative reaction enthalpy of the bed is the
piecewise-linear interpolation of the tabulated hydrate enthalpies, so the
heat per mole of absorbed water is constant between tabulated levels.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, replace

from .errors import InvalidInputError
from .thermo_props import WATER_MOLAR_MASS, SorbentSpec

WATER_CP_LIQUID = 4.18  # J/(g K)
DEFAULT_RATE_CONSTANT = 1.0 / 2700.0  # 1/s; 63 % of a fresh bed's capacity in 45 min
DELIVERY_MODES = ("liquid", "vapor")
DEFAULT_DEGRADATION = {"liquid": 1.0, "vapor": 0.0}


@dataclass(frozen=True)
class SaltBed:
    sorbent: SorbentSpec
    dry_mass: float  # g
    mean_hydration_x: float = 0.0
    rate_constant: float = DEFAULT_RATE_CONSTANT
    degradation_coefficient: float = 0.0

    def __post_init__(self) -> None:
        if not self.dry_mass > 0:
            raise InvalidInputError(f"dry salt mass must be > 0 g, got {self.dry_mass}")
        if not 0.0 <= self.mean_hydration_x <= self.sorbent.x_max:
            raise InvalidInputError(
                f"mean hydration {self.mean_hydration_x} outside [0, {self.sorbent.x_max}]"
            )
        if self.rate_constant < 0 or self.degradation_coefficient < 0:
            raise InvalidInputError("rate constant and degradation coefficient must be >= 0")

    @property
    def salt_moles(self) -> float:
        return self.dry_mass / self.sorbent.molar_mass_dehydrated

    def uptake_remaining(self) -> float:
        """Grams of water the bed can still bind before reaching the top hydrate."""
        return max(0.0, (self.sorbent.x_max - self.mean_hydration_x) * self.salt_moles * WATER_MOLAR_MASS)


@dataclass(frozen=True)
class WaterReservoir:
    mass: float  # g
    temperature: float = 273.15  # K
    delivery_mode: str = "liquid"

    def __post_init__(self) -> None:
        if self.mass < 0:
            raise InvalidInputError(f"reservoir mass must be >= 0 g, got {self.mass}")
        if self.delivery_mode not in DELIVERY_MODES:
            raise InvalidInputError(f"delivery mode must be one of {DELIVERY_MODES}")
        if not self.temperature > 0:
            raise InvalidInputError("reservoir temperature must be > 0 K")


@dataclass(frozen=True)
class TessState:
    bed: SaltBed
    reservoir: WaterReservoir
    cumulative_heat_released: float = 0.0  # J
    cumulative_water_absorbed: float = 0.0  # g, net of recharge


# -- piecewise-linear enthalpy of the bed ------------------------------------

def cumulative_enthalpy(sorbent: SorbentSpec, x_bar: float) -> float:
    """Reaction enthalpy (kJ per mol salt, <= 0) of hydrating dry salt to ``x_bar``."""
    levels = sorbent.levels()
    values = sorbent.cumulative_enthalpies()
    if not 0.0 <= x_bar <= levels[-1]:
        raise InvalidInputError(f"x_bar={x_bar} outside [0, {levels[-1]}]")
    i = min(bisect.bisect_right(levels, x_bar), len(levels) - 1)
    x0, x1 = levels[i - 1], levels[i]
    h0, h1 = values[i - 1], values[i]
    return h0 + (h1 - h0) * (x_bar - x0) / (x1 - x0)


def hydration_at_enthalpy(sorbent: SorbentSpec, enthalpy: float) -> float:
    """Inverse of :func:`cumulative_enthalpy`, clamped to [0, x_max]."""
    levels = sorbent.levels()
    values = sorbent.cumulative_enthalpies()
    if enthalpy >= 0.0:
        return 0.0
    if enthalpy <= values[-1]:
        return float(levels[-1])
    for i in range(1, len(levels)):
        if enthalpy >= values[i]:
            x0, x1 = levels[i - 1], levels[i]
            h0, h1 = values[i - 1], values[i]
            return x0 + (x1 - x0) * (enthalpy - h0) / (h1 - h0)
    return float(levels[-1])


def _segment(sorbent: SorbentSpec, x_bar: float, below: bool) -> int:
    levels = sorbent.levels()
    if below:
        i = bisect.bisect_left(levels, x_bar)
    else:
        i = bisect.bisect_right(levels, x_bar)
    return min(max(i, 1), len(levels) - 1)


def step_heat_per_mole(sorbent: SorbentSpec, x_bar: float, below: bool = False) -> float:
    """|d dHr / dx| in kJ per mol water at ``x_bar``.

    Uses the tabulated segment above ``x_bar`` (hydration direction), or the
    one below it when ``below`` is set (dehydration direction).
    """
    levels = sorbent.levels()
    values = sorbent.cumulative_enthalpies()
    i = _segment(sorbent, x_bar, below)
    return abs((values[i] - values[i - 1]) / (levels[i] - levels[i - 1]))


def efficiency(bed: SaltBed, x_bar: float | None = None) -> float:
    x = bed.mean_hydration_x if x_bar is None else x_bar
    return math.exp(-bed.degradation_coefficient * x / bed.sorbent.x_max)


# -- capacity -----------------------------------------------------------------

def reachable_hydration(bed: SaltBed, available_water: float) -> float:
    x = bed.mean_hydration_x + available_water / WATER_MOLAR_MASS / bed.salt_moles
    return min(x, float(bed.sorbent.x_max))


def total_capacity_joules(bed: SaltBed, available_water: float) -> float:
    if available_water < 0:
        raise InvalidInputError("available water must be >= 0 g")
    x_end = reachable_hydration(bed, available_water)
    dh = cumulative_enthalpy(bed.sorbent, bed.mean_hydration_x) - cumulative_enthalpy(bed.sorbent, x_end)
    return dh * 1000.0 * bed.salt_moles


def total_capacity(bed: SaltBed, available_water: float) -> float:
    """Chemical heat (Wh) from hydrating the bed with the available water."""
    return total_capacity_joules(bed, available_water) / 3600.0


# -- rates --------------------------------------------------------------------

@dataclass(frozen=True)
class ReleaseRate:
    heat: float  # W, chemical, >= 0
    absorption: float  # g/s of water bound
    feed_clipped: bool = False


def _release(
    sorbent: SorbentSpec,
    salt_moles: float,
    rate_constant: float,
    degradation: float,
    x_bar: float,
    reservoir_g: float,
    feed: float,
) -> tuple[float, float]:
    """(heat W, absorption g/s) for raw state values; shared with the simulator."""
    x_max = sorbent.x_max
    if feed <= 0.0 or reservoir_g <= 0.0 or x_bar >= x_max:
        return 0.0, 0.0
    uptake = (x_max - x_bar) * salt_moles * WATER_MOLAR_MASS
    eff = math.exp(-degradation * x_bar / x_max)
    limit = rate_constant * min(reservoir_g, uptake) * eff
    absorption = min(feed, limit)
    heat = absorption / WATER_MOLAR_MASS * step_heat_per_mole(sorbent, max(x_bar, 0.0)) * 1000.0 * eff
    return heat, absorption


def heat_release_rate(state: TessState, water_feed_rate: float) -> ReleaseRate:
    """Instantaneous chemical heat release for a given water feed (g/s).

    ``math.inf`` as feed means the water is already in contact with the bed
    and only the kinetic limit applies.
    """
    if water_feed_rate < 0:
        raise InvalidInputError(f"feed rate must be >= 0, got {water_feed_rate}")
    clipped = water_feed_rate > 0 and state.reservoir.mass <= 0
    bed = state.bed
    heat, absorption = _release(
        bed.sorbent,
        bed.salt_moles,
        bed.rate_constant,
        bed.degradation_coefficient,
        bed.mean_hydration_x,
        state.reservoir.mass,
        water_feed_rate,
    )
    return ReleaseRate(heat, absorption, clipped)


def sensible_heat_rate(absorption: float, reservoir: WaterReservoir, bed_temperature: float) -> float:
    """Heat (W) the incoming water carries into the bed; negative when it is colder."""
    if reservoir.delivery_mode != "liquid":
        return 0.0
    return absorption * WATER_CP_LIQUID * (reservoir.temperature - bed_temperature)


# -- discrete state updates ---------------------------------------------------

def _released_heat(bed: SaltBed, x0: float, x1: float) -> float:
    """Heat (J) released hydrating from x0 to x1 including the degradation factor."""
    sorbent = bed.sorbent
    levels = sorbent.levels()
    d = bed.degradation_coefficient / sorbent.x_max
    total = 0.0
    for i in range(1, len(levels)):
        lo, hi = max(x0, levels[i - 1]), min(x1, levels[i])
        if hi <= lo:
            continue
        slope = step_heat_per_mole(sorbent, levels[i - 1])
        if d == 0:
            integral = hi - lo
        else:
            integral = (math.exp(-d * lo) - math.exp(-d * hi)) / d
        total += slope * integral
    return total * 1000.0 * bed.salt_moles


def absorb(state: TessState, water_g: float) -> TessState:
    """Bind up to ``water_g`` grams from the reservoir in one go."""
    if water_g < 0:
        raise InvalidInputError("water mass must be >= 0 g")
    bed = state.bed
    water_g = min(water_g, state.reservoir.mass, bed.uptake_remaining())
    x0 = bed.mean_hydration_x
    x1 = min(x0 + water_g / WATER_MOLAR_MASS / bed.salt_moles, float(bed.sorbent.x_max))
    return TessState(
        replace(bed, mean_hydration_x=x1),
        replace(state.reservoir, mass=state.reservoir.mass - water_g),
        state.cumulative_heat_released + _released_heat(bed, x0, x1),
        state.cumulative_water_absorbed + water_g,
    )


def charge(state: TessState, input_power: float, dt: float, charging_efficiency: float = 1.0) -> TessState:
    """Drive water out of the bed with ``input_power`` for ``dt`` seconds."""
    if input_power < 0 or dt < 0:
        raise InvalidInputError("input power and dt must be >= 0")
    if not 0 < charging_efficiency <= 1:
        raise InvalidInputError(f"charging efficiency must be in (0, 1], got {charging_efficiency}")
    bed = state.bed
    if bed.mean_hydration_x <= 0 or input_power == 0 or dt == 0:
        return state
    useful_kj = input_power * dt * charging_efficiency / 1000.0
    h_now = cumulative_enthalpy(bed.sorbent, bed.mean_hydration_x)
    x_new = hydration_at_enthalpy(bed.sorbent, h_now + useful_kj / bed.salt_moles)
    returned = (bed.mean_hydration_x - x_new) * bed.salt_moles * WATER_MOLAR_MASS
    return TessState(
        replace(bed, mean_hydration_x=x_new),
        replace(state.reservoir, mass=state.reservoir.mass + returned),
        state.cumulative_heat_released,
        state.cumulative_water_absorbed - returned,
    )


def recharge_energy(state: TessState, charging_efficiency: float = 1.0) -> float:
    """Energy (J) needed to take the bed back to the dry salt."""
    bed = state.bed
    return -cumulative_enthalpy(bed.sorbent, bed.mean_hydration_x) * 1000.0 * bed.salt_moles / charging_efficiency


# -- simulator adapter --------------------------------------------------------

SCHEDULES = ("batch", "valve")


class TessSource:
    """Heat source plugged into the thermal simulation.

    ODE states: water absorbed (g, net) and chemical heat released (J).
    ``batch`` puts the whole reservoir in contact with the bed at t=0;
    ``valve`` only absorbs what the controller meters in. During day phases
    ``charge_power`` (W) dehydrates the bed.
    """

    n_states = 2
    state_names = ("water_absorbed_g", "heat_released_J")

    def __init__(
        self,
        initial: TessState,
        node: str = "bed",
        schedule: str = "batch",
        charge_power: float = 0.0,
        charging_efficiency: float = 1.0,
    ):
        if schedule not in SCHEDULES:
            raise InvalidInputError(f"schedule must be one of {SCHEDULES}")
        if charge_power < 0 or not 0 < charging_efficiency <= 1:
            raise InvalidInputError("charge power must be >= 0 and efficiency in (0, 1]")
        self.initial = initial
        self.node = node
        self.schedule = schedule
        self.charge_power = charge_power
        self.charging_efficiency = charging_efficiency
        bed = initial.bed
        self._sorbent = bed.sorbent
        self._moles = bed.salt_moles
        self._k = bed.rate_constant
        self._deg = bed.degradation_coefficient
        self._x0 = bed.mean_hydration_x
        self._water0 = initial.reservoir.mass
        self._cp = WATER_CP_LIQUID if initial.reservoir.delivery_mode == "liquid" else 0.0
        self._t_water = initial.reservoir.temperature

    @property
    def metered(self) -> bool:
        return self.schedule == "valve"

    def initial_states(self) -> list[float]:
        return [0.0, 0.0]

    def x_bar(self, states) -> float:
        absorbed = min(states[0], self._water0)
        x = self._x0 + absorbed / WATER_MOLAR_MASS / self._moles
        return min(max(x, 0.0), float(self._sorbent.x_max))

    def heat_released(self, states) -> float:
        """Cumulative chemical heat (J).

        Without charging the hydration path is monotone, so the closed form of
        the reached x_bar is exact and cannot drift past the capacity; with
        charging the integrated state carries the path history.
        """
        if self.charge_power > 0:
            return states[1]
        return _released_heat(self.initial.bed, self._x0, self.x_bar(states))

    def reservoir(self, states) -> float:
        return max(self._water0 - states[0], 0.0)

    def exhausted(self, states) -> bool:
        return self.reservoir(states) <= 0.0 or self.x_bar(states) >= self._sorbent.x_max

    def rates(self, bed_temperature: float, states, feed: float, charging: bool):
        """(net heat into the node W, [d absorbed, d heat released])."""
        x = self.x_bar(states)
        if not self.metered:
            feed = math.inf
        heat, absorption = _release(
            self._sorbent, self._moles, self._k, self._deg, x, self.reservoir(states), feed
        )
        d_absorbed = absorption
        if charging and self.charge_power > 0 and x > 0:
            per_gram = step_heat_per_mole(self._sorbent, x, below=True) * 1000.0 / WATER_MOLAR_MASS
            d_absorbed -= self.charge_power * self.charging_efficiency / per_gram
        q = heat + absorption * self._cp * (self._t_water - bed_temperature)
        return q, (d_absorbed, heat)

    def state_at(self, states) -> TessState:
        bed = replace(self.initial.bed, mean_hydration_x=self.x_bar(states))
        reservoir = replace(self.initial.reservoir, mass=self.reservoir(states))
        return TessState(bed, reservoir, self.initial.cumulative_heat_released + self.heat_released(states),
                         self.initial.cumulative_water_absorbed + states[0])
