"""Thermostat logic for the heater and the TESS flow valve, plus sensor readouts."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError

MODES = ("passive", "heater", "tess_valve")

STORAGE_SETPOINT = 253.15  # K, -20 degC
# 25 g Li-ion cell at 140 Wh/kg, 85 % discharge efficiency.
DEFAULT_HEATER_BUDGET = 0.025 * 140.0 * 0.85 * 3600.0  # J
CONTROL_PERIOD = 10.0  # s


@dataclass(frozen=True)
class SensorModel:
    name: str
    bias: float = 0.0  # K
    quantization: float = 0.0  # K, 0 = continuous
    attach_node: str = "core"

    def __post_init__(self) -> None:
        if self.quantization < 0:
            raise InvalidInputError(f"sensor {self.name}: quantization must be >= 0")


TMP36 = SensorModel("TMP36", bias=2.0, quantization=0.0, attach_node="core")
BMA250 = SensorModel("BMA250", bias=0.0, quantization=0.5, attach_node="core")
DEFAULT_SENSORS = (TMP36, BMA250)


def sense(model: SensorModel, true_temperature: float) -> float:
    if not true_temperature > 0:
        raise InvalidInputError(f"temperature must be > 0 K, got {true_temperature}")
    value = true_temperature + model.bias
    if model.quantization > 0:
        value = math.floor(value / model.quantization + 0.5) * model.quantization
    return value


@dataclass(frozen=True)
class ControlPolicy:
    mode: str = "passive"
    setpoint: float = STORAGE_SETPOINT
    hysteresis_band: float = 1.0
    heater_power: float = 0.0  # W
    max_feed_rate: float = 0.0  # g/s
    energy_budget: float = DEFAULT_HEATER_BUDGET  # J
    sensor: str = "TMP36"
    heater_node: str = "core"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InvalidInputError(f"controller mode must be one of {MODES}, got {self.mode!r}")
        if self.hysteresis_band < 0 or self.heater_power < 0 or self.max_feed_rate < 0:
            raise InvalidInputError("band, heater power and feed rate must be >= 0")
        if self.energy_budget < 0:
            raise InvalidInputError("energy budget must be >= 0")
        if not self.setpoint > 0:
            raise InvalidInputError("setpoint must be > 0 K")


def control_step(
    policy: ControlPolicy,
    sensed: float,
    prev_actuation: bool,
    budget_remaining: float = math.inf,
    source_exhausted: bool = False,
) -> bool:
    """Bang-bang decision with a dead band centred on the setpoint."""
    if policy.mode == "passive":
        return False
    if policy.mode == "heater" and budget_remaining <= 0:
        return False
    if policy.mode == "tess_valve" and source_exhausted:
        return False
    half = 0.5 * policy.hysteresis_band
    if sensed < policy.setpoint - half:
        return True
    if sensed > policy.setpoint + half:
        return False
    return prev_actuation


@dataclass
class ControllerState:
    actuation: bool = False
    heater_energy_spent: float = 0.0

    def budget_remaining(self, policy: ControlPolicy) -> float:
        return policy.energy_budget - self.heater_energy_spent
