"""Mass and power budgets of the probe and their consistency report."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MassEntry:
    name: str
    mass_g: float
    deviation: float
    max_mass_g: float


@dataclass(frozen=True)
class PowerEntry:
    name: str
    current_mA: float | None
    voltage_V: float | None
    power_mW: float | None
    heat_lost_mW: float | None


DEFAULT_MASS_BUDGET = (
    MassEntry("outer_sphere", 178.0, 1.2, 210.0),
    MassEntry("inner_sphere", 102.0, 1.2, 120.0),
    MassEntry("connector_ring", 5.0, 1.1, 6.0),
    MassEntry("battery_holders", 19.0, 1.1, 200.0),
    MassEntry("tcm_container", 21.0, 1.1, 23.0),
    MassEntry("microprocessor", 4.0, 1.1, 5.0),
    MassEntry("sd_card_module", 4.0, 1.1, 5.0),
    MassEntry("uhf_radio", 7.0, 1.1, 8.0),
    MassEntry("bma250", 4.0, 1.1, 4.0),
    MassEntry("tmp36", 2.0, 1.1, 2.0),
    MassEntry("battery", 25.0, 1.3, 33.0),
    MassEntry("insulation", 3.0, 1.1, 3.0),
    MassEntry("tcm_salt", 25.0, 1.2, 30.0),
)

DEFAULT_POWER_BUDGET = (
    PowerEntry("processor", 1.2, 3.5, 4.2, 0.42),
    PowerEntry("sd_card", 100.0, 3.5, 350.0, 35.0),
    PowerEntry("sensor_board", 0.14, 3.5, 0.49, 0.0),
    PowerEntry("tmp36", 0.05, 3.5, 0.175, 0.0),
    PowerEntry("battery", None, None, 355.0, 53.0),
)

# A listed max mass this far from mass*deviation is treated as a transcription
# slip and replaced by the rounded product in the reconciled total.
GROSS_MISMATCH = 0.5


@dataclass(frozen=True)
class BudgetModel:
    mass: tuple[MassEntry, ...] = DEFAULT_MASS_BUDGET
    power: tuple[PowerEntry, ...] = DEFAULT_POWER_BUDGET
    listed_mass_total_g: float | None = 470.0
    listed_heat_total_mW: float | None = 90.0


@dataclass(frozen=True)
class BudgetReport:
    mass_total_g: float
    listed_max_sum_g: float
    max_mass_total_g: float  # reconciled
    listed_mass_total_g: float | None
    within_mass_ceiling: bool
    mass_flags: tuple[str, ...]
    heat_lost_computed_mW: float
    heat_lost_listed_mW: float | None
    power_flags: tuple[str, ...]
    default_dissipation_W: float

    def to_text(self) -> str:
        lines = [
            f"mass_total_g = {self.mass_total_g:.2f}",
            f"listed_max_sum_g = {self.listed_max_sum_g:.2f}",
            f"max_mass_total_g = {self.max_mass_total_g:.2f}",
            f"listed_mass_total_g = {self.listed_mass_total_g}",
            f"within_mass_ceiling = {str(self.within_mass_ceiling).lower()}",
            f"heat_lost_computed_mW = {self.heat_lost_computed_mW:.3f}",
            f"heat_lost_listed_mW = {self.heat_lost_listed_mW}",
            f"default_dissipation_W = {self.default_dissipation_W:.6g}",
        ]
        lines += [f"flag = {f}" for f in self.mass_flags + self.power_flags]
        return "\n".join(lines)


def validate_budget(budget: BudgetModel) -> BudgetReport:
    """Totals and consistency flags; never raises on inconsistent data."""
    mass_flags = []
    reconciled = 0.0
    for e in budget.mass:
        expected = e.mass_g * e.deviation
        if e.max_mass_g < expected:
            mass_flags.append(
                f"{e.name}: max {e.max_mass_g:g} g below mass x deviation {expected:.2f} g"
            )
        if expected > 0 and abs(e.max_mass_g - expected) > GROSS_MISMATCH * expected:
            mass_flags.append(
                f"{e.name}: max {e.max_mass_g:g} g inconsistent with mass x deviation "
                f"{expected:.2f} g; reconciled total uses {round(expected):g} g"
            )
            reconciled += round(expected)
        else:
            reconciled += e.max_mass_g
    listed_max_sum = sum(e.max_mass_g for e in budget.mass)
    ceiling = budget.listed_mass_total_g
    within = True if ceiling is None else reconciled <= ceiling + 1e-9
    if ceiling is not None and abs(listed_max_sum - ceiling) > 1e-9:
        mass_flags.append(f"listed max masses sum to {listed_max_sum:g} g, table total is {ceiling:g} g")

    power_flags = []
    heat = 0.0
    for e in budget.power:
        if e.heat_lost_mW is not None:
            heat += e.heat_lost_mW
        if e.current_mA is not None and e.voltage_V is not None and e.power_mW is not None:
            if abs(e.current_mA * e.voltage_V - e.power_mW) > 1e-6 * max(1.0, e.power_mW):
                power_flags.append(f"{e.name}: {e.current_mA} mA x {e.voltage_V} V != {e.power_mW} mW")
    listed = budget.listed_heat_total_mW
    if listed is not None and abs(listed - heat) > 1e-9:
        power_flags.append(f"heat lost entries sum to {heat:.2f} mW, table total is {listed:g} mW")
    default_w = (listed if listed is not None else heat) / 1000.0
    return BudgetReport(
        mass_total_g=sum(e.mass_g for e in budget.mass),
        listed_max_sum_g=listed_max_sum,
        max_mass_total_g=reconciled,
        listed_mass_total_g=ceiling,
        within_mass_ceiling=within,
        mass_flags=tuple(mass_flags),
        heat_lost_computed_mW=heat,
        heat_lost_listed_mW=listed,
        power_flags=tuple(power_flags),
        default_dissipation_W=default_w,
    )
