"""Ambient boundary-temperature profiles (all temperatures in K, times in s)."""
from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidInputError

KINDS = ("constant", "square_wave", "sinusoid", "table")

HOUR = 3600.0


@dataclass(frozen=True)
class EnvironmentProfile:
    """Prescribed ambient temperature.

    ``constant`` uses ``day_temperature``. Periodic kinds evaluate the phase
    ``tau = (t - phase) mod period``: ``square_wave`` is at the day value for
    ``tau < period/2`` and the night value after; ``sinusoid`` is
    ``mean + half_amplitude * cos(2*pi*tau/period)`` so it peaks at the day
    value when ``tau = 0``. ``table`` interpolates linearly between
    ``(t, K)`` samples and clamps outside them.

    ``solar_power`` is an extra heat load (W) on the outer shell applied
    while :meth:`is_day` holds.
    """

    kind: str
    day_temperature: float = 0.0
    night_temperature: float = 0.0
    period: float = 0.0
    phase: float = 0.0
    table: tuple[tuple[float, float], ...] = field(default_factory=tuple)
    solar_power: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", tuple((float(t), float(v)) for t, v in self.table))
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown environment kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "table":
            if len(self.table) < 2:
                raise InvalidInputError("table profile needs at least 2 samples")
            times = [t for t, _ in self.table]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise InvalidInputError("table profile times must be strictly increasing")
            if any(not v > 0 for _, v in self.table):
                raise InvalidInputError("table profile temperatures must be > 0 K")
        else:
            if not self.day_temperature > 0:
                raise InvalidInputError(f"temperature must be > 0 K, got {self.day_temperature}")
            if self.kind != "constant":
                if not self.night_temperature > 0:
                    raise InvalidInputError(f"night temperature must be > 0 K, got {self.night_temperature}")
                if not self.period > 0:
                    raise InvalidInputError(f"period must be > 0 s, got {self.period}")
        if self.solar_power < 0:
            raise InvalidInputError("solar_power must be >= 0")

    @property
    def periodic(self) -> bool:
        return self.kind in ("square_wave", "sinusoid")

    def bounds(self) -> tuple[float, float]:
        if self.kind == "table":
            values = [v for _, v in self.table]
        elif self.kind == "constant":
            values = [self.day_temperature]
        else:
            values = [self.day_temperature, self.night_temperature]
        return min(values), max(values)

    def _tau(self, t: float) -> float:
        return (t - self.phase) % self.period

    def is_day(self, t: float) -> bool:
        if self.kind == "constant":
            return True
        if self.kind == "table":
            lo, hi = self.bounds()
            return ambient_at(self, t) >= 0.5 * (lo + hi)
        tau = self._tau(t)
        if self.kind == "sinusoid":
            return tau < 0.25 * self.period or tau >= 0.75 * self.period
        return tau < 0.5 * self.period

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        """Times in (t0, t1) where the profile, its slope or its day flag jumps."""
        if self.periodic:
            half = 0.5 * self.period
            origin = self.phase + (0.25 * self.period if self.kind == "sinusoid" else 0.0)
            k = math.floor((t0 - origin) / half) + 1
            out = []
            while True:
                t = origin + k * half
                if t >= t1:
                    return out
                if t > t0:
                    out.append(t)
                k += 1
        if self.kind == "table":
            return [t for t, _ in self.table if t0 < t < t1]
        return []


def ambient_at(profile: EnvironmentProfile, t: float) -> float:
    if t < 0:
        raise InvalidInputError(f"t must be >= 0, got {t}")
    kind = profile.kind
    if kind == "constant":
        return profile.day_temperature
    if kind == "square_wave":
        return profile.day_temperature if profile._tau(t) < 0.5 * profile.period else profile.night_temperature
    if kind == "sinusoid":
        mean = 0.5 * (profile.day_temperature + profile.night_temperature)
        half = 0.5 * (profile.day_temperature - profile.night_temperature)
        value = mean + half * math.cos(2.0 * math.pi * profile._tau(t) / profile.period)
        lo, hi = profile.bounds()
        return min(max(value, lo), hi)
    times = [p[0] for p in profile.table]
    if t <= times[0]:
        return profile.table[0][1]
    if t >= times[-1]:
        return profile.table[-1][1]
    i = bisect.bisect_right(times, t) - 1
    (ta, va), (tb, vb) = profile.table[i], profile.table[i + 1]
    if t == ta:
        return va
    return va + (vb - va) * (t - ta) / (tb - ta)


def load_table_csv(path: str | Path) -> tuple[tuple[float, float], ...]:
    """Read a two-column ``t_s, T_K`` CSV (header optional)."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except ValueError:
                if rows:
                    raise InvalidInputError(f"{path}: non-numeric row {rec}") from None
                # header line
    return tuple(rows)


def freezer(temperature: float = 241.0) -> EnvironmentProfile:
    return EnvironmentProfile("constant", day_temperature=temperature)


def lunar_night() -> EnvironmentProfile:
    return EnvironmentProfile("constant", day_temperature=123.15)


def asteroid(day_temperature: float = 273.15, night_temperature: float = 123.15,
             period: float = 3 * HOUR) -> EnvironmentProfile:
    return EnvironmentProfile("square_wave", day_temperature, night_temperature, period)


def mars_diurnal() -> EnvironmentProfile:
    """Representative equatorial cycle: 210 K mean, +/-60 K, one sol."""
    return EnvironmentProfile("sinusoid", 270.0, 150.0, 24.62 * HOUR)


PRESETS = {
    "freezer": freezer,
    "lunar_night": lunar_night,
    "asteroid": asteroid,
    "mars": mars_diurnal,
}
