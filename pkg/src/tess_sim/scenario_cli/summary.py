"""Run summaries computed from the output series alone, and the CSV/text I/O."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidInputError

STEADY_RATE = 0.01  # K/min
STEADY_WINDOW = 30.0 * 60.0  # s
NOT_REACHED = "not-reached"


@dataclass(frozen=True)
class SensorSummary:
    name: str
    steady_state_K: float | None  # None when the steady criterion is never met
    time_to_steady_s: float | None
    time_above_threshold_s: float
    area_above_ambient_K_min: float


@dataclass(frozen=True)
class RunSummary:
    threshold_K: float
    duration_s: float
    sensors: tuple[SensorSummary, ...]
    energy_audit_residual_J: float
    heat_exchanged_J: float

    def sensor(self, name: str) -> SensorSummary:
        for s in self.sensors:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_text(self) -> str:
        def fmt(v):
            return NOT_REACHED if v is None else repr(float(v))

        lines = [
            f"threshold_K = {self.threshold_K!r}",
            f"duration_s = {self.duration_s!r}",
            f"energy_audit_residual_J = {self.energy_audit_residual_J!r}",
            f"heat_exchanged_J = {self.heat_exchanged_J!r}",
        ]
        for s in self.sensors:
            p = f"sensor.{s.name}."
            lines += [
                p + f"steady_state_K = {fmt(s.steady_state_K)}",
                p + f"time_to_steady_s = {fmt(s.time_to_steady_s)}",
                p + f"time_above_threshold_s = {fmt(s.time_above_threshold_s)}",
                p + f"area_above_ambient_K_min = {fmt(s.area_above_ambient_K_min)}",
            ]
        return "\n".join(lines) + "\n"


def steady_window(times: np.ndarray, temps: np.ndarray) -> tuple[float | None, float | None]:
    """(mean temperature, start time) of the final run of samples whose rate stays below 0.01 K/min.

    The run must last at least 30 minutes, otherwise ``(None, None)``.
    """
    if len(times) < 2:
        return None, None
    rate = np.abs(np.diff(temps) / (np.diff(times) / 60.0))
    start = len(times) - 1
    while start > 0 and rate[start - 1] < STEADY_RATE:
        start -= 1
    if times[-1] - times[start] < STEADY_WINDOW - 1e-9:
        return None, None
    return float(np.mean(temps[start:])), float(times[start])


def time_above(times: np.ndarray, temps: np.ndarray, threshold: float) -> float:
    """Seconds with ``temps >= threshold``, crossings located by linear interpolation."""
    total = 0.0
    for i in range(len(times) - 1):
        t0, t1, a, b = times[i], times[i + 1], temps[i] - threshold, temps[i + 1] - threshold
        dt = t1 - t0
        if a >= 0 and b >= 0:
            total += dt
        elif a >= 0 or b >= 0:
            frac = a / (a - b) if a >= 0 else b / (b - a)
            total += dt * frac
    return float(total)


def area_above(times: np.ndarray, temps: np.ndarray, ambient: np.ndarray) -> float:
    """Trapezoidal integral of max(T - T_ambient, 0), in K*min."""
    excess = np.maximum(temps - ambient, 0.0)
    return float(np.sum((excess[1:] + excess[:-1]) * np.diff(times)) / 2.0 / 60.0)


def compute_summary(columns: Sequence[str], rows: Sequence[Sequence[float]], threshold: float) -> RunSummary:
    """Summarise a series laid out as written by the simulator.

    Sensor columns ``S_<name>_K`` are summarised; without any, the node
    temperature columns ``T_<node>_K`` are used instead.
    """
    if not rows:
        raise InvalidInputError("cannot summarise an empty series")
    data = np.asarray(rows, dtype=float)
    col = {name: j for j, name in enumerate(columns)}
    times = data[:, col["time_s"]]
    ambient = data[:, col["T_ambient_K"]]
    picks = [c for c in columns if c.startswith("S_") and c.endswith("_K")]
    if not picks:
        picks = [c for c in columns if c.startswith("T_") and c.endswith("_K") and c != "T_ambient_K"]
    sensors = []
    for c in picks:
        temps = data[:, col[c]]
        steady, t_steady = steady_window(times, temps)
        sensors.append(SensorSummary(
            c[2:-2], steady, t_steady, time_above(times, temps, threshold), area_above(times, temps, ambient),
        ))
    last = data[-1]
    residual = last[col["E_stored_J"]] - (last[col["E_source_J"]] - last[col["E_boundary_J"]])
    return RunSummary(
        threshold_K=float(threshold),
        duration_s=float(times[-1] - times[0]),
        sensors=tuple(sensors),
        energy_audit_residual_J=float(residual),
        heat_exchanged_J=float(last[col["E_exchanged_J"]]),
    )


def series_to_csv(columns: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([repr(float(v)) for v in r])
    return buf.getvalue()


def series_from_csv(text: str) -> tuple[list[str], list[list[float]]]:
    reader = csv.reader(io.StringIO(text))
    try:
        columns = next(reader)
    except StopIteration:
        raise InvalidInputError("series CSV is empty") from None
    rows = [[float(v) for v in rec] for rec in reader if rec]
    return columns, rows
