"""Run orchestration: single runs, labelled comparisons and parameter sweeps."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..errors import ConfigError, TessSimError
from ..thermal_network import SimulationResult, simulate
from .build import (
    build_dissipation,
    build_environment,
    build_network,
    build_policy,
    build_sensors,
    build_source,
)
from .config import ScenarioConfig, numeric_keys, validate_config
from .summary import RunSummary, compute_summary, series_to_csv

KELVIN = 273.15


@dataclass
class RunResult:
    config: ScenarioConfig
    series: SimulationResult
    summary: RunSummary

    def csv_text(self) -> str:
        return series_to_csv(self.series.columns, self.series.rows)


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    validate_config(cfg)
    sensors = build_sensors(cfg)
    series = simulate(
        build_network(cfg),
        build_environment(cfg),
        cfg.run.duration_s,
        cfg.run.output_interval_s,
        controller=build_policy(cfg),
        source=build_source(cfg),
        sensors=sensors,
        dissipation=build_dissipation(cfg),
        solar_node=cfg.environment.solar_node,
        control_period=cfg.controller.period_s,
        rtol=cfg.run.rtol,
        atol=cfg.run.atol,
    )
    if not series.rows:
        raise ConfigError("run.duration_s must be > 0 to produce a summary", key="run.duration_s")
    return RunResult(cfg, series, compute_summary(series.columns, series.rows, cfg.run.threshold_K))


def write_run(result: RunResult, out_dir: str | Path, stem: str = "run") -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, summary_path = out / f"{stem}.csv", out / f"{stem}_summary.txt"
    csv_path.write_text(result.csv_text())
    summary_path.write_text(result.summary.to_text())
    return csv_path, summary_path


# -- comparison ---------------------------------------------------------------

COMPARISON_COLUMNS = ("case", "sensor", "steady_state_C", "time_to_steady_min", "time_above_threshold_min",
                      "area_above_ambient_K_min")


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[tuple, ...]  # one per (case, sensor), in input order
    errors: tuple[tuple[str, str], ...]  # (case label, message)
    summaries: tuple[tuple[str, RunSummary], ...]

    @property
    def partial(self) -> bool:
        return bool(self.errors)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COMPARISON_COLUMNS)
        for r in self.rows:
            writer.writerow([_cell(v) for v in r])
        return buf.getvalue()

    def to_text(self) -> str:
        head = f"{'case':<14}{'sensor':<10}{'steady_C':>10}{'t_steady_min':>14}{'above_min':>11}{'area_K_min':>12}"
        lines = [head]
        for case, sensor, steady, t_steady, above, area in self.rows:
            lines.append(
                f"{case:<14}{sensor:<10}{_fixed(steady, 2):>10}{_fixed(t_steady, 1):>14}"
                f"{above:>11.1f}{area:>12.1f}"
            )
        for label, msg in self.errors:
            lines.append(f"FAILED {label}: {msg}")
        return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return "not-reached"
    return repr(v) if isinstance(v, float) else str(v)


def _fixed(v: float | None, digits: int) -> str:
    return "not-reached" if v is None else f"{v:.{digits}f}"


def _summary_rows(label: str, summary: RunSummary) -> list[tuple]:
    rows = []
    for s in summary.sensors:
        rows.append((
            label,
            s.name,
            None if s.steady_state_K is None else s.steady_state_K - KELVIN,
            None if s.time_to_steady_s is None else s.time_to_steady_s / 60.0,
            s.time_above_threshold_s / 60.0,
            s.area_above_ambient_K_min,
        ))
    return rows


def _summarise(cfg: ScenarioConfig) -> RunSummary:
    return run_scenario(cfg).summary


def _safe_summarise(cfg: ScenarioConfig) -> RunSummary | str:
    try:
        return _summarise(cfg)
    except TessSimError as exc:
        return f"{type(exc).__name__}: {exc}"


def _map(fn, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def run_comparison(
    configs: Sequence[tuple[str, ScenarioConfig]], workers: int = 1
) -> ComparisonReport:
    """Run labelled cases; a failing case is reported and the rest still run."""
    if not configs:
        raise ConfigError("comparison needs at least one case")
    outcomes = _map(_safe_summarise, [c for _, c in configs], workers)
    rows, errors, summaries = [], [], []
    for (label, _), outcome in zip(configs, outcomes):
        if isinstance(outcome, str):
            errors.append((label, outcome))
            continue
        summaries.append((label, outcome))
        rows += _summary_rows(label, outcome)
    return ComparisonReport(tuple(rows), tuple(errors), tuple(summaries))


# -- sweep --------------------------------------------------------------------

def sweep(
    base: ScenarioConfig, path: str, values: Sequence[float], workers: int = 1
) -> list[tuple[float, RunSummary]]:
    """One run per value of the numeric parameter ``path``, results in input order.

    Every variant is built and validated before any run starts.
    """
    if path not in numeric_keys():
        raise ConfigError(f"sweep parameter {path!r} is not a numeric config key", key=path)
    if not values:
        raise ConfigError("sweep needs at least one value")
    variants = []
    for v in values:
        if isinstance(v, float) and not math.isfinite(v):
            raise ConfigError(f"sweep value {v} for {path} is not finite", key=path)
        cast = int(v) if isinstance(base.get(path), int) and not isinstance(base.get(path), bool) else float(v)
        cfg = base.with_value(path, cast)
        validate_config(cfg)
        variants.append(cfg)
    return list(zip(values, _map(_summarise, variants, workers)))


def sweep_table(path: str, results: Sequence[tuple[float, RunSummary]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([path, "sensor", "steady_state_K", "time_to_steady_s", "time_above_threshold_s",
                     "area_above_ambient_K_min"])
    for value, summary in results:
        for s in summary.sensors:
            writer.writerow([repr(value), s.name, _cell(s.steady_state_K), _cell(s.time_to_steady_s),
                             repr(s.time_above_threshold_s), repr(s.area_above_ambient_K_min)])
    return buf.getvalue()
