"""Dormand-Prince 5(4) integrator with step-halving implicit Euler fallback.

The integrator advances an autonomous-in-segment ODE ``y' = f(t, y)`` over
one interval ``[t0, t1]``. Callers split long runs into segments at every
discontinuity of the right-hand side (controller ticks, environment jumps)
so each call sees a smooth problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import SolverDivergenceError

RHS = Callable[[float, np.ndarray], np.ndarray]

# Dormand & Prince (1980) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array((35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0))
_B4 = np.array((5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40))
_E = _B5 - _B4

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    rhs_calls: int = 0
    fallback_steps: int = 0


def _check(t: float, y: np.ndarray, n_temps: int) -> None:
    if not np.all(np.isfinite(y)):
        raise SolverDivergenceError(f"non-finite state at t={t:.6g} s: {y[:n_temps]}")
    if n_temps and np.min(y[:n_temps]) <= 0.0:
        raise SolverDivergenceError(
            f"non-positive temperature at t={t:.6g} s: {y[:n_temps]} K (try tighter tolerances)"
        )


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def dopri_step(f: RHS, t: float, y: np.ndarray, h: float, k1: np.ndarray):
    """One trial step. Returns (y5, error estimate, k7) where k7 = f(t+h, y5).

    An oversized trial step may overflow; the caller sees non-finite values
    and rejects it, so the floating-point warnings are silenced here.
    """
    k = [k1]
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, 7):
            yi = y.copy()
            for j, a in enumerate(_A[i]):
                if a:
                    yi += h * a * k[j]
            k.append(f(t + _C[i] * h, yi))
        K = np.array(k)
        y5 = y + h * (_B5 @ K)
        err = h * (_E @ K)
    return y5, err, k[6]


def integrate(
    f: RHS,
    t0: float,
    y0: np.ndarray,
    t1: float,
    h0: float | None = None,
    rtol: float = 1e-8,
    atol: float = 1e-6,
    n_temps: int = 0,
    max_rejections: int = 50,
    stats: StepStats | None = None,
    min_step: float = 1e-9,
) -> tuple[np.ndarray, float]:
    """Advance from ``t0`` to ``t1``; returns (y(t1), suggested next step).

    ``n_temps`` leading components are absolute temperatures and must stay
    positive. After ``max_rejections`` consecutive rejected steps, or once
    a rejected step would shrink below ``min_step``, the rest of the
    interval is finished with :func:`implicit_euler`, starting from the step
    size in use before those rejections.
    """
    stats = stats if stats is not None else StepStats()
    y = np.array(y0, dtype=float)
    t = t0
    span = t1 - t0
    if span <= 0:
        return y, h0 or 0.0
    h = min(h0 if h0 else span, span)
    k1 = f(t, y)
    stats.rhs_calls += 1
    consecutive = 0
    h_streak = h  # step size when the current run of rejections began
    while t < t1:
        last = t + h >= t1 - 1e-12 * max(1.0, abs(t1))
        if last:
            h = t1 - t
        y_new, err, k7 = dopri_step(f, t, y, h, k1)
        stats.rhs_calls += 6
        norm = _error_norm(err, y, y_new, rtol, atol) if np.all(np.isfinite(y_new)) else math.inf
        if norm <= 1.0:
            t = t1 if last else t + h
            y = y_new
            k1 = k7
            stats.accepted += 1
            consecutive = 0
            _check(t, y, n_temps)
            factor = MAX_FACTOR if norm == 0 else min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * norm ** -0.2))
            h_next = h * factor
            if last:
                return y, h_next
            h = h_next
        else:
            stats.rejected += 1
            if consecutive == 0:
                h_streak = h
            consecutive += 1
            h *= max(MIN_FACTOR, SAFETY * norm ** -0.2) if math.isfinite(norm) else MIN_FACTOR
            if consecutive >= max_rejections or h < min_step:
                y = implicit_euler(f, t, y, t1, h_streak, n_temps=n_temps, min_step=min_step, stats=stats)
                return y, h_streak
    return y, h


def _newton_solve(f: RHS, t: float, y_prev: np.ndarray, h: float, tol: float, max_iter: int = 20):
    y = y_prev.copy()
    n = y.size
    for _ in range(max_iter):
        fy = f(t, y)
        g = y - y_prev - h * fy
        jac = np.eye(n)
        for j in range(n):
            dy = 1e-7 * max(1.0, abs(y[j]))
            yp = y.copy()
            yp[j] += dy
            jac[:, j] -= h * (f(t, yp) - fy) / dy
        try:
            delta = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            return None
        y = y + delta
        if not np.all(np.isfinite(y)):
            return None
        if np.max(np.abs(delta) / (1.0 + np.abs(y))) < tol:
            return y
    return None


def implicit_euler(
    f: RHS,
    t0: float,
    y0: np.ndarray,
    t1: float,
    h: float,
    n_temps: int = 0,
    min_step: float = 1e-9,
    stats: StepStats | None = None,
) -> np.ndarray:
    """Backward Euler with Newton iterations.

    The step is halved when Newton fails and regrows up to its initial size.
    """
    y = np.array(y0, dtype=float)
    t = t0
    h_max = h = min(h, t1 - t0)
    if h < min_step and h < t1 - t0:
        raise SolverDivergenceError(f"implicit Euler fallback started with step {h:.3g} s at t={t:.6g} s")
    while t < t1:
        h = min(h, t1 - t)
        y_new = _newton_solve(f, t + h, y, h, tol=1e-12)
        if y_new is None or (n_temps and np.min(y_new[:n_temps]) <= 0):
            h *= 0.5
            if h < min_step:
                raise SolverDivergenceError(f"implicit Euler fallback stalled at t={t:.6g} s")
            continue
        t += h
        y = y_new
        if stats is not None:
            stats.fallback_steps += 1
        _check(t, y, n_temps)
        h = min(2.0 * h, h_max)
    return y
