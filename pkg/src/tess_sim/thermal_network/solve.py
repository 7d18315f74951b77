"""Single-step transient advance and the algebraic steady-state solve."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import InvalidInputError, NumericFailureError
from .elements import ThermalNetwork, link_flows
from .integrator import StepStats, integrate


@dataclass(frozen=True)
class NetworkState:
    time: float  # s
    temperatures: tuple[float, ...]  # K, in network node order
    link_heat: tuple[float, ...]  # J, cumulative per link, positive a -> b

    @classmethod
    def initial(cls, network: ThermalNetwork) -> "NetworkState":
        return cls(0.0, tuple(network.initial_temperatures()), (0.0,) * len(network.links))


def _dissipation_vector(network: ThermalNetwork, dissipation) -> list[float]:
    if dissipation is None:
        return network.dissipation()
    if isinstance(dissipation, Mapping):
        out = [0.0] * len(network.nodes)
        for node_id, q in dissipation.items():
            out[network.index[node_id]] = float(q)
        return out
    values = [float(q) for q in dissipation]
    if len(values) != len(network.nodes):
        raise InvalidInputError("dissipation vector length does not match node count")
    return values


def network_rhs(network: ThermalNetwork, boundary: float, dissipation: Sequence[float]):
    """Right-hand side over [temperatures, cumulative link heats]."""
    compiled = network.compiled_links()
    caps = network.capacities
    n = len(caps)

    def f(t: float, y: np.ndarray) -> np.ndarray:
        temps = y[:n]
        flows = link_flows(compiled, temps, boundary)
        net = list(dissipation)
        for (ia, ib, _, _), q in zip(compiled, flows):
            if ia >= 0:
                net[ia] -= q
            if ib >= 0:
                net[ib] += q
        return np.array([net[i] / caps[i] for i in range(n)] + flows)

    return f


def step(
    network: ThermalNetwork,
    state: NetworkState,
    dt: float,
    boundary: float,
    dissipation=None,
    rtol: float = 1e-8,
    atol: float = 1e-6,
    stats: StepStats | None = None,
) -> NetworkState:
    """Advance the network by ``dt`` seconds at fixed boundary temperature."""
    if not dt > 0:
        raise InvalidInputError(f"dt must be > 0, got {dt}")
    q = _dissipation_vector(network, dissipation)
    f = network_rhs(network, boundary, q)
    y0 = np.array(list(state.temperatures) + list(state.link_heat), dtype=float)
    n = len(network.nodes)
    y1, _ = integrate(f, state.time, y0, state.time + dt, rtol=rtol, atol=atol, n_temps=n, stats=stats)
    return NetworkState(state.time + dt, tuple(y1[:n].tolist()), tuple(y1[n:].tolist()))


def _residual_and_jacobian(network: ThermalNetwork, temps: np.ndarray, boundary: float, q: Sequence[float]):
    n = len(network.nodes)
    res = np.array(q, dtype=float)
    jac = np.zeros((n, n))
    for ia, ib, rad, c in network.compiled_links():
        ta = boundary if ia < 0 else temps[ia]
        tb = boundary if ib < 0 else temps[ib]
        if rad:
            flow = c * (ta**4 - tb**4)
            da, db = 4.0 * c * ta**3, -4.0 * c * tb**3
        else:
            flow = c * (ta - tb)
            da, db = c, -c
        if ia >= 0:
            res[ia] -= flow
            jac[ia, ia] -= da
            if ib >= 0:
                jac[ia, ib] -= db
        if ib >= 0:
            res[ib] += flow
            jac[ib, ib] += db
            if ia >= 0:
                jac[ib, ia] += da
    return res, jac


def steady_state(
    network: ThermalNetwork,
    boundary: float,
    dissipation=None,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> dict[str, float]:
    """Node temperatures where every node's net heat flow balances its dissipation.

    Damped Newton iteration; heat capacities play no part.
    """
    if not boundary > 0:
        raise InvalidInputError("boundary temperature must be > 0 K")
    q = _dissipation_vector(network, dissipation)
    temps = np.full(len(network.nodes), float(boundary))
    res, jac = _residual_and_jacobian(network, temps, boundary, q)
    norm = float(np.max(np.abs(res)))
    for _ in range(max_iter):
        if norm < tol:
            return dict(zip(network.node_ids, temps.tolist()))
        try:
            delta = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise NumericFailureError(f"singular steady-state Jacobian: {exc}", norm) from exc
        # keep absolute temperatures positive and shrink until the residual drops
        lam = 1.0
        limit = np.min(np.where(delta < 0, -0.5 * temps / np.where(delta < 0, delta, -1.0), np.inf))
        lam = min(lam, float(limit))
        while True:
            trial = temps + lam * delta
            trial_res, trial_jac = _residual_and_jacobian(network, trial, boundary, q)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < norm or lam < 1e-6:
                break
            lam *= 0.5
        temps, res, jac, norm = trial, trial_res, trial_jac, trial_norm
    if norm < tol:
        return dict(zip(network.node_ids, temps.tolist()))
    raise NumericFailureError(f"steady state did not converge: residual {norm:.3e} W", norm)
