"""Nodes, links and resistance formulas of the lumped thermal network."""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from ..errors import InvalidGeometryError, InvalidInputError

STEFAN_BOLTZMANN = 5.670374419e-8  # W/(m^2 K^4)
BOUNDARY = "ambient"


class LinkKind(enum.Enum):
    CONDUCTION = "conduction"
    RADIATION = "radiation"


@dataclass(frozen=True)
class ThermalNode:
    id: str
    heat_capacity: float  # J/K
    temperature: float  # K, initial
    internal_dissipation: float = 0.0  # W

    def __post_init__(self) -> None:
        if not self.id or self.id == BOUNDARY:
            raise InvalidInputError(f"invalid node id {self.id!r}")
        if not self.heat_capacity > 0:
            raise InvalidInputError(f"node {self.id}: heat capacity must be > 0, got {self.heat_capacity}")
        if not self.temperature > 0:
            raise InvalidInputError(f"node {self.id}: temperature must be > 0 K, got {self.temperature}")


@dataclass(frozen=True)
class ThermalLink:
    """Heat path between two nodes; positive flow goes from ``a`` to ``b``."""

    a: str
    b: str
    kind: LinkKind
    conduction_resistance: float = math.inf  # K/W
    radiative_coefficient: float = 0.0  # W/K^4, eps_eff * sigma * A
    name: str = ""

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise InvalidInputError(f"link endpoints must differ, got {self.a!r} twice")
        if self.kind is LinkKind.CONDUCTION:
            if not self.conduction_resistance > 0 or math.isinf(self.conduction_resistance):
                raise InvalidInputError(
                    f"link {self.label}: conduction resistance must be finite and > 0, "
                    f"got {self.conduction_resistance}"
                )
        elif not self.radiative_coefficient >= 0:
            raise InvalidInputError(f"link {self.label}: radiative coefficient must be >= 0")

    @property
    def label(self) -> str:
        return self.name or f"{self.a}-{self.b}"

    @classmethod
    def conduction(cls, a: str, b: str, resistance: float, name: str = "") -> "ThermalLink":
        return cls(a, b, LinkKind.CONDUCTION, conduction_resistance=resistance, name=name)

    @classmethod
    def radiation(cls, a: str, b: str, coefficient: float, name: str = "") -> "ThermalLink":
        return cls(a, b, LinkKind.RADIATION, radiative_coefficient=coefficient, name=name)


def link_heat_flow(link: ThermalLink, T_a: float, T_b: float) -> float:
    """Heat flow in W from endpoint ``a`` to endpoint ``b``."""
    if link.kind is LinkKind.CONDUCTION:
        return (T_a - T_b) / link.conduction_resistance
    return link.radiative_coefficient * (T_a**4 - T_b**4)


def spherical_shell_resistance(r_inner: float, r_outer: float, k: float) -> float:
    if not 0 < r_inner < r_outer:
        raise InvalidGeometryError(f"need 0 < r_inner < r_outer, got {r_inner}, {r_outer}")
    if not k > 0:
        raise InvalidGeometryError(f"conductivity must be > 0, got {k}")
    return (1.0 / r_inner - 1.0 / r_outer) / (4.0 * math.pi * k)


def slab_resistance(thickness: float, area: float, k: float) -> float:
    if not (thickness > 0 and area > 0 and k > 0):
        raise InvalidGeometryError(
            f"slab inputs must be > 0, got thickness={thickness}, area={area}, k={k}"
        )
    return thickness / (k * area)


def concentric_sphere_radiation_coefficient(
    r_inner: float, r_outer: float, eps_inner: float, eps_outer: float
) -> float:
    """Grey two-surface exchange between concentric spheres, W/K^4."""
    if not 0 < r_inner <= r_outer:
        raise InvalidGeometryError(f"need 0 < r_inner <= r_outer, got {r_inner}, {r_outer}")
    for eps in (eps_inner, eps_outer):
        if not 0 < eps <= 1:
            raise InvalidInputError(f"emissivity must be in (0, 1], got {eps}")
    return enclosure_radiation_coefficient(
        4.0 * math.pi * r_inner**2, 4.0 * math.pi * r_outer**2, eps_inner, eps_outer
    )


def enclosure_radiation_coefficient(
    area_inner: float, area_outer: float, eps_inner: float, eps_outer: float
) -> float:
    """Grey exchange between a convex body and the surface enclosing it, W/K^4."""
    if not 0 < area_inner <= area_outer:
        raise InvalidGeometryError(f"need 0 < inner area <= outer area, got {area_inner}, {area_outer}")
    for eps in (eps_inner, eps_outer):
        if not 0 < eps <= 1:
            raise InvalidInputError(f"emissivity must be in (0, 1], got {eps}")
    return STEFAN_BOLTZMANN * area_inner / (
        1.0 / eps_inner + (area_inner / area_outer) * (1.0 / eps_outer - 1.0)
    )


def surface_radiation_coefficient(area: float, emissivity: float) -> float:
    """Small body radiating to a large enclosure."""
    if not area > 0:
        raise InvalidGeometryError(f"area must be > 0, got {area}")
    if not 0 < emissivity <= 1:
        raise InvalidInputError(f"emissivity must be in (0, 1], got {emissivity}")
    return STEFAN_BOLTZMANN * emissivity * area


@dataclass(frozen=True)
class ThermalNetwork:
    """Validated set of dynamic nodes and links to a single ambient boundary."""

    nodes: tuple[ThermalNode, ...]
    links: tuple[ThermalLink, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __init__(self, nodes: Iterable[ThermalNode], links: Iterable[ThermalLink]):
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "links", tuple(links))
        if not self.nodes:
            raise InvalidInputError("network needs at least one dynamic node")
        index = {}
        for i, n in enumerate(self.nodes):
            if n.id in index:
                raise InvalidInputError(f"duplicate node id {n.id!r}")
            index[n.id] = i
        object.__setattr__(self, "index", index)
        for link in self.links:
            for end in (link.a, link.b):
                if end != BOUNDARY and end not in index:
                    raise InvalidInputError(f"link {link.label} references unknown node {end!r}")
        self._check_connected()

    def _check_connected(self) -> None:
        adj: dict[str, set[str]] = {n.id: set() for n in self.nodes}
        adj[BOUNDARY] = set()
        for link in self.links:
            if link.kind is LinkKind.RADIATION and link.radiative_coefficient == 0:
                continue
            adj[link.a].add(link.b)
            adj[link.b].add(link.a)
        seen = {BOUNDARY}
        queue = deque([BOUNDARY])
        while queue:
            for nxt in adj[queue.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        stranded = [n.id for n in self.nodes if n.id not in seen]
        if stranded:
            raise InvalidInputError(f"nodes not connected to the boundary: {stranded}")

    @property
    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    @property
    def capacities(self) -> list[float]:
        return [n.heat_capacity for n in self.nodes]

    def initial_temperatures(self) -> list[float]:
        return [n.temperature for n in self.nodes]

    def dissipation(self) -> list[float]:
        return [n.internal_dissipation for n in self.nodes]

    def endpoint_index(self, node_id: str) -> int:
        """Node position, or -1 for the boundary."""
        return -1 if node_id == BOUNDARY else self.index[node_id]

    def compiled_links(self) -> list[tuple[int, int, bool, float]]:
        """(ia, ib, is_radiation, coefficient) with conductance for conduction links."""
        out = []
        for link in self.links:
            ia, ib = self.endpoint_index(link.a), self.endpoint_index(link.b)
            if link.kind is LinkKind.CONDUCTION:
                out.append((ia, ib, False, 1.0 / link.conduction_resistance))
            else:
                out.append((ia, ib, True, link.radiative_coefficient))
        return out

    def with_capacities(self, scale: float) -> "ThermalNetwork":
        return ThermalNetwork(
            [replace(n, heat_capacity=n.heat_capacity * scale) for n in self.nodes], self.links
        )


def link_flows(
    compiled: Sequence[tuple[int, int, bool, float]], temps: Sequence[float], boundary: float
) -> list[float]:
    flows = []
    for ia, ib, rad, c in compiled:
        ta = boundary if ia < 0 else temps[ia]
        tb = boundary if ib < 0 else temps[ib]
        if rad:
            flows.append(c * (ta * ta * ta * ta - tb * tb * tb * tb))
        else:
            flows.append((ta - tb) * c)
    return flows
