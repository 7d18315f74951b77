"""Sphere-in-sphere versus cube-in-cube steady-state heat loss."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvalidComparisonError, InvalidGeometryError, InvalidInputError
from .elements import (
    BOUNDARY,
    ThermalLink,
    ThermalNetwork,
    ThermalNode,
    slab_resistance,
    spherical_shell_resistance,
    surface_radiation_coefficient,
)
from .solve import steady_state

SHAPES = ("sphere", "cube")


@dataclass(frozen=True)
class EnclosureGeometry:
    """Insulated enclosure: inner cavity plus a uniform wall.

    ``inner_size`` is the cavity radius for a sphere and the cavity edge
    length for a cube.
    """

    shape: str
    inner_size: float  # m
    wall_thickness: float  # m
    k_wall: float  # W/(m K)
    emissivity: float = 0.8

    def __post_init__(self) -> None:
        if self.shape not in SHAPES:
            raise InvalidInputError(f"shape must be one of {SHAPES}")
        if not (self.inner_size > 0 and self.wall_thickness > 0 and self.k_wall > 0):
            raise InvalidGeometryError("enclosure dimensions and conductivity must be > 0")
        if not 0 < self.emissivity <= 1:
            raise InvalidInputError("emissivity must be in (0, 1]")

    @property
    def enclosed_volume(self) -> float:
        if self.shape == "sphere":
            return 4.0 / 3.0 * math.pi * self.inner_size**3
        return self.inner_size**3

    @property
    def outer_area(self) -> float:
        outer = self.inner_size + (1 if self.shape == "sphere" else 2) * self.wall_thickness
        if self.shape == "sphere":
            return 4.0 * math.pi * outer**2
        return 6.0 * outer**2

    def wall_resistance(self) -> float:
        if self.shape == "sphere":
            return spherical_shell_resistance(self.inner_size, self.inner_size + self.wall_thickness, self.k_wall)
        # geometric-mean face area, the slab analogue of 4*pi*r_i*r_o
        a = self.inner_size
        area = 6.0 * a * (a + 2.0 * self.wall_thickness)
        return slab_resistance(self.wall_thickness, area, self.k_wall)

    def network(self) -> ThermalNetwork:
        return ThermalNetwork(
            [ThermalNode("interior", 1.0, 300.0), ThermalNode("skin", 1.0, 300.0)],
            [
                ThermalLink.conduction("interior", "skin", self.wall_resistance(), "wall"),
                ThermalLink.radiation("skin", BOUNDARY,
                                      surface_radiation_coefficient(self.outer_area, self.emissivity), "surface"),
            ],
        )


def equal_volume_cube(sphere: EnclosureGeometry) -> EnclosureGeometry:
    side = sphere.enclosed_volume ** (1.0 / 3.0)
    return EnclosureGeometry("cube", side, sphere.wall_thickness, sphere.k_wall, sphere.emissivity)


@dataclass(frozen=True)
class GeometryRow:
    shape: str
    enclosed_volume: float  # m^3
    outer_area: float  # m^2
    interior_temperature: float  # K
    heat_loss: float  # W
    loss_conductance: float  # W/K, heat loss per kelvin of interior excess


@dataclass(frozen=True)
class GeometryComparison:
    rows: tuple[GeometryRow, GeometryRow]
    warmer: str  # shape label of the warmer interior, or "tie"

    def to_text(self) -> str:
        lines = [f"{'shape':<8}{'volume_m3':>12}{'area_m2':>10}{'T_in_K':>10}{'loss_W':>9}{'G_W_K':>10}"]
        for r in self.rows:
            lines.append(
                f"{r.shape:<8}{r.enclosed_volume:>12.4e}{r.outer_area:>10.4f}"
                f"{r.interior_temperature:>10.3f}{r.heat_loss:>9.4f}{r.loss_conductance:>10.5f}"
            )
        lines.append(f"warmer interior: {self.warmer}")
        return "\n".join(lines)


def _row(geom: EnclosureGeometry, dissipation: float, boundary: float) -> GeometryRow:
    net = geom.network()
    temps = steady_state(net, boundary, {"interior": dissipation})
    t_in = temps["interior"]
    # series wall + linearised radiation at the skin temperature
    r_wall = geom.wall_resistance()
    c = surface_radiation_coefficient(geom.outer_area, geom.emissivity)
    t_skin = temps["skin"]
    if t_in > boundary:
        conductance = dissipation / (t_in - boundary)
    else:
        conductance = 1.0 / (r_wall + 1.0 / (4.0 * c * t_skin**3))
    return GeometryRow(geom.shape, geom.enclosed_volume, geom.outer_area, t_in, dissipation, conductance)


def compare_geometries(
    first: EnclosureGeometry, second: EnclosureGeometry, dissipation: float, boundary: float
) -> GeometryComparison:
    """Steady interior temperature and loss conductance for two enclosures.

    Both must enclose the same volume with the same wall thickness and
    materials, otherwise the comparison is refused.
    """
    if dissipation < 0:
        raise InvalidInputError("dissipation must be >= 0")
    if not math.isclose(first.enclosed_volume, second.enclosed_volume, rel_tol=1e-9):
        raise InvalidComparisonError(
            f"enclosed volumes differ: {first.enclosed_volume:.6e} vs {second.enclosed_volume:.6e} m^3"
        )
    if (first.wall_thickness, first.k_wall, first.emissivity) != (
        second.wall_thickness, second.k_wall, second.emissivity
    ):
        raise InvalidComparisonError("wall thickness and materials must match")
    a, b = _row(first, dissipation, boundary), _row(second, dissipation, boundary)
    if a.interior_temperature > b.interior_temperature:
        warmer = a.shape
    elif b.interior_temperature > a.interior_temperature:
        warmer = b.shape
    else:
        warmer = "tie"
    return GeometryComparison((a, b), warmer)
