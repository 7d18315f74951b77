"""Lumped-capacitance thermal network: elements, solvers and transient simulation."""
from .elements import (
    BOUNDARY,
    STEFAN_BOLTZMANN,
    LinkKind,
    ThermalLink,
    ThermalNetwork,
    ThermalNode,
    concentric_sphere_radiation_coefficient,
    enclosure_radiation_coefficient,
    link_heat_flow,
    slab_resistance,
    spherical_shell_resistance,
    surface_radiation_coefficient,
)
from .geometry import EnclosureGeometry, GeometryComparison, compare_geometries, equal_volume_cube
from .integrator import StepStats, implicit_euler, integrate
from .simulate import SimulationResult, series_columns, simulate
from .solve import NetworkState, steady_state, step

__all__ = [
    "BOUNDARY",
    "STEFAN_BOLTZMANN",
    "EnclosureGeometry",
    "GeometryComparison",
    "LinkKind",
    "NetworkState",
    "SimulationResult",
    "StepStats",
    "ThermalLink",
    "ThermalNetwork",
    "ThermalNode",
    "compare_geometries",
    "concentric_sphere_radiation_coefficient",
    "enclosure_radiation_coefficient",
    "equal_volume_cube",
    "implicit_euler",
    "integrate",
    "link_heat_flow",
    "series_columns",
    "simulate",
    "slab_resistance",
    "spherical_shell_resistance",
    "steady_state",
    "step",
    "surface_radiation_coefficient",
]
