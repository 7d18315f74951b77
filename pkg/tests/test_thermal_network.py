import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from tess_sim.environment import EnvironmentProfile
from tess_sim.errors import (
    InvalidComparisonError,
    InvalidGeometryError,
    InvalidInputError,
    NumericFailureError,
    SolverDivergenceError,
)
from tess_sim.thermal_network import (
    BOUNDARY,
    STEFAN_BOLTZMANN,
    EnclosureGeometry,
    LinkKind,
    NetworkState,
    StepStats,
    ThermalLink,
    ThermalNetwork,
    ThermalNode,
    compare_geometries,
    concentric_sphere_radiation_coefficient,
    equal_volume_cube,
    implicit_euler,
    integrate,
    link_heat_flow,
    simulate,
    slab_resistance,
    spherical_shell_resistance,
    steady_state,
    step,
)


def rc_network(T0=293.0, C=100.0, R=50.0, q=0.0):
    return ThermalNetwork(
        [ThermalNode("n", C, T0, q)],
        [ThermalLink.conduction("n", BOUNDARY, R)],
    )


def shell_oracle(r_i, r_o, k, n=1000):
    """Series sum of thin shells, each a slab over its mid-radius area."""
    edges = np.linspace(r_i, r_o, n + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    return float(np.sum(np.diff(edges) / (k * 4.0 * math.pi * mids**2)))


class TestResistances:
    def test_module_shell(self):
        r = spherical_shell_resistance(0.035, 0.055, 0.02)
        assert r == pytest.approx(41.3389, abs=1e-4)

    @pytest.mark.parametrize("r_i,r_o,k", [(0.035, 0.055, 0.02), (0.01, 0.5, 1.3), (0.1, 0.1001, 0.2)])
    def test_shell_matches_finite_shell_sum(self, r_i, r_o, k):
        exact = spherical_shell_resistance(r_i, r_o, k)
        assert abs(shell_oracle(r_i, r_o, k) - exact) / exact < 1e-3

    def test_shell_thin_limit(self):
        assert spherical_shell_resistance(0.05, 0.05 * (1 + 1e-9), 0.02) < 1e-6

    def test_shell_linear_in_inverse_k(self):
        assert spherical_shell_resistance(0.03, 0.05, 0.4) == pytest.approx(
            spherical_shell_resistance(0.03, 0.05, 0.2) / 2
        )

    @pytest.mark.parametrize("r_i,r_o,k", [(0.05, 0.05, 1), (0.06, 0.05, 1), (0.0, 0.05, 1), (0.03, 0.05, 0)])
    def test_shell_invalid(self, r_i, r_o, k):
        with pytest.raises(InvalidGeometryError):
            spherical_shell_resistance(r_i, r_o, k)

    def test_slab(self):
        assert slab_resistance(0.02, 0.06 * 6, 0.02) == pytest.approx(2.7778, abs=1e-4)

    def test_slab_area_halving(self):
        assert slab_resistance(0.01, 0.5, 1.0) == pytest.approx(2 * slab_resistance(0.01, 1.0, 1.0))

    @pytest.mark.parametrize("args", [(0, 1, 1), (1, 0, 1), (1, 1, -1)])
    def test_slab_invalid(self, args):
        with pytest.raises(InvalidGeometryError):
            slab_resistance(*args)

    def test_black_body_limit(self):
        c = concentric_sphere_radiation_coefficient(0.035, 0.055, 1.0, 1.0)
        assert c == pytest.approx(STEFAN_BOLTZMANN * 4 * math.pi * 0.035**2, rel=1e-15)

    def test_grey_spheres(self):
        a_i, a_o = 4 * math.pi * 0.035**2, 4 * math.pi * 0.055**2
        expected = STEFAN_BOLTZMANN * a_i / (1 / 0.8 + a_i / a_o * (1 / 0.8 - 1))
        assert concentric_sphere_radiation_coefficient(0.035, 0.055, 0.8, 0.8) == pytest.approx(expected)
        # by hand: sigma*A_i = 8.7289e-10, denominator 1.25 + 0.40496 * 0.25 = 1.35124
        assert expected == pytest.approx(6.4599e-10, rel=1e-4)

    def test_emissivity_to_zero(self):
        assert concentric_sphere_radiation_coefficient(0.035, 0.055, 1e-9, 0.8) < 1e-16

    def test_emissivity_range(self):
        with pytest.raises(InvalidInputError):
            concentric_sphere_radiation_coefficient(0.035, 0.055, 1.2, 0.8)


class TestLinks:
    def test_conduction_flow(self):
        link = ThermalLink.conduction("a", "b", 41.34)
        assert link_heat_flow(link, 265.0, 253.0) == pytest.approx(0.29028, abs=1e-5)

    def test_equal_temperatures(self):
        for link in (ThermalLink.conduction("a", "b", 3.0), ThermalLink.radiation("a", "b", 1e-9)):
            assert link_heat_flow(link, 250.0, 250.0) == 0.0

    @given(st.floats(1, 2000), st.floats(1, 2000))
    def test_radiation_antisymmetric(self, ta, tb):
        link = ThermalLink.radiation("a", "b", 3e-10)
        assert link_heat_flow(link, ta, tb) == -link_heat_flow(link, tb, ta)

    def test_only_two_link_kinds(self):
        assert {k.name for k in LinkKind} == {"CONDUCTION", "RADIATION"}

    @pytest.mark.parametrize("r", [0.0, -1.0, math.inf])
    def test_bad_resistance(self, r):
        with pytest.raises(InvalidInputError):
            ThermalLink.conduction("a", "b", r)

    def test_negative_radiation_coefficient(self):
        with pytest.raises(InvalidInputError):
            ThermalLink.radiation("a", "b", -1.0)


class TestNetworkValidation:
    def test_disconnected_node(self):
        with pytest.raises(InvalidInputError):
            ThermalNetwork(
                [ThermalNode("a", 1, 300), ThermalNode("b", 1, 300)],
                [ThermalLink.conduction("a", BOUNDARY, 1.0)],
            )

    def test_unknown_endpoint(self):
        with pytest.raises(InvalidInputError):
            ThermalNetwork([ThermalNode("a", 1, 300)], [ThermalLink.conduction("a", "z", 1.0)])

    def test_duplicate_ids(self):
        with pytest.raises(InvalidInputError):
            ThermalNetwork([ThermalNode("a", 1, 300), ThermalNode("a", 1, 300)],
                           [ThermalLink.conduction("a", BOUNDARY, 1.0)])

    def test_node_needs_capacity_and_positive_temperature(self):
        with pytest.raises(InvalidInputError):
            ThermalNode("a", 0.0, 300.0)
        with pytest.raises(InvalidInputError):
            ThermalNode("a", 1.0, 0.0)


class TestStep:
    def test_rc_oracle(self):
        net = rc_network()
        state = NetworkState.initial(net)
        worst = 0.0
        for _ in range(50):  # 10 time constants of 5000 s
            state = step(net, state, 1000.0, 241.0)
            exact = 241.0 + 52.0 * math.exp(-state.time / 5000.0)
            worst = max(worst, abs(state.temperatures[0] - exact) / exact)
        assert worst <= 1e-6

    def test_rest_state_unchanged(self):
        net = rc_network(T0=241.0)
        state = step(net, NetworkState.initial(net), 3600.0, 241.0)
        assert state.temperatures[0] == pytest.approx(241.0, abs=1e-12)

    def test_cumulative_link_heat_matches_temperature_drop(self):
        net = rc_network()
        state = step(net, NetworkState.initial(net), 7200.0, 241.0)
        stored = 100.0 * (state.temperatures[0] - 293.0)
        assert state.link_heat[0] == pytest.approx(-stored, rel=1e-9)

    def test_dissipation_offset(self):
        net = rc_network(T0=241.0)
        state = step(net, NetworkState.initial(net), 200000.0, 241.0, dissipation={"n": 0.09})
        assert state.temperatures[0] == pytest.approx(245.5, abs=1e-6)

    def test_dt_must_be_positive(self):
        net = rc_network()
        with pytest.raises(InvalidInputError):
            step(net, NetworkState.initial(net), 0.0, 241.0)


class TestSteadyState:
    def test_no_dissipation(self):
        net = ThermalNetwork(
            [ThermalNode("a", 5, 300), ThermalNode("b", 7, 280)],
            [ThermalLink.conduction("a", "b", 2.0), ThermalLink.radiation("b", BOUNDARY, 2e-9)],
        )
        temps = steady_state(net, 241.0)
        assert temps == pytest.approx({"a": 241.0, "b": 241.0}, abs=1e-9)

    def test_single_node(self):
        assert steady_state(rc_network(), 241.0, {"n": 0.09})["n"] == pytest.approx(245.5, abs=1e-9)

    def test_capacity_independence(self):
        net = ThermalNetwork(
            [ThermalNode("a", 5, 300, 0.09), ThermalNode("b", 7, 280)],
            [ThermalLink.conduction("a", "b", 2.0), ThermalLink.radiation("a", "b", 1e-10),
             ThermalLink.radiation("b", BOUNDARY, 2e-9), ThermalLink.conduction("b", BOUNDARY, 9.0)],
        )
        base = steady_state(net, 241.0)
        scaled = steady_state(net.with_capacities(10.0), 241.0)
        for k in base:
            assert abs(base[k] - scaled[k]) < 1e-9

    def test_radiation_only_balance(self):
        c = 1e-9
        net = ThermalNetwork([ThermalNode("a", 1, 300)], [ThermalLink.radiation("a", BOUNDARY, c)])
        t = steady_state(net, 100.0, {"a": 0.5})["a"]
        assert c * (t**4 - 100.0**4) == pytest.approx(0.5, abs=1e-9)

    def test_iteration_cap(self):
        net = ThermalNetwork([ThermalNode("a", 1, 300)], [ThermalLink.radiation("a", BOUNDARY, 1e-12)])
        with pytest.raises(NumericFailureError) as info:
            steady_state(net, 3.0, {"a": 1e3}, max_iter=1)
        assert info.value.residual > 0


class TestIntegrator:
    def test_stiff_problem_falls_back(self):
        stats = StepStats()
        f = lambda t, y: -1e6 * (y - 1.0)
        y, _ = integrate(f, 0.0, np.array([2.0]), 1.0, h0=1.0, max_rejections=3, stats=stats)
        assert stats.fallback_steps > 0
        assert y[0] == pytest.approx(1.0, abs=1e-6)

    def test_unattainable_tolerance_falls_back_instead_of_crawling(self):
        stats = StepStats()
        y, _ = integrate(lambda t, y: -(y - 1.0), 0.0, np.array([2.0]), 10.0, rtol=1e-30, atol=1e-30,
                         stats=stats)
        assert stats.fallback_steps > 0
        # one backward-Euler step of the whole interval: 1 + 1/(1 + 10)
        assert y[0] == pytest.approx(1.0 + 1.0 / 11.0)

    def test_implicit_euler_rejects_underflowed_start(self):
        with pytest.raises(SolverDivergenceError):
            implicit_euler(lambda t, y: -y, 0.0, np.array([1.0]), 1.0, 1e-12)

    def test_implicit_euler_decay(self):
        y = implicit_euler(lambda t, y: -y, 0.0, np.array([1.0]), 1.0, 1e-3)
        assert y[0] == pytest.approx(math.exp(-1.0), rel=2e-3)

    def test_divergence_reported(self):
        with pytest.raises(SolverDivergenceError):
            integrate(lambda t, y: np.array([-1000.0]), 0.0, np.array([10.0]), 1.0, n_temps=1)

    def test_exponential_accuracy(self):
        y, _ = integrate(lambda t, y: 0.3 * y, 0.0, np.array([1.0]), 10.0, rtol=1e-10, atol=1e-12)
        assert y[0] == pytest.approx(math.exp(3.0), rel=1e-8)


FREEZER = EnvironmentProfile("constant", 241.0)


def three_node(T0=293.15):
    return ThermalNetwork(
        [ThermalNode("core", 40, T0), ThermalNode("inner", 180, T0), ThermalNode("outer", 250, T0)],
        [ThermalLink.conduction("core", "inner", 0.5),
         ThermalLink.conduction("inner", "outer", 8.3),
         ThermalLink.radiation("inner", "outer", 7e-10),
         ThermalLink.radiation("outer", BOUNDARY, 1.7e-9),
         ThermalLink.conduction("outer", BOUNDARY, 1.5)],
    )


class TestSimulate:
    def test_relaxes_to_ambient(self):
        result = simulate(three_node(), FREEZER, 36000.0, 600.0)
        assert all(abs(t - 241.0) < 0.5 for t in result.final_state.temperatures)

    def test_zero_duration(self):
        result = simulate(three_node(), FREEZER, 0.0, 60.0)
        assert result.rows == []
        assert result.final_state == result.initial_state

    def test_output_grid(self):
        result = simulate(rc_network(), FREEZER, 1000.0, 300.0)
        assert result.times.tolist() == [0.0, 300.0, 600.0, 900.0, 1000.0]

    def test_rc_oracle_through_simulate(self):
        result = simulate(rc_network(), FREEZER, 50000.0, 500.0)
        exact = 241.0 + 52.0 * np.exp(-result.times / 5000.0)
        assert np.max(np.abs(result.column("T_n_K") - exact) / exact) <= 1e-6

    def test_energy_audit(self):
        result = simulate(three_node(), FREEZER, 20000.0, 60.0, dissipation={"core": 0.09})
        assert abs(result.audit_residual) <= 1e-3 * result.heat_exchanged

    def test_deterministic(self):
        a = simulate(three_node(), FREEZER, 7200.0, 60.0)
        b = simulate(three_node(), FREEZER, 7200.0, 60.0)
        assert a.rows == b.rows

    def test_bad_arguments(self):
        with pytest.raises(InvalidInputError):
            simulate(three_node(), FREEZER, -1.0, 60.0)
        with pytest.raises(InvalidInputError):
            simulate(three_node(), FREEZER, 10.0, 0.0)

    def test_solar_needs_node(self):
        env = EnvironmentProfile("square_wave", 273.0, 123.0, 10800.0, solar_power=1.0)
        with pytest.raises(InvalidInputError):
            simulate(three_node(), env, 100.0, 10.0)
        result = simulate(three_node(), env, 10800.0, 60.0, solar_node="outer")
        assert abs(result.audit_residual) <= 1e-3 * result.heat_exchanged


@st.composite
def random_networks(draw):
    n = draw(st.integers(1, 4))
    temps = [draw(st.floats(150.0, 350.0)) for _ in range(n)]
    nodes = [ThermalNode(f"n{i}", draw(st.floats(1.0, 500.0)), temps[i]) for i in range(n)]
    links = []
    for i in range(n):
        target = BOUNDARY if i == 0 else f"n{draw(st.integers(0, i - 1))}"
        if draw(st.booleans()):
            links.append(ThermalLink.conduction(f"n{i}", target, draw(st.floats(0.2, 50.0))))
        else:
            links.append(ThermalLink.radiation(f"n{i}", target, draw(st.floats(1e-11, 5e-9))))
    if n > 1 and draw(st.booleans()):
        links.append(ThermalLink.conduction("n0", f"n{n - 1}", draw(st.floats(0.2, 50.0))))
    boundary = draw(st.floats(100.0, 320.0))
    return ThermalNetwork(nodes, links), boundary


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(random_networks())
def test_maximum_principle(case):
    net, boundary = case
    result = simulate(net, EnvironmentProfile("constant", boundary), 3000.0, 100.0)
    lo = min(net.initial_temperatures() + [boundary])
    hi = max(net.initial_temperatures() + [boundary])
    cols = [result.column(f"T_{i}_K") for i in net.node_ids]
    tol = 1e-6
    for c in cols:
        assert c.min() >= lo - tol and c.max() <= hi + tol


class TestGeometry:
    SPHERE = EnclosureGeometry("sphere", 0.035, 0.02, 0.02)

    def test_sphere_loses_less(self):
        cube = equal_volume_cube(self.SPHERE)
        cmp = compare_geometries(self.SPHERE, cube, 0.09, 241.0)
        sphere_row, cube_row = cmp.rows
        assert sphere_row.loss_conductance < cube_row.loss_conductance
        assert sphere_row.interior_temperature > cube_row.interior_temperature
        assert cmp.warmer == "sphere"

    def test_zero_dissipation_ties(self):
        cmp = compare_geometries(self.SPHERE, equal_volume_cube(self.SPHERE), 0.0, 241.0)
        assert cmp.warmer == "tie"
        assert all(r.interior_temperature == pytest.approx(241.0) for r in cmp.rows)

    def test_same_cube_twice(self):
        cube = equal_volume_cube(self.SPHERE)
        a, b = compare_geometries(cube, cube, 0.09, 241.0).rows
        assert a == b

    def test_unequal_volumes(self):
        with pytest.raises(InvalidComparisonError):
            compare_geometries(self.SPHERE, EnclosureGeometry("cube", 0.05, 0.02, 0.02), 0.09, 241.0)

    def test_unequal_materials(self):
        cube = EnclosureGeometry("cube", equal_volume_cube(self.SPHERE).inner_size, 0.02, 0.03)
        with pytest.raises(InvalidComparisonError):
            compare_geometries(self.SPHERE, cube, 0.09, 241.0)

    def test_text_report(self):
        text = compare_geometries(self.SPHERE, equal_volume_cube(self.SPHERE), 0.09, 241.0).to_text()
        assert "warmer interior: sphere" in text
