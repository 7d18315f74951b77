import math

import pytest
from hypothesis import given, strategies as st

from tess_sim.errors import InvalidInputError, UnknownHydrateError
from tess_sim.thermo_props import (
    BUILTIN_SORBENTS,
    CONVENTIONS,
    EXPORT_COLUMNS,
    HydrateVariant,
    SorbentSpec,
    WaterEnthalpyConvention,
    energy_storage_density,
    export_storage_csv,
    get_sorbent,
    hydration_stoichiometry,
    rank_sorbents,
    reaction_enthalpy,
    reaction_enthalpy_hess,
    stepwise_enthalpy,
)

LICL = BUILTIN_SORBENTS["LiCl"]

# |dHr| * 1000 / (M * 3.6) evaluated in exact rational arithmetic, frozen.
HAND_DENSITIES = {
    ("LiCl", 1): 366.876310,
    ("LiCl", 2): 718.684486,
    ("LiCl", 3): 1041.666667,
    ("LiCl", 5): 1579.599057,
    ("MgSO4", 7): 863.151287,
    ("MgCl2", 6): 1079.485115,
    ("SrBr2", 6): 366.028923,
    ("CaCl2", 6): 909.072706,
}


def all_rows():
    for s in BUILTIN_SORBENTS.values():
        for h in s.hydrates:
            yield s, h


class TestReactionEnthalpy:
    def test_licl_monohydrate(self):
        assert reaction_enthalpy(LICL, 1, -712.0) == pytest.approx(-56.0, abs=1e-9)

    def test_mgcl2_hexahydrate(self):
        spec = BUILTIN_SORBENTS["MgCl2"]
        assert reaction_enthalpy(spec, 6, -2499.0) == pytest.approx(-370.0, abs=1e-9)

    def test_zero_when_product_equals_reactants(self):
        conv = CONVENTIONS["table"]
        dHfh = 3 * conv.dHw + LICL.dehydrated_formation_enthalpy_dHfd
        assert reaction_enthalpy(LICL, 3, dHfh) == 0.0

    def test_x_below_one_rejected(self):
        with pytest.raises(InvalidInputError):
            reaction_enthalpy(LICL, 0, -408.0)

    def test_other_conventions_selectable(self):
        liquid = reaction_enthalpy(LICL, 1, -712.0, CONVENTIONS["liquid"])
        assert liquid == pytest.approx(-712.0 + 285.8 + 408.0)

    def test_convention_must_be_negative(self):
        with pytest.raises(InvalidInputError):
            WaterEnthalpyConvention(10.0, "bad")

    def test_table_agreement_except_calcium_chloride(self):
        for spec, h in all_rows():
            computed = reaction_enthalpy(spec, h.water_moles_x, h.hydrated_formation_enthalpy_dHfh)
            if spec.name == "CaCl2":
                assert computed == pytest.approx(-324.0, abs=1e-9)
                assert h.reaction_enthalpy_dHr == -363.2
            else:
                assert computed == pytest.approx(h.reaction_enthalpy_dHr, abs=1.0)


class TestHess:
    def test_licl_cross_check(self):
        assert reaction_enthalpy_hess([-712.0], [-408.0, -248.0]) == pytest.approx(-56.0)

    def test_trivial_zero(self):
        assert reaction_enthalpy_hess([-100.0], [-100.0]) == 0.0

    def test_strontium_bromide(self):
        assert reaction_enthalpy_hess([-2531.0], [-717.0] + [-248.0] * 6) == pytest.approx(-326.0)

    @pytest.mark.parametrize("products,reactants", [([], [-1.0]), ([-1.0], [])])
    def test_empty_side_rejected(self, products, reactants):
        with pytest.raises(InvalidInputError):
            reaction_enthalpy_hess(products, reactants)

    def test_agrees_exactly_with_direct_form(self):
        for spec, h in all_rows():
            for conv in CONVENTIONS.values():
                prods, reacts = hydration_stoichiometry(spec, h.water_moles_x, h.hydrated_formation_enthalpy_dHfh, conv)
                direct = reaction_enthalpy(spec, h.water_moles_x, h.hydrated_formation_enthalpy_dHfh, conv)
                assert reaction_enthalpy_hess(prods, reacts) == direct

    @given(
        x=st.integers(1, 12),
        dHfd=st.floats(-3000, -1, allow_nan=False),
        dHfh=st.floats(-9000, -1, allow_nan=False),
        dHw=st.floats(-400, -1, allow_nan=False),
    )
    def test_agreement_property(self, x, dHfd, dHfh, dHw):
        spec = SorbentSpec("X", dHfd, 50.0, (HydrateVariant(x, dHfh, -1.0),))
        conv = WaterEnthalpyConvention(dHw)
        prods, reacts = hydration_stoichiometry(spec, x, dHfh, conv)
        assert reaction_enthalpy_hess(prods, reacts) == reaction_enthalpy(spec, x, dHfh, conv)


class TestEnergyDensity:
    def test_licl_monohydrate(self):
        assert energy_storage_density(-56.0, 42.4) == pytest.approx(366.876, abs=1e-3)

    def test_magnesium_sulfate(self):
        assert energy_storage_density(-374.0, 120.36) == pytest.approx(863.151, abs=1e-3)

    def test_zero_enthalpy(self):
        assert energy_storage_density(0.0, 42.4) == 0.0

    def test_bad_molar_mass(self):
        with pytest.raises(InvalidInputError):
            energy_storage_density(-56.0, 0.0)

    def test_hand_values_for_every_row(self):
        for spec, h in all_rows():
            value = energy_storage_density(h.reaction_enthalpy_dHr, spec.molar_mass_dehydrated)
            assert value == pytest.approx(HAND_DENSITIES[(spec.name, h.water_moles_x)], abs=1e-6)

    def test_licl_density_increases_with_hydration(self):
        values = [energy_storage_density(h.reaction_enthalpy_dHr, 42.4) for h in LICL.hydrates]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestStepwise:
    def test_first_step(self):
        assert stepwise_enthalpy(LICL, 0, 1) == -56.0

    def test_one_to_two(self):
        assert stepwise_enthalpy(LICL, 1, 2) == pytest.approx(-53.7)

    def test_same_level(self):
        assert stepwise_enthalpy(LICL, 3, 3) == 0.0

    def test_unknown_level(self):
        with pytest.raises(UnknownHydrateError):
            stepwise_enthalpy(LICL, 3, 4)

    def test_descending_rejected(self):
        with pytest.raises(InvalidInputError):
            stepwise_enthalpy(LICL, 2, 1)


class TestSpecValidation:
    def test_non_ascending(self):
        with pytest.raises(InvalidInputError):
            SorbentSpec("X", -1.0, 10.0, (HydrateVariant(2, -5, -20), HydrateVariant(1, -3, -10)))

    def test_enthalpy_must_grow(self):
        with pytest.raises(InvalidInputError):
            SorbentSpec("X", -1.0, 10.0, (HydrateVariant(1, -5, -20), HydrateVariant(2, -3, -10)))

    def test_endothermic_hydrate_rejected(self):
        with pytest.raises(InvalidInputError):
            HydrateVariant(1, -5.0, 3.0)

    def test_molar_mass(self):
        with pytest.raises(InvalidInputError):
            SorbentSpec("X", -1.0, -10.0, (HydrateVariant(1, -5, -20),))

    def test_get_sorbent(self):
        assert get_sorbent("LiCl") is LICL
        with pytest.raises(InvalidInputError):
            get_sorbent("NaCl")

    def test_penta_hydrate_stability_note(self):
        assert LICL.max_hydrate.min_stable_temperature == -80.0


class TestRanking:
    def test_specific_energy_puts_licl_first(self):
        ranked = rank_sorbents(BUILTIN_SORBENTS.values(), {"specific_energy": 1.0})
        assert ranked[0].name == "LiCl"
        assert ranked[0].score == 1.0

    def test_water_uptake_puts_magnesium_sulfate_first(self):
        ranked = rank_sorbents(BUILTIN_SORBENTS.values(), {"water_uptake": 1.0})
        assert ranked[0].name == "MgSO4"

    def test_single_spec(self):
        ranked = rank_sorbents([LICL], {"safety": 2.0, "water_uptake": 1.0})
        assert [(r.name, r.score) for r in ranked] == [("LiCl", 1.0)]

    def test_ties_break_by_name(self):
        ranked = rank_sorbents(BUILTIN_SORBENTS.values(), {"kinetics": 1.0})
        assert [r.name for r in ranked] == sorted(BUILTIN_SORBENTS)

    def test_ordinal_scores_used(self):
        ranked = rank_sorbents(BUILTIN_SORBENTS.values(), {"safety": 1.0}, {"SrBr2": {"safety": 5}})
        assert ranked[0].name == "SrBr2"

    @pytest.mark.parametrize("weights", [{}, {"safety": 0.0}, {"safety": -1.0}, {"colour": 1.0}])
    def test_bad_weights(self, weights):
        with pytest.raises(InvalidInputError):
            rank_sorbents(BUILTIN_SORBENTS.values(), weights)

    def test_deterministic(self):
        w = {"specific_energy": 0.4, "water_uptake": 0.3, "low_temperature_stability": 0.3}
        assert rank_sorbents(BUILTIN_SORBENTS.values(), w) == rank_sorbents(BUILTIN_SORBENTS.values(), w)


def test_export_csv_layout():
    lines = export_storage_csv(BUILTIN_SORBENTS.values()).splitlines()
    assert lines[0] == ",".join(EXPORT_COLUMNS)
    assert len(lines) == 9
    assert lines[1] == "LiCl,1,-408.0,-712.0,-56.0,366.88"
    assert all(math.isfinite(float(line.split(",")[-1])) for line in lines[1:])
