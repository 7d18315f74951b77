"""Salt-hydrate chemistry: formation enthalpies, reaction enthalpies, energy densities.

Enthalpies are in kJ/mol, molar masses in g/mol, energy densities in Wh/kg
of *dehydrated* salt. Hydrate levels are integers counting moles of water
bound per mole of salt; level 0 is the dry salt.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import InvalidInputError, UnknownHydrateError

WATER_MOLAR_MASS = 18.015  # g/mol
KJ_PER_MOL_PER_G_TO_WH_PER_KG = 1000.0 / 3.6


@dataclass(frozen=True)
class WaterEnthalpyConvention:
    """Formation enthalpy of water used when closing the hydration balance."""

    dHw: float = -248.0
    label: str = "table"

    def __post_init__(self) -> None:
        if not self.dHw < 0:
            raise InvalidInputError(f"dHw must be negative, got {self.dHw}")


# -248 reproduces the tabulated reaction enthalpies; the other two are the
# textbook standard formation enthalpies.
TABLE_CONVENTION = WaterEnthalpyConvention(-248.0, "table")
VAPOR_CONVENTION = WaterEnthalpyConvention(-241.8, "vapor")
LIQUID_CONVENTION = WaterEnthalpyConvention(-285.8, "liquid")
CONVENTIONS = {c.label: c for c in (TABLE_CONVENTION, VAPOR_CONVENTION, LIQUID_CONVENTION)}


@dataclass(frozen=True)
class HydrateVariant:
    water_moles_x: int
    hydrated_formation_enthalpy_dHfh: float
    reaction_enthalpy_dHr: float
    min_stable_temperature: float | None = None  # degC

    def __post_init__(self) -> None:
        if int(self.water_moles_x) != self.water_moles_x or self.water_moles_x < 1:
            raise InvalidInputError(f"hydrate level must be an integer >= 1, got {self.water_moles_x}")
        if not self.reaction_enthalpy_dHr < 0:
            raise InvalidInputError(
                f"hydration must be exothermic, got dHr={self.reaction_enthalpy_dHr} kJ/mol"
            )


@dataclass(frozen=True)
class SorbentSpec:
    name: str
    dehydrated_formation_enthalpy_dHfd: float
    molar_mass_dehydrated: float
    hydrates: tuple[HydrateVariant, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "hydrates", tuple(self.hydrates))
        if not self.name:
            raise InvalidInputError("sorbent name must be non-empty")
        if not self.molar_mass_dehydrated > 0:
            raise InvalidInputError(
                f"{self.name}: molar mass must be positive, got {self.molar_mass_dehydrated}"
            )
        if not self.hydrates:
            raise InvalidInputError(f"{self.name}: at least one hydrate is required")
        for lo, hi in zip(self.hydrates, self.hydrates[1:]):
            if hi.water_moles_x <= lo.water_moles_x:
                raise InvalidInputError(f"{self.name}: hydrates must be strictly ascending in x")
            if abs(hi.reaction_enthalpy_dHr) <= abs(lo.reaction_enthalpy_dHr):
                raise InvalidInputError(
                    f"{self.name}: |dHr| must increase with x "
                    f"({lo.water_moles_x}->{hi.water_moles_x})"
                )

    @property
    def max_hydrate(self) -> HydrateVariant:
        return self.hydrates[-1]

    @property
    def x_max(self) -> int:
        return self.hydrates[-1].water_moles_x

    def levels(self) -> list[int]:
        """Hydrate levels including the dry salt (0)."""
        return [0] + [h.water_moles_x for h in self.hydrates]

    def cumulative_enthalpies(self) -> list[float]:
        """Tabulated dHr for each entry of :meth:`levels` (0.0 for the dry salt)."""
        return [0.0] + [h.reaction_enthalpy_dHr for h in self.hydrates]

    def hydrate(self, x: int) -> HydrateVariant:
        for h in self.hydrates:
            if h.water_moles_x == x:
                return h
        raise UnknownHydrateError(f"{self.name} has no hydrate with x={x}")


def reaction_enthalpy(
    spec: SorbentSpec,
    x: int,
    dHfh: float,
    convention: WaterEnthalpyConvention = TABLE_CONVENTION,
) -> float:
    """Hydration enthalpy from formation enthalpies: dHfh - (x*dHw + dHfd)."""
    if x < 1:
        raise InvalidInputError(f"x must be >= 1, got {x}")
    return dHfh - (x * convention.dHw + spec.dehydrated_formation_enthalpy_dHfd)


def reaction_enthalpy_hess(
    products_formation: Sequence[float], reactants_formation: Sequence[float]
) -> float:
    """Hess's law: sum of product formation enthalpies minus reactants."""
    if len(products_formation) == 0 or len(reactants_formation) == 0:
        raise InvalidInputError("products and reactants must both be non-empty")
    return sum(products_formation) - sum(reactants_formation)


def hydration_stoichiometry(
    spec: SorbentSpec, x: int, dHfh: float, convention: WaterEnthalpyConvention = TABLE_CONVENTION
) -> tuple[list[float], list[float]]:
    """(products, reactants) formation lists for ``salt + x H2O -> salt.xH2O``.

    The x water terms are collapsed into one ``x*dHw`` entry so the sum is
    evaluated in the same order as :func:`reaction_enthalpy`.
    """
    return [dHfh], [x * convention.dHw + spec.dehydrated_formation_enthalpy_dHfd]


def energy_storage_density(dHr: float, molar_mass_dehydrated: float) -> float:
    """Wh per kg of dehydrated salt for a reaction enthalpy in kJ/mol."""
    if not molar_mass_dehydrated > 0:
        raise InvalidInputError(f"molar mass must be positive, got {molar_mass_dehydrated}")
    return abs(dHr) / molar_mass_dehydrated * KJ_PER_MOL_PER_G_TO_WH_PER_KG


def stepwise_enthalpy(spec: SorbentSpec, from_x: int, to_x: int) -> float:
    """Enthalpy of going from one tabulated hydrate level to a higher one.

    Level 0 is the dry salt. Returns a negative number (kJ per mol salt).
    """
    if from_x > to_x:
        raise InvalidInputError(f"from_x ({from_x}) must not exceed to_x ({to_x})")
    table = dict(zip(spec.levels(), spec.cumulative_enthalpies()))
    for level in (from_x, to_x):
        if level not in table:
            raise UnknownHydrateError(f"{spec.name} has no hydrate level x={level}")
    return table[to_x] - table[from_x]


@dataclass(frozen=True)
class SorbentScore:
    name: str
    score: float
    criteria: Mapping[str, float]


QUANTIFIED_CRITERIA = ("water_uptake", "specific_energy", "low_temperature_stability")
ORDINAL_CRITERIA = ("kinetics", "availability", "ease_of_storage", "safety")
ORDINAL_DEFAULT = 3.0


def rank_sorbents(
    specs: Iterable[SorbentSpec],
    weights: Mapping[str, float],
    ordinal_scores: Mapping[str, Mapping[str, float]] | None = None,
) -> list[SorbentScore]:
    """Weighted multi-criteria ranking, best first.

    Quantified criteria are normalised by the best value among ``specs``:
    water uptake by max hydrate level, specific energy by Wh/kg of the max
    hydrate, low-temperature stability by how far below 0 degC the max
    hydrate stays stable (0 when unknown). Ordinal criteria take 0-5 user
    scores per sorbent name, default 3. Final scores are rescaled so the
    leader scores 1. Ties sort by name.
    """
    known = set(QUANTIFIED_CRITERIA) | set(ORDINAL_CRITERIA)
    unknown = set(weights) - known
    if unknown:
        raise InvalidInputError(f"unknown ranking criteria: {sorted(unknown)}")
    if any(w < 0 for w in weights.values()):
        raise InvalidInputError("ranking weights must be non-negative")
    total_weight = sum(weights.values())
    if not total_weight > 0:
        raise InvalidInputError("at least one ranking weight must be positive")
    ordinal_scores = ordinal_scores or {}
    specs = list(specs)
    if not specs:
        return []

    raw: dict[str, dict[str, float]] = {}
    for s in specs:
        top = s.max_hydrate
        stab = top.min_stable_temperature
        raw[s.name] = {
            "water_uptake": float(top.water_moles_x),
            "specific_energy": energy_storage_density(top.reaction_enthalpy_dHr, s.molar_mass_dehydrated),
            "low_temperature_stability": max(0.0, -stab) if stab is not None else 0.0,
        }
        user = ordinal_scores.get(s.name, {})
        for crit in ORDINAL_CRITERIA:
            value = float(user.get(crit, ORDINAL_DEFAULT))
            if not 0.0 <= value <= 5.0:
                raise InvalidInputError(f"{s.name}: ordinal score {crit}={value} outside 0-5")
            raw[s.name][crit] = value / 5.0

    best = {c: max(r[c] for r in raw.values()) for c in QUANTIFIED_CRITERIA}
    scored = []
    for name, r in raw.items():
        normalised = dict(r)
        for c in QUANTIFIED_CRITERIA:
            normalised[c] = r[c] / best[c] if best[c] > 0 else 0.0
        total = sum(weights.get(c, 0.0) * normalised[c] for c in normalised) / total_weight
        scored.append((name, total, normalised))

    leader = max(t for _, t, _ in scored)
    out = [
        SorbentScore(name, t / leader if leader > 0 else 0.0, n) for name, t, n in scored
    ]
    out.sort(key=lambda s: (-s.score, s.name))
    return out


def _lit(x: int, dHfh: float, dHr: float, stable: float | None = None) -> HydrateVariant:
    return HydrateVariant(x, dHfh, dHr, stable)


# Literature rows: dry salt formation enthalpy, molar mass, hydrate rows.
BUILTIN_SORBENTS: dict[str, SorbentSpec] = {
    s.name: s
    for s in (
        SorbentSpec(
            "LiCl",
            -408.0,
            42.4,
            (
                _lit(1, -712.0, -56.0),
                _lit(2, -1013.7, -109.7),
                _lit(3, -1311.0, -159.0),
                _lit(5, -1889.11, -241.11, -80.0),
            ),
        ),
        SorbentSpec("MgSO4", -1278.0, 120.36, (_lit(7, -3388.0, -374.0),)),
        SorbentSpec("MgCl2", -641.0, 95.21, (_lit(6, -2499.0, -370.0),)),
        SorbentSpec("SrBr2", -717.0, 247.4, (_lit(6, -2531.0, -326.0),)),
        SorbentSpec("CaCl2", -795.0, 110.98, (_lit(6, -2607.0, -363.2),)),
    )
}


def get_sorbent(name: str, extra: Mapping[str, SorbentSpec] | None = None) -> SorbentSpec:
    if extra and name in extra:
        return extra[name]
    try:
        return BUILTIN_SORBENTS[name]
    except KeyError:
        raise InvalidInputError(f"unknown sorbent {name!r}") from None


EXPORT_COLUMNS = ("name", "x", "dHfd_kJ_mol", "dHfh_kJ_mol", "dHr_kJ_mol", "energy_Wh_kg")


def storage_table(specs: Iterable[SorbentSpec]) -> list[dict[str, object]]:
    rows = []
    for s in specs:
        for h in s.hydrates:
            rows.append(
                {
                    "name": s.name,
                    "x": h.water_moles_x,
                    "dHfd_kJ_mol": s.dehydrated_formation_enthalpy_dHfd,
                    "dHfh_kJ_mol": h.hydrated_formation_enthalpy_dHfh,
                    "dHr_kJ_mol": h.reaction_enthalpy_dHr,
                    "energy_Wh_kg": energy_storage_density(h.reaction_enthalpy_dHr, s.molar_mass_dehydrated),
                }
            )
    return rows


def export_storage_csv(specs: Iterable[SorbentSpec]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=EXPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in storage_table(specs):
        row = dict(row)
        row["energy_Wh_kg"] = f"{row['energy_Wh_kg']:.2f}"
        writer.writerow(row)
    return buf.getvalue()

