"""Circuit descriptions and the effective energies of the reduced models.

A circuit is given either by its element values (capacitances, inductance,
junction energies) or directly by the effective energy scales; both map to
one DerivedEnergies record that all downstream modules consume.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from . import analytic
from .units import (
    FLUX_QUANTUM,
    GHZ,
    EnergyUnit,
    capacitance_to_charging_energy,
    charging_energy_to_capacitance,
    inductance_to_inductive_energy,
)


class Variant(enum.Enum):
    POKEMON = "Pokemon"
    ZERO_PI = "ZeroPi"
    SHUNTED_BIFLUXON = "ShuntedBifluxon"
    POKEMON_JJ_PAIR = "PokemonJJPair"
    POKEMON_JJ_TWO_PAIRS = "PokemonJJTwoPairs"


class PhiPeriodicity(enum.Enum):
    LINE = "line"            # inductive phi^2 confinement, open coordinate
    PERIOD_2PI = "2pi"       # junction-pair replacement, 2pi-periodic
    PERIOD_4PI = "4pi"       # two junction pairs, 4pi-periodic


INDUCTOR_VARIANTS = (Variant.POKEMON, Variant.ZERO_PI, Variant.SHUNTED_BIFLUXON)
JJ_VARIANTS = (Variant.POKEMON_JJ_PAIR, Variant.POKEMON_JJ_TWO_PAIRS)

PERIODICITY = {
    Variant.POKEMON: PhiPeriodicity.LINE,
    Variant.ZERO_PI: PhiPeriodicity.LINE,
    Variant.SHUNTED_BIFLUXON: PhiPeriodicity.LINE,
    Variant.POKEMON_JJ_PAIR: PhiPeriodicity.PERIOD_2PI,
    Variant.POKEMON_JJ_TWO_PAIRS: PhiPeriodicity.PERIOD_4PI,
}


class CircuitError(ValueError):
    """Invalid circuit description."""


def _require_positive(name: str, value: Optional[float]) -> None:
    if value is None:
        return
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise CircuitError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class Elements:
    """Physical element values. Capacitances in F, inductance in H,
    junction energies already in the declared energy unit."""

    c_s: Optional[float] = None
    c_j: Optional[float] = None
    c_l: Optional[float] = None
    l: Optional[float] = None
    e_j: Optional[float] = None
    ej_prime: Optional[float] = None
    cj_prime: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("c_s", "c_j", "c_l", "l", "e_j", "ej_prime", "cj_prime"):
            _require_positive(name, getattr(self, name))


@dataclass(frozen=True)
class DirectEnergies:
    """Effective energies given directly, in the declared energy unit."""

    e_j: Optional[float] = None
    e_ctheta: Optional[float] = None
    e_cphi: Optional[float] = None
    e_l: Optional[float] = None
    ej_prime: Optional[float] = None
    e_cchi: Optional[float] = None
    e_cxi: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("e_j", "e_ctheta", "e_cphi", "e_l", "ej_prime", "e_cchi", "e_cxi"):
            _require_positive(name, getattr(self, name))


@dataclass(frozen=True)
class CircuitSpec:
    variant: Variant
    f: float = 0.0
    energy_unit: EnergyUnit = GHZ
    elements: Optional[Elements] = None
    energies: Optional[DirectEnergies] = None

    def __post_init__(self) -> None:
        if not isinstance(self.variant, Variant):
            raise CircuitError(f"unknown variant {self.variant!r}")
        if not (isinstance(self.f, (int, float)) and math.isfinite(self.f)):
            raise CircuitError(f"reduced flux f must be finite, got {self.f!r}")
        if (self.elements is None) == (self.energies is None):
            raise CircuitError(
                "exactly one of element values or direct energies must be given"
            )


@dataclass(frozen=True)
class DerivedEnergies:
    """Variant-resolved energy scales, dimensionless in `unit`.

    e_j_eff is the effective junction energy replacing the inductor for the
    JJ variants (zero otherwise); omega_chi the internal-mode plasma
    frequency. m_theta/m_phi are SI mass diagnostics (kg m^2 equivalents of
    the phase coordinates), reconstructed from the charging energies.
    """

    variant: Variant
    e_j: float
    e_ctheta: float
    e_cphi: float
    e_l: float
    phi_periodicity: PhiPeriodicity
    unit: EnergyUnit = GHZ
    ej_prime: Optional[float] = None
    e_cchi: Optional[float] = None
    e_cxi: Optional[float] = None
    e_j_eff: float = 0.0
    omega_chi: Optional[float] = None
    m_theta: float = field(default=0.0, compare=False)
    m_phi: float = field(default=0.0, compare=False)


def _mass_from_charging(e_c: float, unit: EnergyUnit) -> float:
    # M = 2 (Phi0/2pi)^2 C_eff with C_eff = e^2/(4 E_c)
    c_eff = charging_energy_to_capacitance(e_c, unit)
    return 2.0 * (FLUX_QUANTUM / (2.0 * math.pi)) ** 2 * c_eff


def derive_energies(spec: CircuitSpec) -> DerivedEnergies:
    """Resolve a CircuitSpec into the energies of its reduced Hamiltonian.

    Direct-energy input passes through unchanged after validation; element
    input applies the variant-specific charging/inductive formulas.
    """
    unit = spec.energy_unit
    periodicity = PERIODICITY[spec.variant]

    if spec.energies is not None:
        d = spec.energies
        if spec.variant in INDUCTOR_VARIANTS:
            required = {"e_j": d.e_j, "e_ctheta": d.e_ctheta, "e_cphi": d.e_cphi, "e_l": d.e_l}
        else:
            key = "e_cchi" if spec.variant is Variant.POKEMON_JJ_PAIR else "e_cxi"
            required = {
                "e_j": d.e_j,
                "e_ctheta": d.e_ctheta,
                "e_cphi": d.e_cphi,
                "ej_prime": d.ej_prime,
                key: getattr(d, key),
            }
        missing = [k for k, v in required.items() if v is None]
        if missing:
            raise CircuitError(
                f"variant {spec.variant.value} needs energies {missing}"
            )
        if spec.variant is Variant.SHUNTED_BIFLUXON and d.e_ctheta != d.e_cphi:
            raise CircuitError(
                "ShuntedBifluxon has isotropic masses: E_ctheta must equal E_cphi"
            )
        e_l = d.e_l if d.e_l is not None else 0.0
        if spec.variant in JJ_VARIANTS:
            e_l = 0.0
        return _finish(
            spec, unit, periodicity,
            e_j=d.e_j, e_ctheta=d.e_ctheta, e_cphi=d.e_cphi, e_l=e_l,
            ej_prime=d.ej_prime, e_cchi=d.e_cchi, e_cxi=d.e_cxi,
        )

    el = spec.elements
    assert el is not None
    if el.c_s is None or el.c_j is None or el.e_j is None:
        raise CircuitError("element form needs at least C_s, C_J and E_J")
    e_ctheta = capacitance_to_charging_energy(el.c_s + el.c_j, unit)

    if spec.variant is Variant.POKEMON:
        if el.c_l is None or el.l is None:
            raise CircuitError("Pokemon needs C_L and L")
        e_cphi = capacitance_to_charging_energy(el.c_s + el.c_j + 2.0 * el.c_l, unit)
        e_l = inductance_to_inductive_energy(el.l, unit, loop_factor=2.0)
    elif spec.variant is Variant.ZERO_PI:
        if el.l is None:
            raise CircuitError("ZeroPi needs L")
        e_cphi = capacitance_to_charging_energy(el.c_j, unit)
        e_l = inductance_to_inductive_energy(el.l, unit, loop_factor=1.0)
    elif spec.variant is Variant.SHUNTED_BIFLUXON:
        if el.l is None:
            raise CircuitError("ShuntedBifluxon needs L")
        e_cphi = e_ctheta
        e_l = inductance_to_inductive_energy(el.l, unit, loop_factor=2.0)
    else:
        if el.ej_prime is None or el.cj_prime is None:
            raise CircuitError(f"{spec.variant.value} needs E'_J and C'_J")
        shunt = el.cj_prime if spec.variant is Variant.POKEMON_JJ_PAIR else el.cj_prime / 2.0
        e_cphi = capacitance_to_charging_energy(el.c_s + el.c_j + shunt, unit)
        e_l = 0.0
        e_cchi = capacitance_to_charging_energy(el.cj_prime, unit)
        if spec.variant is Variant.POKEMON_JJ_PAIR:
            return _finish(spec, unit, periodicity, e_j=el.e_j, e_ctheta=e_ctheta,
                           e_cphi=e_cphi, e_l=e_l, ej_prime=el.ej_prime,
                           e_cchi=e_cchi, e_cxi=None)
        return _finish(spec, unit, periodicity, e_j=el.e_j, e_ctheta=e_ctheta,
                       e_cphi=e_cphi, e_l=e_l, ej_prime=el.ej_prime,
                       e_cchi=None, e_cxi=e_cchi)

    return _finish(spec, unit, periodicity, e_j=el.e_j, e_ctheta=e_ctheta,
                   e_cphi=e_cphi, e_l=e_l, ej_prime=None, e_cchi=None, e_cxi=None)


def _finish(spec, unit, periodicity, *, e_j, e_ctheta, e_cphi, e_l,
            ej_prime, e_cchi, e_cxi) -> DerivedEnergies:
    e_j_eff = 0.0
    omega_chi = None
    if spec.variant is Variant.POKEMON_JJ_PAIR:
        eff = analytic.effective_ej_pair(ej_prime, e_cchi)
        e_j_eff, omega_chi = eff.e_j_eff, eff.omega_chi
    elif spec.variant is Variant.POKEMON_JJ_TWO_PAIRS:
        eff = analytic.effective_ej_two_pairs(ej_prime, e_cxi)
        e_j_eff, omega_chi = eff.e_j_eff, eff.omega_chi

    return DerivedEnergies(
        variant=spec.variant,
        e_j=e_j,
        e_ctheta=e_ctheta,
        e_cphi=e_cphi,
        e_l=e_l,
        phi_periodicity=periodicity,
        unit=unit,
        ej_prime=ej_prime,
        e_cchi=e_cchi,
        e_cxi=e_cxi,
        e_j_eff=e_j_eff,
        omega_chi=omega_chi,
        m_theta=_mass_from_charging(e_ctheta, unit),
        m_phi=_mass_from_charging(e_cphi, unit),
    )


def validate_regime(energies: DerivedEnergies) -> list[str]:
    """Advisory checks that the protected-qubit approximations apply.

    Returns human-readable warnings; never raises.
    """
    warnings: list[str] = []
    if energies.e_l > 0 and energies.e_j / energies.e_l < 5:
        warnings.append(
            f"E_J/E_L = {energies.e_j / energies.e_l:.3g} < 5: "
            "well separation from the inductive confinement is weak"
        )
    if energies.e_j / energies.e_ctheta < 10:
        warnings.append(
            f"E_J/E_ctheta = {energies.e_j / energies.e_ctheta:.3g} < 10: "
            "theta wells are shallow"
        )
    if energies.e_j / energies.e_cphi < 10:
        warnings.append(
            f"E_J/E_cphi = {energies.e_j / energies.e_cphi:.3g} < 10: "
            "phi wells are shallow"
        )
    if energies.variant in JJ_VARIANTS and energies.omega_chi is not None:
        if energies.variant is Variant.POKEMON_JJ_PAIR:
            omega_q = 2.0 * energies.e_j_eff
        else:
            omega_q = energies.e_j_eff
        if energies.omega_chi <= omega_q:
            warnings.append(
                f"omega_chi = {energies.omega_chi:.3g} <= qubit splitting "
                f"{omega_q:.3g}: internal junction mode is not fast"
            )
    return warnings
