"""Energy-unit bookkeeping.

Internally every energy is a dimensionless multiple of a declared unit
(default GHz times Planck's constant) and hbar = 1, so angular frequencies
equal energies numerically. SI conversions happen only at I/O boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants

FLUX_QUANTUM = constants.h / (2.0 * constants.e)


@dataclass(frozen=True)
class EnergyUnit:
    """One dimensionless energy = `hz` Hz times Planck's constant."""

    label: str
    hz: float

    def __post_init__(self) -> None:
        if not (self.hz > 0.0 and math.isfinite(self.hz)):
            raise ValueError(f"unit frequency must be positive and finite, got {self.hz}")

    @property
    def omega(self) -> float:
        """Angular frequency (rad/s) of one unit of energy."""
        return 2.0 * math.pi * self.hz

    def seconds(self, t_internal: float) -> float:
        """Convert a dimensionless (hbar=1) time to seconds."""
        return t_internal / self.omega

    def rate_per_second(self, rate_internal: float) -> float:
        """Convert a dimensionless rate to 1/s."""
        return rate_internal * self.omega

    def omega_internal(self, omega_si: float) -> float:
        """Convert an angular frequency in rad/s to internal units."""
        return omega_si / self.omega


GHZ = EnergyUnit("GHz", 1e9)
MHZ = EnergyUnit("MHz", 1e6)
KHZ = EnergyUnit("kHz", 1e3)
HZ = EnergyUnit("Hz", 1.0)

_UNITS = {u.label: u for u in (GHZ, MHZ, KHZ, HZ)}


def unit_from_label(label: str) -> EnergyUnit:
    try:
        return _UNITS[label]
    except KeyError:
        raise ValueError(
            f"unknown energy unit {label!r}; known: {sorted(_UNITS)}"
        ) from None


def capacitance_to_charging_energy(c_farad: float, unit: EnergyUnit = GHZ) -> float:
    """Charging energy e^2/(4C) of a capacitance, in the given unit.

    Uses the single-electron convention e^2/(4C), not the Cooper-pair 2e one.
    """
    if not (c_farad > 0.0 and math.isfinite(c_farad)):
        raise ValueError(f"capacitance must be positive and finite, got {c_farad}")
    return constants.e**2 / (4.0 * c_farad) / constants.h / unit.hz


def inductance_to_inductive_energy(
    l_henry: float, unit: EnergyUnit = GHZ, loop_factor: float = 2.0
) -> float:
    """Inductive energy loop_factor*(Phi0/2pi)^2/L in the given unit.

    loop_factor is 2 for the shunted-loop circuits here and 1 for the
    plain 0-pi loop.
    """
    if not (l_henry > 0.0 and math.isfinite(l_henry)):
        raise ValueError(f"inductance must be positive and finite, got {l_henry}")
    return loop_factor * (FLUX_QUANTUM / (2.0 * math.pi)) ** 2 / l_henry / constants.h / unit.hz


def charging_energy_to_capacitance(e_c: float, unit: EnergyUnit = GHZ) -> float:
    """Inverse of capacitance_to_charging_energy, for mass diagnostics."""
    if not (e_c > 0.0 and math.isfinite(e_c)):
        raise ValueError(f"charging energy must be positive and finite, got {e_c}")
    return constants.e**2 / (4.0 * e_c * constants.h * unit.hz)
