"""Closed-form estimates for the protected two-mode qubit.

Everything here is an explicit formula: Gaussian well-state parameters, the
qubit splitting, the flux-dephasing amplitude, the exponential suppression
of charge-relaxation matrix elements, and the effective junction energies of
the nonlinear-inductor variants. Numerical counterparts live in noise.py;
these are the cross-check targets.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .circuit import DerivedEnergies
    from .hamiltonian import BasisConfig


def _check_positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class GaussianAnsatz:
    """Gaussian approximation of the two well states.

    alpha_*_sq are the inverse-square widths; center0/center1 the (theta, phi)
    well positions. The |1> well sits at phi = pi*E_J/(E_J+E_L), strictly
    inside (0, pi) for E_L > 0.
    """

    alpha_theta_sq: float
    alpha_phi_sq: float
    center0: tuple[float, float]
    center1: tuple[float, float]

    def __post_init__(self) -> None:
        if not (self.alpha_theta_sq > 0 and self.alpha_phi_sq > 0):
            raise ValueError("Gaussian widths must be positive")

    @classmethod
    def from_energies(cls, e_j: float, e_l: float, e_ctheta: float, e_cphi: float
                      ) -> "GaussianAnsatz":
        _check_positive(e_j=e_j, e_ctheta=e_ctheta, e_cphi=e_cphi)
        if e_l < 0 or not math.isfinite(e_l):
            raise ValueError(f"e_l must be nonnegative, got {e_l!r}")
        phi1 = math.pi * e_j / (e_j + e_l)
        return cls(
            alpha_theta_sq=0.5 * math.sqrt(e_j / e_ctheta),
            alpha_phi_sq=0.5 * math.sqrt((e_j + e_l) / e_cphi),
            center0=(0.0, 0.0),
            center1=(math.pi, phi1),
        )


def epsilon10_analytic(e_j: float, e_l: float) -> float:
    """Qubit level splitting E_J E_L pi^2 / (E_J + E_L)."""
    _check_positive(e_j=e_j, e_l=e_l)
    return e_j * e_l * math.pi**2 / (e_j + e_l)


def a_f_analytic(e_j: float, e_l: float, e_ctheta: float, e_cphi: float) -> float:
    """Flux-dephasing amplitude (well-state diagonal difference of the
    first-order flux operator):

        2 pi E_J sin(pi E_L/(E_J+E_L))
            * exp(-1/2 (sqrt(E_ctheta/E_J) + sqrt(E_cphi/(E_J+E_L))))
    """
    _check_positive(e_j=e_j, e_l=e_l, e_ctheta=e_ctheta, e_cphi=e_cphi)
    damp = math.exp(-0.5 * (math.sqrt(e_ctheta / e_j)
                            + math.sqrt(e_cphi / (e_j + e_l))))
    return 2.0 * math.pi * e_j * math.sin(math.pi * e_l / (e_j + e_l)) * damp


def gamma_analytic(e_j: float, e_l: float, e_ctheta: float, e_cphi: float) -> float:
    """Exponential decay rate of the inter-well charge matrix elements:

        (pi^2/8) [sqrt(E_J/E_ctheta) + (E_J/(E_J+E_L))^2 sqrt((E_J+E_L)/E_cphi)]
    """
    _check_positive(e_j=e_j, e_l=e_l, e_ctheta=e_ctheta, e_cphi=e_cphi)
    return (math.pi**2 / 8.0) * (
        math.sqrt(e_j / e_ctheta)
        + (e_j / (e_j + e_l)) ** 2 * math.sqrt((e_j + e_l) / e_cphi)
    )


def b_factors_analytic(e_j: float, e_l: float, e_ctheta: float, e_cphi: float
                       ) -> tuple[float, float]:
    """Magnitudes of the charge-relaxation matrix elements

        |B_theta| = 2 pi sqrt(E_ctheta E_J) e^-gamma
        |B_phi|   = 2 pi sqrt(E_cphi (E_J+E_L)) e^-gamma

    The overall phase is dropped; golden-rule rates consume |B|^2 only.
    Note these are asymptotic instanton results for well-separated wells on
    an open theta coordinate; on the compact circle the theta element is
    killed exactly by a parity selection rule, which the numerical module
    measures. See tests for the honest comparison.
    """
    damp = math.exp(-gamma_analytic(e_j, e_l, e_ctheta, e_cphi))
    b_theta = 2.0 * math.pi * math.sqrt(e_ctheta * e_j) * damp
    b_phi = 2.0 * math.pi * math.sqrt(e_cphi * (e_j + e_l)) * damp
    return b_theta, b_phi


@dataclass(frozen=True)
class EffectiveJunction:
    """Reduced description of a junction pair (or two pairs) acting as a
    nonlinear inductor: effective Josephson energy, internal-mode plasma
    frequency, and the resulting qubit splitting."""

    e_j_eff: float
    omega_chi: float
    epsilon10: float


def _regime_warning(ej_prime: float, e_c: float) -> None:
    if e_c >= ej_prime:
        warnings.warn(
            f"internal-mode charging energy {e_c:.3g} >= junction energy "
            f"{ej_prime:.3g}: the harmonic reduction formula is out of its "
            "validity regime",
            RuntimeWarning,
            stacklevel=3,
        )


def effective_ej_pair(ej_prime: float, e_cchi: float) -> EffectiveJunction:
    """Single junction pair: E_J_eff = 2 E'_J exp(-eta), eta = sqrt(E_cchi/E'_J)/2,
    omega_chi = 4 sqrt(E'_J E_cchi); qubit splitting 2 E_J_eff."""
    _check_positive(ej_prime=ej_prime, e_cchi=e_cchi)
    _regime_warning(ej_prime, e_cchi)
    eta = 0.5 * math.sqrt(e_cchi / ej_prime)
    e_eff = 2.0 * ej_prime * math.exp(-eta)
    return EffectiveJunction(
        e_j_eff=e_eff,
        omega_chi=4.0 * math.sqrt(ej_prime * e_cchi),
        epsilon10=2.0 * e_eff,
    )


def effective_ej_two_pairs(ej_prime: float, e_cxi: float) -> EffectiveJunction:
    """Two junction pairs in series: E_J_eff = 4 E'_J exp(-(eta + eta')),
    eta' = (eta/2) exp(eta/2); the potential is 4pi-periodic and the qubit
    splitting equals E_J_eff itself."""
    _check_positive(ej_prime=ej_prime, e_cxi=e_cxi)
    _regime_warning(ej_prime, e_cxi)
    eta = 0.5 * math.sqrt(e_cxi / ej_prime)
    eta_prime = 0.5 * eta * math.exp(0.5 * eta)
    e_eff = 4.0 * ej_prime * math.exp(-(eta + eta_prime))
    return EffectiveJunction(
        e_j_eff=e_eff,
        omega_chi=4.0 * math.sqrt(ej_prime * e_cxi),
        epsilon10=e_eff,
    )


def gaussian_ansatz_vector(energies: "DerivedEnergies", basis: "BasisConfig",
                           which: int) -> np.ndarray:
    """Discretize the Gaussian well-state ansatz on the charge x grid basis.

    The theta Gaussian is wrapped onto the circle, which in the charge basis
    is again a Gaussian profile exp(-n^2/(4 alpha_theta^2)) with the phase
    (-1)^n carrying a pi-centered well. Only defined for the open (Line)
    phi coordinate. Returns a real unit vector ordered phi-major to match
    the Hamiltonian assembly.
    """
    if which not in (0, 1):
        raise ValueError(f"which must be 0 or 1, got {which!r}")
    mode = basis.phi_mode
    if not hasattr(mode, "phi_max"):
        raise ValueError("Gaussian ansatz is defined for the Line phi mode only")
    ansatz = GaussianAnsatz.from_energies(
        energies.e_j, energies.e_l, energies.e_ctheta, energies.e_cphi
    )
    theta_c, phi_c = ansatz.center0 if which == 0 else ansatz.center1

    n = basis.theta_numbers()
    # wrapped Gaussian: Fourier coefficients e^{-n^2/(4 a^2)} e^{-i n theta_c};
    # theta_c in {0, pi} keeps them real
    coeff_theta = np.exp(-n.astype(float) ** 2 / (4.0 * ansatz.alpha_theta_sq))
    coeff_theta *= np.cos(n * theta_c)

    phi = basis.phi_points()
    coeff_phi = np.exp(-ansatz.alpha_phi_sq * (phi - phi_c) ** 2)

    vec = np.kron(coeff_phi, coeff_theta)
    vec /= np.linalg.norm(vec)
    return vec
