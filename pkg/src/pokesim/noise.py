"""Noise and coherence analysis on the numerical eigenstates.

Qubit-state identification works by theta localization, not eigenvalue rank:
at protected-regime parameters the intrawell plasma excitations interleave
below the qubit splitting. The state localized in the pi well generally
comes as a quasi-degenerate manifold (the inductive confinement leaves a
mirror twin well at negative phi whose tunnel splitting is far below solver
resolution), so matrix elements are taken with a deterministic localized
representative: the extremal eigenvector of the flux-dephasing operator
restricted to that manifold. For a one-dimensional manifold this reduces to
the plain eigenstate.

1/f noise spectra S(omega) = K/|omega| throughout. hbar = 1 internally; SI
conversions happen in the rate helpers via the declared energy unit.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .hamiltonian import OperatorMatrix
from .solver import Spectrum
from .units import EnergyUnit

T_PHI_SENTINEL = 1e12          # internal time units; "dephasing negligible"
DEFAULT_K_CHARGE = 1.7e-6
DEFAULT_K_FLUX = 3e-12
MANIFOLD_WINDOW = 0.2          # fraction of the gap below the pi-well state


class IdentificationError(RuntimeError):
    """Qubit states not found in the computed window."""


@dataclass(frozen=True)
class NoiseModel:
    """1/f noise amplitudes and the infrared cutoff (internal units)."""

    k_theta: float = DEFAULT_K_CHARGE
    k_phi: float = DEFAULT_K_CHARGE
    k_f: float = DEFAULT_K_FLUX
    omega_c: float = 2.0 * math.pi * 1.0e-9   # 2pi x 1 Hz in GHz units

    def __post_init__(self) -> None:
        for name in ("k_theta", "k_phi", "k_f"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not self.omega_c > 0:
            raise ValueError("omega_c must be positive")

    @classmethod
    def from_si(cls, unit: EnergyUnit, k_theta: float = DEFAULT_K_CHARGE,
                k_phi: float = DEFAULT_K_CHARGE, k_f: float = DEFAULT_K_FLUX,
                omega_c_si: float = 2.0 * math.pi) -> "NoiseModel":
        return cls(k_theta=k_theta, k_phi=k_phi, k_f=k_f,
                   omega_c=unit.omega_internal(omega_c_si))


@dataclass(frozen=True)
class QubitStates:
    """Identified qubit doublet within a Spectrum.

    manifold1 lists the quasi-degenerate pi-well states; rep1 the
    coefficients of the localized representative on them. index1 is the
    first manifold member; epsilon10 uses it (the intra-manifold splitting
    is below resolution by construction).
    """

    index0: int
    index1: int
    loc0: float
    loc1: float
    epsilon10_numeric: float
    omega10: float
    manifold1: tuple[int, ...]
    rep1: tuple[float, ...]

    def state0(self, spectrum: Spectrum) -> np.ndarray:
        return spectrum.eigenvectors[:, self.index0]

    def state1(self, spectrum: Spectrum) -> np.ndarray:
        cols = spectrum.eigenvectors[:, list(self.manifold1)]
        return cols @ np.asarray(self.rep1)


def identify_qubit_states(spectrum: Spectrum, cos_theta_op: OperatorMatrix,
                          dephasing_op: Optional[OperatorMatrix] = None
                          ) -> QubitStates:
    """Locate |0> (theta ~ 0 well) and |1> (theta ~ pi well) by <cos theta>.

    |0> is the lowest state with <cos theta> > +0.5, |1> the lowest with
    <cos theta> < -0.5. Consecutive states that stay below -0.5 and within
    a small fraction of the preceding gap form the |1> manifold; the
    localized representative inside it is the extremal eigenvector of
    dephasing_op (pass the cos(theta) sin(phi) observable for the flux
    channel). Without dephasing_op a multi-state manifold falls back to its
    first member, which is a parity eigenstate, not a localized state.
    """
    k = spectrum.k
    loc = np.array([
        complex(cos_theta_op.expectation(spectrum.eigenvectors[:, i])).real
        for i in range(k)
    ])
    try:
        index0 = int(next(i for i in range(k) if loc[i] > 0.5))
    except StopIteration:
        raise IdentificationError(
            "no eigenstate with <cos theta> > 0.5 in the computed window; "
            "increase k"
        ) from None
    try:
        index1 = int(next(i for i in range(k) if loc[i] < -0.5))
    except StopIteration:
        raise IdentificationError(
            "no eigenstate with <cos theta> < -0.5 in the computed window; "
            "increase k"
        ) from None
    if index0 >= index1:
        raise IdentificationError(
            f"localization ordering violated: the theta~0 state (index "
            f"{index0}) lies above the theta~pi state (index {index1}); "
            "the wells are reordered or degenerate at these parameters"
        )

    w = spectrum.eigenvalues
    epsilon10 = float(w[index1] - w[index0])
    if epsilon10 <= 0:
        raise IdentificationError("qubit splitting is not positive")

    manifold = [index1]
    gap_below = float(w[index1] - w[index1 - 1])
    j = index1 + 1
    while (j < k and loc[j] < -0.5
           and float(w[j] - w[index1]) < MANIFOLD_WINDOW * gap_below):
        manifold.append(j)
        j += 1
    if manifold[-1] == k - 1 and len(manifold) > 1:
        warnings.warn(
            "the pi-well manifold touches the end of the computed window; "
            "increase k to be sure it is complete",
            RuntimeWarning,
            stacklevel=2,
        )

    rep = _localized_representative(spectrum, manifold, dephasing_op)
    psi1 = spectrum.eigenvectors[:, manifold] @ rep
    loc1 = complex(cos_theta_op.expectation(psi1)).real

    return QubitStates(
        index0=index0,
        index1=index1,
        loc0=float(loc[index0]),
        loc1=float(loc1),
        epsilon10_numeric=epsilon10,
        omega10=epsilon10,
        manifold1=tuple(manifold),
        rep1=tuple(float(c) for c in rep),
    )


def _localized_representative(spectrum: Spectrum, manifold: Sequence[int],
                              dephasing_op: Optional[OperatorMatrix]
                              ) -> np.ndarray:
    if len(manifold) == 1 or dephasing_op is None:
        rep = np.zeros(len(manifold))
        rep[0] = 1.0
        return rep
    cols = spectrum.eigenvectors[:, list(manifold)]
    xm = np.empty((len(manifold), len(manifold)))
    for a in range(len(manifold)):
        xa = dephasing_op.matrix @ cols[:, a]
        for b in range(a, len(manifold)):
            val = complex(dephasing_op.prefactor) * complex(cols[:, b] @ xa)
            xm[a, b] = xm[b, a] = val.real
    vals, vecs = np.linalg.eigh(xm)
    # extremal eigenvalue = localized combination; on a tie prefer the
    # positive branch for determinism
    i_min, i_max = 0, len(vals) - 1
    pick = i_max if abs(vals[i_max]) >= abs(vals[i_min]) else i_min
    if math.isclose(abs(vals[i_max]), abs(vals[i_min]), rel_tol=1e-9):
        pick = i_max
    rep = vecs[:, pick]
    i = int(np.argmax(np.abs(rep)))
    if rep[i] < 0:
        rep = -rep
    return rep


def dephasing_amplitude_numeric(spectrum: Spectrum, states: QubitStates,
                                op_cos_sin: OperatorMatrix, e_j: float) -> float:
    """Well-state diagonal difference of the first-order flux operator
    -2 pi E_J cos(theta) sin(phi), evaluated on the localized |1>
    representative. Positive for E_L > 0 with these sign conventions."""
    psi0 = states.state0(spectrum)
    psi1 = states.state1(spectrum)
    x1 = complex(op_cos_sin.expectation(psi1)).real
    x0 = complex(op_cos_sin.expectation(psi0)).real
    return -2.0 * math.pi * e_j * (x1 - x0)


def charge_dephasing_check(spectrum: Spectrum, states: QubitStates,
                           n_ops: tuple[OperatorMatrix, OperatorMatrix]
                           ) -> tuple[float, float]:
    """|<1|N|1> - <0|N|0>| for the theta and phi charge operators.

    Exactly zero for real eigenvectors: the charge operators are imaginary
    antisymmetric in this representation, so their real-vector diagonal
    elements vanish identically. A complex-contaminated vector shows up as
    a nonzero return value.
    """
    psi0 = states.state0(spectrum)
    psi1 = states.state1(spectrum)
    out = []
    for op in n_ops:
        out.append(abs(op.expectation(psi1) - op.expectation(psi0)))
    return out[0], out[1]


def flux_relaxation_check(spectrum: Spectrum, states: QubitStates,
                          ops: tuple[OperatorMatrix, OperatorMatrix],
                          e_j: float) -> tuple[float, float]:
    """|<0| 2 pi E_J cos(theta) sin(phi) |1>| and the cos(phi) counterpart:
    the would-be flux relaxation elements, exponentially suppressed by the
    well separation."""
    psi0 = states.state0(spectrum)
    psi1 = states.state1(spectrum)
    op_sin, op_cos = ops
    return (
        2.0 * math.pi * e_j * abs(op_sin.element(psi0, psi1)),
        2.0 * math.pi * e_j * abs(op_cos.element(psi0, psi1)),
    )


def relaxation_elements_numeric(spectrum: Spectrum, states: QubitStates,
                                n_ops: tuple[OperatorMatrix, OperatorMatrix],
                                energies) -> tuple[float, float]:
    """|<0| 8 E_c N |1>| for both charge channels, on the localized |1>."""
    psi0 = states.state0(spectrum)
    psi1 = states.state1(spectrum)
    op_theta, op_phi = n_ops
    b_theta = 8.0 * energies.e_ctheta * abs(op_theta.element(psi0, psi1))
    b_phi = 8.0 * energies.e_cphi * abs(op_phi.element(psi0, psi1))
    return b_theta, b_phi


# --- dephasing integral -----------------------------------------------------
#
# eta(t) = |A_f|^2 (2 K_f / pi) * I(omega_c, t),
# I(a, t) = int_a^inf sin^2(omega t/2) / omega^3 domega
#         = sin^2(at/2)/(2a^2) + t sin(at)/(4a) - (t^2/4) Ci(at).
#
# Scheme "adaptive" integrates [omega_c, 100/t] with adaptive quadrature and
# closes the tail with the exact Ci form. Scheme "composite" uses fixed
# Gauss-Legendre panels (logarithmic below the first oscillation, half-period
# capped above) plus an integration-by-parts asymptotic tail, sharing nothing
# with the first scheme but the prefactor.

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _integrand(omega: np.ndarray, t: float) -> np.ndarray:
    return np.sin(0.5 * omega * t) ** 2 / omega**3


def _tail_exact(a: float, t: float) -> float:
    at = a * t
    return (math.sin(0.5 * at) ** 2 / (2.0 * a * a)
            + t * math.sin(at) / (4.0 * a)
            - 0.25 * t * t * float(special.sici(at)[1]))


def _ci_asymptotic(x: float) -> float:
    # Ci(x) = sin(x)/x * f(x) - cos(x)/x^2 * g(x) with the standard
    # asymptotic series; good to ~1e-12 relative for x >= 60
    inv2 = 1.0 / (x * x)
    f = 1.0
    g = 1.0
    term_f = 1.0
    term_g = 1.0
    for k in range(1, 7):
        term_f *= -(2 * k) * (2 * k - 1) * inv2
        term_g *= -(2 * k) * (2 * k + 1) * inv2
        f += term_f
        g += term_g
    return math.sin(x) / x * f - math.cos(x) / (x * x) * g


def _tail_series(a: float, t: float) -> float:
    at = a * t
    return (math.sin(0.5 * at) ** 2 / (2.0 * a * a)
            + t * math.sin(at) / (4.0 * a)
            - 0.25 * t * t * _ci_asymptotic(at))


def _gl_panel(lo: float, hi: float, t: float) -> float:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return half * float(_GL_WEIGHTS @ _integrand(mid + half * _GL_NODES, t))


def _integral_adaptive(a: float, t: float) -> float:
    cap = 100.0 / t
    if cap <= a:
        return _tail_exact(a, t)
    main, _ = integrate.quad(_integrand, a, cap, args=(t,),
                             epsabs=0.0, epsrel=1e-11, limit=500)
    return main + _tail_exact(cap, t)


def _integral_composite(a: float, t: float) -> float:
    cap = 100.0 / t
    if cap <= a:
        return _tail_series(a, t)
    knee = min(2.0 * math.pi / t, cap)
    total = 0.0
    if knee > a:
        n_log = max(8, int(math.ceil(6 * math.log10(knee / a))))
        edges = np.geomspace(a, knee, n_log + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += _gl_panel(float(lo), float(hi), t)
    if cap > knee:
        width = 0.5 * math.pi / t
        n_lin = int(math.ceil((cap - knee) / width))
        edges = np.linspace(knee, cap, n_lin + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += _gl_panel(float(lo), float(hi), t)
    return total + _tail_series(cap, t)


def dephasing_eta(t: float, a_f: float, noise: NoiseModel,
                  scheme: str = "adaptive") -> float:
    """Dephasing exponent eta(t) for 1/f flux noise S_f = K_f/|omega|."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    if noise.omega_c * t >= 1.0:
        warnings.warn(
            f"omega_c * t = {noise.omega_c * t:.3g} >= 1: the short-time "
            "dephasing form is infrared-dominated here",
            RuntimeWarning,
            stacklevel=2,
        )
    if scheme == "adaptive":
        integral = _integral_adaptive(noise.omega_c, t)
    elif scheme == "composite":
        integral = _integral_composite(noise.omega_c, t)
    else:
        raise ValueError(f"unknown quadrature scheme {scheme!r}")
    return a_f * a_f * (2.0 * noise.k_f / math.pi) * integral


def t_phi_solve(a_f: float, noise: NoiseModel) -> tuple[float, float]:
    """Solve eta(T_phi) = 1. Returns (T_phi, Gamma_phi) in internal units.

    When eta stays below 1 out to the sentinel horizon (vanishing amplitude
    or noise power), returns (T_PHI_SENTINEL, 0.0): dephasing negligible,
    T_phi bounded below by the sentinel.
    """
    if a_f == 0.0 or noise.k_f == 0.0:
        return T_PHI_SENTINEL, 0.0

    def excess(t: float) -> float:
        return dephasing_eta(t, a_f, noise) - 1.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        lo = 1.0
        if excess(lo) >= 0.0:
            # bracket downward for very strong dephasing
            while lo > 1e-12 and excess(lo) > 0.0:
                lo *= 0.5
            hi = 2.0 * lo
        else:
            hi = 2.0
            while hi < T_PHI_SENTINEL and excess(hi) < 0.0:
                hi *= 2.0
            if hi >= T_PHI_SENTINEL and excess(T_PHI_SENTINEL) < 0.0:
                return T_PHI_SENTINEL, 0.0
            lo = hi / 2.0
        t_phi = float(optimize.brentq(excess, lo, hi, rtol=1e-9))
    return t_phi, 1.0 / t_phi


@dataclass(frozen=True)
class RelaxationRates:
    """Golden-rule relaxation output, SI units."""

    gamma1_theta: float
    gamma1_phi: float
    gamma1: float
    t1: Optional[float]     # None when both channels are off


def relaxation_rates(b_theta: float, b_phi: float, omega10: float,
                     noise: NoiseModel, unit: EnergyUnit) -> RelaxationRates:
    """Gamma_1,i = |B_i|^2 S_i(omega10) with S_i = K_i/omega, converted
    to 1/s with the declared unit."""
    if omega10 == 0:
        raise ValueError("omega10 = 0: the qubit is degenerate, "
                         "golden-rule rates are undefined")
    g_theta = b_theta**2 * noise.k_theta / abs(omega10)
    g_phi = b_phi**2 * noise.k_phi / abs(omega10)
    gamma1 = unit.rate_per_second(g_theta + g_phi)
    return RelaxationRates(
        gamma1_theta=unit.rate_per_second(g_theta),
        gamma1_phi=unit.rate_per_second(g_phi),
        gamma1=gamma1,
        t1=(1.0 / gamma1) if gamma1 > 0 else None,
    )


@dataclass(frozen=True)
class NoiseReport:
    """Everything the coherence analysis produces for one parameter point.

    Rates in 1/s, times in s, matrix elements in the declared energy unit.
    charge_dephasing_elements and flux_relaxation_element are the exact-null
    checks; gamma_phi_significant flags when Gamma_2 ~ Gamma_1/2 no longer
    holds.
    """

    a_f_numeric: float
    a_f_analytic: float
    b_theta_numeric: float
    b_phi_numeric: float
    b_theta_analytic: float
    b_phi_analytic: float
    gamma1_theta: float
    gamma1_phi: float
    gamma1: float
    gamma_phi: float
    gamma2: float
    t1: Optional[float]
    t_phi: Optional[float]
    t_phi_negligible: bool
    flux_relaxation_element: float
    charge_dephasing_elements: tuple[float, float]
    gamma_phi_significant: bool


def decoherence_summary(rates: RelaxationRates, gamma_phi: float, *,
                        a_f_numeric: float, a_f_analytic: float,
                        b_theta_numeric: float, b_phi_numeric: float,
                        b_theta_analytic: float, b_phi_analytic: float,
                        t_phi: Optional[float], t_phi_negligible: bool,
                        flux_relaxation_element: float,
                        charge_dephasing_elements: tuple[float, float]
                        ) -> NoiseReport:
    gamma2 = 0.5 * rates.gamma1 + gamma_phi
    return NoiseReport(
        a_f_numeric=a_f_numeric,
        a_f_analytic=a_f_analytic,
        b_theta_numeric=b_theta_numeric,
        b_phi_numeric=b_phi_numeric,
        b_theta_analytic=b_theta_analytic,
        b_phi_analytic=b_phi_analytic,
        gamma1_theta=rates.gamma1_theta,
        gamma1_phi=rates.gamma1_phi,
        gamma1=rates.gamma1,
        gamma_phi=gamma_phi,
        gamma2=gamma2,
        t1=rates.t1,
        t_phi=t_phi,
        t_phi_negligible=t_phi_negligible,
        flux_relaxation_element=flux_relaxation_element,
        charge_dephasing_elements=charge_dephasing_elements,
        gamma_phi_significant=gamma_phi > 0.1 * rates.gamma1,
    )
