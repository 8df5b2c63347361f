"""Sparse operator assembly on the charge (theta) x grid (phi) basis.

theta lives on a circle and is represented by integer charge states
n in [-n_theta_max, n_theta_max]. phi is either an open coordinate with
hard walls at +-phi_max (inductive variants) or periodic with period 2pi
or 4pi (junction-pair variants). The optional internal mode chi uses a
periodic charge basis like theta.

Memory layout is phi-major with theta fastest (index = j_phi * dim_theta
+ i_theta; the chi index, when present, sits between them). This keeps the
matrix bandwidth at dim_theta * dim_chi, which the shift-invert LU
factorization depends on.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.sparse as sp

from .circuit import DerivedEnergies, PhiPeriodicity, Variant

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class AssemblyError(ValueError):
    """Basis/variant mismatch or invalid discretization."""


@dataclass(frozen=True)
class GridLine:
    """Open phi coordinate: n_phi interior points of [-phi_max, phi_max]
    with hard-wall (Dirichlet) boundaries."""

    phi_max: float = 8.0
    n_phi: int = 512

    def __post_init__(self) -> None:
        if not (self.phi_max > 0 and math.isfinite(self.phi_max)):
            raise AssemblyError(f"phi_max must be positive, got {self.phi_max!r}")
        if self.n_phi < 16:
            raise AssemblyError(f"n_phi must be at least 16, got {self.n_phi}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.phi_max / (self.n_phi + 1)

    def points(self) -> np.ndarray:
        return np.linspace(-self.phi_max, self.phi_max, self.n_phi + 2)[1:-1]


@dataclass(frozen=True)
class GridPeriodic:
    """Periodic phi coordinate with period 2pi or 4pi."""

    period: float = TWO_PI
    n_phi: int = 512

    def __post_init__(self) -> None:
        if not (math.isclose(self.period, TWO_PI) or math.isclose(self.period, FOUR_PI)):
            raise AssemblyError(f"period must be 2pi or 4pi, got {self.period!r}")
        if self.n_phi < 16 or self.n_phi % 2 != 0:
            raise AssemblyError(
                f"periodic grids need an even n_phi >= 16, got {self.n_phi}"
            )

    @property
    def spacing(self) -> float:
        return self.period / self.n_phi

    def points(self) -> np.ndarray:
        # 2pi grids are centered on zero; 4pi grids span [0, 4pi) so that
        # cos(phi/2) is single-valued. Both point sets map onto themselves
        # under phi -> -phi (mod period).
        start = -math.pi if math.isclose(self.period, TWO_PI) else 0.0
        return start + self.spacing * np.arange(self.n_phi)


PhiMode = Union[GridLine, GridPeriodic]


@dataclass(frozen=True)
class BasisConfig:
    n_theta_max: int = 20
    phi_mode: PhiMode = GridLine()
    chi_levels: int = 0

    def __post_init__(self) -> None:
        if self.n_theta_max < 1:
            raise AssemblyError(f"n_theta_max must be >= 1, got {self.n_theta_max}")
        if self.chi_levels < 0:
            raise AssemblyError(f"chi_levels must be >= 0, got {self.chi_levels}")

    @property
    def dim_theta(self) -> int:
        return 2 * self.n_theta_max + 1

    @property
    def dim_chi(self) -> int:
        return 2 * self.chi_levels + 1 if self.chi_levels else 1

    @property
    def dimension(self) -> int:
        return self.dim_theta * self.phi_mode.n_phi * self.dim_chi

    def theta_numbers(self) -> np.ndarray:
        return np.arange(-self.n_theta_max, self.n_theta_max + 1)

    def phi_points(self) -> np.ndarray:
        return self.phi_mode.points()

    def chi_numbers(self) -> np.ndarray:
        if self.chi_levels == 0:
            raise AssemblyError("basis has no chi mode")
        return np.arange(-self.chi_levels, self.chi_levels + 1)


@dataclass(frozen=True)
class OperatorMatrix:
    """Sparse operator: a real matrix plus a symbolically tracked scalar.

    The represented operator is prefactor * matrix. Keeping the matrix real
    even for the antisymmetric charge operators (prefactor -i) lets a purely
    real symmetric eigensolver handle every Hamiltonian.
    """

    matrix: sp.csr_matrix
    basis: BasisConfig
    prefactor: complex = 1.0
    hermitian: bool = True

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def realness(self) -> bool:
        return complex(self.prefactor).imag == 0.0

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def expectation(self, v: np.ndarray) -> complex:
        return self.prefactor * (np.conjugate(v) @ (self.matrix @ v))

    def element(self, bra: np.ndarray, ket: np.ndarray) -> complex:
        return self.prefactor * (np.conjugate(bra) @ (self.matrix @ ket))

    def dense(self) -> np.ndarray:
        return self.prefactor * self.matrix.toarray()


class ObservableKind(enum.Enum):
    NTHETA = "Ntheta"
    NPHI = "Nphi"
    COS_THETA_SIN_PHI = "CosThetaSinPhi"
    COS_THETA_COS_PHI = "CosThetaCosPhi"
    COS_THETA = "CosTheta"
    PHI = "Phi"
    PHI_SQUARED = "PhiSquared"


def _theta_identity(basis: BasisConfig) -> sp.csr_matrix:
    return sp.identity(basis.dim_theta, format="csr")


def _theta_number(basis: BasisConfig) -> sp.csr_matrix:
    return sp.diags(basis.theta_numbers().astype(float)).tocsr()


def _theta_cos(basis: BasisConfig) -> sp.csr_matrix:
    d = basis.dim_theta
    off = 0.5 * np.ones(d - 1)
    return sp.diags([off, off], offsets=[1, -1]).tocsr()


def _charge_kinetic(numbers: np.ndarray, e_c: float) -> sp.csr_matrix:
    return sp.diags(4.0 * e_c * numbers.astype(float) ** 2).tocsr()


def _phi_laplacian(mode: PhiMode) -> sp.csr_matrix:
    """Second-order central-difference N_phi^2 = -d^2/dphi^2 (positive
    semidefinite)."""
    n = mode.n_phi
    h = mode.spacing
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    m = sp.diags([off, main, off], offsets=[-1, 0, 1], format="lil")
    if isinstance(mode, GridPeriodic):
        m[0, n - 1] = -1.0 / h**2
        m[n - 1, 0] = -1.0 / h**2
    return m.tocsr()


def _phi_derivative(mode: PhiMode) -> sp.csr_matrix:
    """Central-difference d/dphi, real antisymmetric. N_phi = -i * this."""
    n = mode.n_phi
    h = mode.spacing
    off = np.full(n - 1, 1.0 / (2.0 * h))
    m = sp.diags([off, -off], offsets=[1, -1], format="lil")
    if isinstance(mode, GridPeriodic):
        m[0, n - 1] = -1.0 / (2.0 * h)
        m[n - 1, 0] = 1.0 / (2.0 * h)
    return m.tocsr()


def _canonical_flux(f: float, mode: PhiMode) -> float:
    # On periodic grids f and f+2 give the same potential; reducing here
    # makes them identical bit-for-bit, not just up to rounding.
    if isinstance(mode, GridPeriodic):
        return f % 2.0
    return f


def _expected_mode(periodicity: PhiPeriodicity, mode: PhiMode) -> None:
    if periodicity is PhiPeriodicity.LINE:
        ok = isinstance(mode, GridLine)
    elif periodicity is PhiPeriodicity.PERIOD_2PI:
        ok = isinstance(mode, GridPeriodic) and math.isclose(mode.period, TWO_PI)
    else:
        ok = isinstance(mode, GridPeriodic) and math.isclose(mode.period, FOUR_PI)
    if not ok:
        raise AssemblyError(
            f"phi mode {mode!r} does not match the variant periodicity "
            f"{periodicity.value!r}"
        )


def _phi_confinement(energies: DerivedEnergies, mode: PhiMode) -> np.ndarray:
    phi = mode.points()
    if energies.phi_periodicity is PhiPeriodicity.LINE:
        return energies.e_l * phi**2
    if energies.phi_periodicity is PhiPeriodicity.PERIOD_2PI:
        return energies.e_j_eff * (1.0 - np.cos(phi))
    return energies.e_j_eff * (1.0 - np.cos(phi / 2.0))


def assemble_hamiltonian(energies: DerivedEnergies, basis: BasisConfig,
                         f: float = 0.0) -> OperatorMatrix:
    """Reduced two-mode Hamiltonian

        4 E_ctheta N_theta^2 + 4 E_cphi N_phi^2 + 2 E_J
            - 2 E_J cos(theta) cos(phi - pi f) + confinement(phi)

    as a real symmetric sparse matrix. The confinement is E_L phi^2 on the
    open coordinate and the effective junction potential on periodic ones.
    """
    mode = basis.phi_mode
    _expected_mode(energies.phi_periodicity, mode)
    if basis.chi_levels:
        raise AssemblyError(
            "two-mode assembly got a basis with chi_levels > 0; "
            "use assemble_jj_pair_full for the three-mode model"
        )
    f = _canonical_flux(f, mode)

    i_theta = _theta_identity(basis)
    i_phi = sp.identity(mode.n_phi, format="csr")
    phi = mode.points()

    k_theta = _charge_kinetic(basis.theta_numbers(), energies.e_ctheta)
    k_phi = 4.0 * energies.e_cphi * _phi_laplacian(mode)
    diag_phi = sp.diags(_phi_confinement(energies, mode)).tocsr()
    cos_shift = sp.diags(np.cos(phi - math.pi * f)).tocsr()

    h = (
        sp.kron(i_phi, k_theta)
        + sp.kron(k_phi + diag_phi, i_theta)
        + 2.0 * energies.e_j * sp.identity(basis.dim_theta * mode.n_phi)
        - 2.0 * energies.e_j * sp.kron(cos_shift, _theta_cos(basis))
    ).tocsr()
    return OperatorMatrix(matrix=h, basis=basis)


def assemble_observable(kind: ObservableKind, basis: BasisConfig) -> OperatorMatrix:
    """Observables in the same layout as assemble_hamiltonian, without any
    model prefactors (those belong to the noise analysis)."""
    mode = basis.phi_mode
    i_theta = _theta_identity(basis)
    phi = mode.points()
    # identity on the chi factor keeps two- and three-mode layouts uniform
    theta_block = (lambda t: sp.kron(sp.identity(basis.dim_chi, format="csr"), t)) \
        if basis.chi_levels else (lambda t: t)
    i_phi = sp.identity(mode.n_phi, format="csr")

    prefactor: complex = 1.0
    if kind is ObservableKind.NTHETA:
        m = sp.kron(i_phi, theta_block(_theta_number(basis)))
    elif kind is ObservableKind.NPHI:
        m = sp.kron(_phi_derivative(mode), theta_block(i_theta))
        prefactor = -1.0j
    elif kind is ObservableKind.COS_THETA:
        m = sp.kron(i_phi, theta_block(_theta_cos(basis)))
    elif kind is ObservableKind.COS_THETA_SIN_PHI:
        m = sp.kron(sp.diags(np.sin(phi)), theta_block(_theta_cos(basis)))
    elif kind is ObservableKind.COS_THETA_COS_PHI:
        m = sp.kron(sp.diags(np.cos(phi)), theta_block(_theta_cos(basis)))
    elif kind is ObservableKind.PHI:
        m = sp.kron(sp.diags(phi), theta_block(i_theta))
    elif kind is ObservableKind.PHI_SQUARED:
        m = sp.kron(sp.diags(phi**2), theta_block(i_theta))
    else:
        raise AssemblyError(f"unsupported observable kind {kind!r}")
    return OperatorMatrix(matrix=m.tocsr(), basis=basis, prefactor=prefactor)


def chi_cos_matrix(chi_levels: int) -> sp.csr_matrix:
    """cos(chi) on the internal-mode charge basis."""
    d = 2 * chi_levels + 1
    off = 0.5 * np.ones(d - 1)
    return sp.diags([off, off], offsets=[1, -1]).tocsr()


def chi_mode_hamiltonian(ej_prime: float, e_cchi: float, chi_levels: int
                         ) -> sp.csr_matrix:
    """Internal junction-pair mode 4 E_cchi N_chi^2 + 2 E'_J (1 - cos chi)."""
    m = np.arange(-chi_levels, chi_levels + 1)
    d = 2 * chi_levels + 1
    return (
        _charge_kinetic(m, e_cchi)
        + 2.0 * ej_prime * (sp.identity(d) - chi_cos_matrix(chi_levels))
    ).tocsr()


def assemble_jj_pair_full(energies: DerivedEnergies, basis: BasisConfig,
                          f: float = 0.0) -> OperatorMatrix:
    """Full three-mode model of the junction-pair variant:

        H_J(theta, phi) + 2 E'_J (1 - cos phi) cos chi + H_chi

    with H_J the two-mode kinetic + junction part (no confinement; the pair
    itself provides it through the chi coupling). Layout: phi-major, chi in
    the middle, theta fastest.
    """
    if energies.variant is not Variant.POKEMON_JJ_PAIR:
        raise AssemblyError(
            f"three-mode assembly is defined for the junction-pair variant, "
            f"got {energies.variant.value}"
        )
    if basis.chi_levels < 4:
        raise AssemblyError(
            f"three-mode assembly needs chi_levels >= 4, got {basis.chi_levels}"
        )
    mode = basis.phi_mode
    if not (isinstance(mode, GridPeriodic) and math.isclose(mode.period, TWO_PI)):
        raise AssemblyError("junction-pair phi coordinate must be 2pi-periodic")
    if energies.ej_prime is None or energies.e_cchi is None:
        raise AssemblyError("three-mode assembly needs E'_J and E_cchi")
    f = _canonical_flux(f, mode)

    ej_prime = energies.ej_prime
    i_theta = _theta_identity(basis)
    i_chi = sp.identity(basis.dim_chi, format="csr")
    i_phi = sp.identity(mode.n_phi, format="csr")
    phi = mode.points()

    k_theta = _charge_kinetic(basis.theta_numbers(), energies.e_ctheta)
    k_phi = 4.0 * energies.e_cphi * _phi_laplacian(mode)
    cos_shift = sp.diags(np.cos(phi - math.pi * f)).tocsr()
    dim2 = basis.dim_theta * basis.dim_chi

    h = (
        sp.kron(i_phi, sp.kron(i_chi, k_theta))
        + sp.kron(k_phi, sp.kron(i_chi, i_theta))
        + 2.0 * energies.e_j * sp.identity(mode.n_phi * dim2)
        - 2.0 * energies.e_j * sp.kron(cos_shift, sp.kron(i_chi, _theta_cos(basis)))
        + 2.0 * ej_prime * sp.kron(
            sp.diags(1.0 - np.cos(phi)),
            sp.kron(chi_cos_matrix(basis.chi_levels), i_theta),
        )
        + sp.kron(i_phi, sp.kron(
            chi_mode_hamiltonian(ej_prime, energies.e_cchi, basis.chi_levels),
            i_theta,
        ))
    ).tocsr()
    return OperatorMatrix(matrix=h, basis=basis)


def parity_permutation(basis: BasisConfig) -> OperatorMatrix:
    """(theta, phi) -> (-theta, -phi) as a permutation matrix: charge index
    n -> -n and grid reversal (mod period for periodic grids, which map onto
    themselves exactly)."""
    d_theta = basis.dim_theta
    perm_theta = np.arange(d_theta)[::-1]
    mode = basis.phi_mode
    n = mode.n_phi
    if isinstance(mode, GridLine):
        perm_phi = np.arange(n)[::-1]
    else:
        perm_phi = (-np.arange(n)) % n
    if basis.chi_levels:
        dims = [n, basis.dim_chi, d_theta]
        perms = [perm_phi, np.arange(basis.dim_chi)[::-1], perm_theta]
    else:
        dims = [n, d_theta]
        perms = [perm_phi, perm_theta]

    idx = np.arange(basis.dimension)
    coords = np.unravel_index(idx, dims)
    mapped = np.ravel_multi_index([p[c] for p, c in zip(perms, coords)], dims)
    m = sp.csr_matrix(
        (np.ones(basis.dimension), (mapped, idx)),
        shape=(basis.dimension, basis.dimension),
    )
    return OperatorMatrix(matrix=m, basis=basis, hermitian=False)


def confinement_check(energies: DerivedEnergies, basis: BasisConfig,
                      largest_eigenvalue: float) -> list[str]:
    """Post-hoc wall-placement check for Line grids: the inductive wall
    E_L phi_max^2 must dominate the largest requested eigenvalue."""
    mode = basis.phi_mode
    if not isinstance(mode, GridLine):
        return []
    wall = energies.e_l * mode.phi_max**2
    if wall < 20.0 * max(largest_eigenvalue, 0.0):
        return [
            f"E_L*phi_max^2 = {wall:.3g} is below 20x the largest computed "
            f"eigenvalue {largest_eigenvalue:.3g}; enlarge phi_max or treat "
            "wall effects as physical"
        ]
    return []
