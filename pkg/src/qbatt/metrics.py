"""Battery observables: stored energy, ergotropy, charging efficiency."""
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DimensionMismatch, NotDensityMatrix, ZeroStoredEnergy
from .linalg import hermitian_eigen
from .model import default_basis
from .operators import BasisKind, battery_number

DENSITY_TOL = 1e-8


@dataclass(frozen=True)
class BatteryMetrics:
    stored_energy: float
    ergotropy: float
    efficiency_R: float
    energy_density: float
    avg_ergotropy: float


def partial_trace_charger(rho, battery_dim=None):
    """Trace out the charger (first tensor factor, dimension 2)."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    db = battery_dim or d // 2
    if 2 * db != d:
        raise DimensionMismatch(f"cannot split dimension {d} as 2 x {db}")
    return np.einsum("iaib->ab", rho.reshape(2, db, 2, db))


def battery_hamiltonian(basis, omega0=1.0):
    """omega0 times the battery excitation number, on the battery factor of ``basis``."""
    return omega0 * battery_number(basis)


def ground_state(dim, basis_kind=BasisKind.TWO_QUBIT):
    """Battery ground state projector; |g> is the last index except in Dicke ordering."""
    rho = np.zeros((dim, dim), dtype=complex)
    k = 0 if BasisKind(basis_kind) is BasisKind.DICKE else dim - 1
    rho[k, k] = 1.0
    return rho


def stored_energy(rho_B, H_B, rho_B0=None):
    """Tr[H_B rho_B] - Tr[H_B rho_B0]; ``rho_B0=None`` means zero reference energy."""
    rho_B = np.asarray(rho_B)
    H_B = np.asarray(H_B)
    if rho_B.shape != H_B.shape:
        raise DimensionMismatch(f"rho_B {rho_B.shape} vs H_B {H_B.shape}")
    e = np.trace(H_B @ rho_B).real
    if rho_B0 is not None:
        rho_B0 = np.asarray(rho_B0)
        if rho_B0.shape != H_B.shape:
            raise DimensionMismatch(f"rho_B0 {rho_B0.shape} vs H_B {H_B.shape}")
        e -= np.trace(H_B @ rho_B0).real
    return float(e)


def _populations(rho):
    rho = np.asarray(rho, dtype=complex)
    tr = np.trace(rho).real
    if abs(tr - 1) > DENSITY_TOL:
        raise NotDensityMatrix(f"trace {tr!r} differs from 1")
    r = hermitian_eigen(0.5 * (rho + rho.conj().T)).eigenvalues
    if r[0] < -DENSITY_TOL:
        raise NotDensityMatrix(f"negative eigenvalue {r[0]:.3e}")
    # small negative eigenvalues are numerical noise
    r = np.clip(r, 0.0, None)
    return r / r.sum()


def passive_energy(rho, energies):
    """Energy of the passive state: descending populations on ascending energies.

    ``energies`` may list more levels than ``rho`` has; the missing
    populations are zero.
    """
    r = np.sort(_populations(rho))[::-1]
    e = np.sort(np.asarray(energies, dtype=float))
    if e.size < r.size:
        raise DimensionMismatch("fewer energy levels than density-matrix eigenvalues")
    return float(np.dot(r, e[: r.size]))


def full_battery_spectrum(n, omega0=1.0):
    """All 2**n battery energies k*omega0, each repeated C(n, k) times, ascending."""
    return np.repeat(np.arange(n + 1) * omega0, [comb(n, k) for k in range(n + 1)])


def ergotropy(rho_B, H_B, spectrum=None):
    """Tr[H_B rho_B] minus the passive-state energy.

    ``spectrum`` replaces the eigenvalues of ``H_B`` in the passive-state
    construction, e.g. the full 2**N spectrum for a Dicke-reduced ``rho_B``.
    """
    rho_B = np.asarray(rho_B, dtype=complex)
    H_B = np.asarray(H_B, dtype=complex)
    if rho_B.shape != H_B.shape:
        raise DimensionMismatch(f"rho_B {rho_B.shape} vs H_B {H_B.shape}")
    energy = np.trace(H_B @ rho_B).real
    if spectrum is None:
        spectrum = hermitian_eigen(H_B).eigenvalues
    return max(float(energy - passive_energy(rho_B, spectrum)), 0.0)


def efficiency(E, erg):
    """Charging efficiency R = ergotropy / stored energy."""
    if E <= 0:
        raise ZeroStoredEnergy(f"stored energy {E!r} is not positive")
    return erg / E


def qubit_ergotropy_closed(rho, omega0=1.0):
    """Two-qubit global-basis formula for the battery ergotropy (single cell)."""
    rho = np.asarray(rho)
    p = (rho[0, 0] + rho[2, 2]).real
    c = rho[0, 1] + rho[2, 3]
    x = 2 * p - 1
    return 0.5 * omega0 * (np.sqrt(4 * abs(c) ** 2 + x * x) + x)


def single_cell_metrics(rho, params, basis=None):
    """Metrics of a single-cell state in the two-qubit global basis."""
    return multiparticle_metrics(rho, params, basis)


def multiparticle_metrics(rho, params, basis=None, sector="full"):
    """Energy density, stored energy and ergotropy for charger + N battery qubits.

    ``sector="full"`` minimizes over all unitaries of the 2**N battery space
    (Dicke input is padded with zero populations); ``sector="symmetric"``
    restricts to the (N+1)-level Dicke spectrum.
    """
    basis = basis or default_basis(params)
    if basis.n != params.N:
        raise DimensionMismatch(f"basis has N = {basis.n}, params.N = {params.N}")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.dimension,) * 2:
        raise DimensionMismatch(f"rho {rho.shape} does not match basis dimension {basis.dimension}")
    w0 = params.omega0
    rho_B = partial_trace_charger(rho)
    H_B = battery_hamiltonian(basis, w0)
    E = stored_energy(rho_B, H_B)
    spectrum = None
    if basis.kind is BasisKind.DICKE and sector == "full":
        spectrum = full_battery_spectrum(basis.n, w0)
    elif basis.kind is BasisKind.DICKE:
        spectrum = np.arange(basis.n + 1) * w0
    erg = ergotropy(rho_B, H_B, spectrum)
    R = efficiency(E, erg) if E > 0 else 0.0
    n = basis.n
    return BatteryMetrics(
        stored_energy=E,
        ergotropy=erg,
        efficiency_R=R,
        energy_density=E / n,
        avg_ergotropy=erg / n,
    )
