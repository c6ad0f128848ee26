"""Steady states: numerical Liouvillian kernel and closed-form expressions.

Closed forms cover the single-cell battery (N = 1) in the two-qubit global
basis |ee>, |eg>, |ge>, |gg>.  Rates may be given in any common unit; the
closed forms are homogeneous of degree zero in (g, gammaC, gammaB).
"""
from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .errors import (
    DegenerateSteadyState,
    DomainError,
    NoSteadyState,
    UnsupportedN,
)
from .linalg import kernel
from .model import ReservoirKind, SystemParams, build_liouvillian, default_basis, unvec, vec
from .operators import BasisSpec

KERNEL_TOL = 1e-9


class SteadyMethod(str, Enum):
    NUMERIC_KERNEL = "numeric_kernel"
    NUMERIC_EVOLUTION = "numeric_evolution"
    ANALYTIC_BOSON = "analytic_boson"
    ANALYTIC_FERMION = "analytic_fermion"


@dataclass(frozen=True)
class SteadyReport:
    rho_inf: np.ndarray
    method: SteadyMethod
    residual: float
    params: SystemParams
    basis: BasisSpec | None = None


@dataclass(frozen=True)
class ClosedFormAux:
    S: float
    Qb: float
    Wb: float
    Qf: float
    Wf: float
    beta_b: float
    beta_f: float


def _normalize(v, d):
    rho = unvec(v, d)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def steady_numeric(liouvillian, tol=KERNEL_TOL):
    """Unique steady state from the one-dimensional kernel of the Liouvillian."""
    L = liouvillian.matrix
    vecs = kernel(L, tol)
    if not vecs:
        raise NoSteadyState("Liouvillian kernel is empty")
    if len(vecs) > 1:
        raise DegenerateSteadyState(f"kernel dimension {len(vecs)}")
    rho = _normalize(vecs[0][:, 0], liouvillian.d)
    residual = float(np.linalg.norm(L @ vec(rho)))
    return SteadyReport(rho, SteadyMethod.NUMERIC_KERNEL, residual, liouvillian.params, liouvillian.basis)


def steady_from(liouvillian, rho0, tol=KERNEL_TOL):
    """Long-time limit of exp(L t) rho0, valid also when the kernel is degenerate.

    Projects vec(rho0) onto the kernel along the conserved quantities (left
    kernel vectors).  Needed for the full product basis, where every total
    spin sector carries its own steady state.
    """
    L = liouvillian.matrix
    right = kernel(L, tol)
    left = kernel(L.conj().T, tol)
    if not right:
        raise NoSteadyState("Liouvillian kernel is empty")
    if len(left) != len(right):
        raise NoSteadyState("left and right kernels differ in dimension")
    R = np.hstack(right)
    Lh = np.hstack(left).conj().T
    coeffs = np.linalg.solve(Lh @ R, Lh @ vec(rho0))
    rho = _normalize(R @ coeffs, liouvillian.d)
    residual = float(np.linalg.norm(L @ vec(rho)))
    return SteadyReport(rho, SteadyMethod.NUMERIC_KERNEL, residual, liouvillian.params, liouvillian.basis)


def solve_steady(params, basis=None):
    """Convenience: build the Liouvillian and take its kernel."""
    return steady_numeric(build_liouvillian(params, basis or default_basis(params)))


def closed_form_aux(params):
    g, gc, gb = params.g, params.gammaC, params.gammaB
    d, eta, n = params.delta, params.eta, params.occupation
    S = 2 * d * (d - eta) + eta
    Qb = gc * d * d + n * gb * eta
    Wb = gc * gb * (gc + gb + 2 * n * gb) * (4 * Qb + (gc + gb - 4 * gc * d - 2 * n * gb) * eta)
    Qf = gc * d * d + n * gb * eta
    Wf = gc * gb * (gc + gb) * (gb * eta + gc * (2 * S - eta))
    beta_b = -4 * g * g + 4 * g * gb + (1 + 2 * n) * gb * gb
    beta_f = 4 * g * g + 4 * g * (-1 + 2 * n) * gb + (-1 + 2 * n) * gb * gb
    return ClosedFormAux(S, Qb, Wb, Qf, Wf, beta_b, beta_f)


def _require_single(params):
    if params.N != 1:
        raise UnsupportedN("closed forms exist only for N = 1")


def _bosonic_matrix(p, aux):
    g, gc, gb, d, eta, n = p.g, p.gammaC, p.gammaB, p.delta, p.eta, p.occupation
    S, Q, W = aux.S, aux.Qb, aux.Wb
    K = 2 * Q + (gc + gb - 2 * gc * d) * eta
    sd = S - d * d
    den = (1 + 2 * n) * W * S + 4 * g * g * K * K
    r = np.zeros((4, 4), dtype=complex)
    r[0, 0] = 4 * g * g * Q * Q + n * d * d * W
    r[1, 1] = 4 * g * g * Q * gc * sd + (1 + n) * (d * d * W + 4 * g * g * Q * gb * eta)
    r[2, 2] = 4 * g * g * Q * ((1 + n) * gb * eta + gc * sd) + n * W * sd
    # squared bracket: the printed numerator is dimensionally inconsistent
    r[3, 3] = (1 + n) * W * sd + 4 * g * g * (gc * sd + (1 + n) * gb * eta) ** 2
    lam = d * d + n * (2 * d - 1) * eta
    r[0, 3] = 4j * g * d * (d - eta) * gc * gc * gb * lam
    r[1, 2] = 2j * g * gc * gb * lam * (2 * Q + (gc * (1 - 2 * d) + gb) * eta)
    r[3, 0] = np.conj(r[0, 3])
    r[2, 1] = np.conj(r[1, 2])
    return r / den


def _fermionic_matrix(p, aux):
    g, gc, gb, d, eta, n = p.g, p.gammaC, p.gammaB, p.delta, p.eta, p.occupation
    S, Q, W = aux.S, aux.Qf, aux.Wf
    K = gb * eta + gc * S
    sd = S - d * d
    den = 4 * g * g * K * K + W * S
    r = np.zeros((4, 4), dtype=complex)
    r[0, 0] = 4 * g * g * Q * Q + n * d * d * W
    r[1, 1] = (1 - n) * d * d * W + 4 * g * g * Q * ((1 - n) * gb * eta + gc * sd)
    r[2, 2] = n * sd * W + 4 * g * g * Q * ((1 - n) * gb * eta + gc * sd)
    r[3, 3] = (1 - n) * sd * W + 4 * g * g * ((n - 1) * gb * eta - gc * sd) ** 2
    lam = (2 * n - 1) * d * d + n * eta - 2 * n * d * eta
    r[0, 3] = -4j * g * gc * gc * d * gb * (d - eta) * lam
    r[1, 2] = -2j * g * gc * gb * ((2 * n - 1) * d * d + n * eta * (1 - 2 * d)) * K
    r[3, 0] = np.conj(r[0, 3])
    r[2, 1] = np.conj(r[1, 2])
    return r / den


def steady_analytic(params):
    """Closed-form steady state of the single-cell model.

    Only the four populations and the rho14 / rho23 coherences (with their
    conjugates) are nonzero.
    """
    _require_single(params)
    aux = closed_form_aux(params)
    if params.reservoir is ReservoirKind.BOSONIC:
        rho, method = _bosonic_matrix(params, aux), SteadyMethod.ANALYTIC_BOSON
    else:
        rho, method = _fermionic_matrix(params, aux), SteadyMethod.ANALYTIC_FERMION
    L = build_liouvillian(params, BasisSpec.two_qubit())
    residual = float(np.linalg.norm(L.matrix @ vec(rho)))
    return SteadyReport(rho, method, residual, params, BasisSpec.two_qubit())


def stored_energy_closed(params):
    """Steady-state stored energy E_B(inf) from the published closed forms."""
    _require_single(params)
    aux = closed_form_aux(params)
    g, gc, gb, d, eta, n = params.g, params.gammaC, params.gammaB, params.delta, params.eta, params.occupation
    S = aux.S
    if params.reservoir is ReservoirKind.BOSONIC:
        Q, W = aux.Qb, aux.Wb
        K = 2 * Q + gc * (1 - 2 * d) * eta + gb * eta
        num = n * W * S + 4 * g * g * Q * K
        den = (1 + 2 * n) * W * S + 4 * g * g * K * K
    else:
        Q, W = aux.Qf, aux.Wf
        K = gb * eta + gc * S
        num = 4 * g * g * Q * K + n * W * S
        den = 4 * g * g * K * K + W * S
    return params.omega0 * num / den


def stored_energy_optimal(kind, g, gammaB, n, omega0=1.0):
    """Stored energy at gammaC = 2g, delta = 1, eta = 1."""
    kind = ReservoirKind(kind)
    if kind is ReservoirKind.BOSONIC:
        num = 4 * g * g + 4 * g * n * gammaB + n * (1 + 2 * n) * gammaB ** 2
        return omega0 * num / (2 * g + gammaB + 2 * n * gammaB) ** 2
    return omega0 * (4 * g * g + n * (gammaB ** 2 + 4 * g * gammaB)) / (2 * g + gammaB) ** 2


def ergotropy_closed(params, optimal=True):
    """Steady-state ergotropy.

    With ``optimal=True`` the charger is pinned to gammaC = 2g, delta = 1 and
    the published closed forms are used (exact zero past the critical
    dissipation).  With ``optimal=False`` no closed form exists and the
    value is computed from the numerical steady state.
    """
    _require_single(params)
    if not optimal:
        from .metrics import single_cell_metrics

        return single_cell_metrics(solve_steady(params).rho_inf, params).ergotropy

    g, gb, n, w0 = params.g, params.gammaB, params.occupation, params.omega0
    if params.reservoir is ReservoirKind.BOSONIC:
        beta = -4 * g * g + 4 * g * gb + (1 + 2 * n) * gb * gb
        if beta >= 0:
            return 0.0
        return w0 * (4 * g * g - 4 * g * gb - (1 + 2 * n) * gb * gb) / (2 * g + gb + 2 * n * gb) ** 2
    beta = 4 * g * g + 4 * g * (-1 + 2 * n) * gb + (-1 + 2 * n) * gb * gb
    if beta <= 0:
        return 0.0
    return w0 * beta / (2 * g + gb) ** 2


def critical_gammaB(kind, n):
    """Battery dissipation rate (in units of g) above which the optimal-point ergotropy vanishes."""
    kind = ReservoirKind(kind)
    if n < 0:
        raise DomainError("occupation must be >= 0")
    if kind is ReservoirKind.BOSONIC:
        return 2 * (-1 + math.sqrt(2) * math.sqrt(1 + n)) / (1 + 2 * n)
    if n >= 0.5:
        raise DomainError("fermionic occupation must be < 1/2")
    return 2 / (1 - 2 * n + math.sqrt(4 * n * n - 6 * n + 2))


def reference_scheme(F, gammaC, g, n_f, omega0=1.0):
    """Driven, dissipative-charger reference scheme with an isolated battery.

    Returns ``{"E_B": ..., "ergotropy": ...}`` in units of ``omega0`` for a
    fermionic charger reservoir with occupation ``n_f``.
    """
    if F <= 0 or gammaC <= 0 or g <= 0:
        raise DomainError("F, gammaC and g must be positive")
    if not 0 <= n_f < 0.5:
        raise DomainError("n_f must lie in [0, 1/2)")
    a = 1 - 2 * n_f
    A = F ** 2 * g ** 2 * (1 - 8 * (n_f - 1) * n_f) + F ** 4 * a ** 2 + 4 * g ** 4 * n_f
    B = F ** 2 * a ** 2 + 4 * g ** 2 * n_f
    G2, G4 = gammaC ** 2, gammaC ** 4
    top = 4 * F ** 4 * g ** 2 + 2 * A * G2 + B * G4
    half_den = 4 * F ** 4 * g ** 2 + 2 * (A + 2 * g ** 4 * a) * G2 + (B + 2 * g ** 2 * a) * G4
    energy = omega0 * top / (2 * half_den)
    coherence = g ** 2 * (B + g ** 2 * (1 - 4 * n_f)) * a ** 2 * G4 * (2 * g ** 2 + G2) ** 2 / half_den ** 2
    erg = 0.5 * omega0 * (-1 + 2 * math.sqrt(coherence) + top / half_den)
    return {"E_B": energy, "ergotropy": max(erg, 0.0)}
