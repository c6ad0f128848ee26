"""Physical parameters and the feedback master equation.

The generator is

    drho/dt = -i[H, rho] + i f [sy_C, sm_C rho + rho sp_C]
              + f^2/(eta GammaC) D[sy_C] rho + GammaC D[sm_C] rho
              + gamma_down D[L_B] rho + gamma_up D[L_B^dag] rho

with H = g (sp_C L_B + sm_C L_B^dag) + J * (pairwise battery exchange) and
L_B = sum_i sm_i the collective battery lowering operator.  Everything is
written in the interaction picture, so there are no free-energy terms.

Density matrices are vectorized column-major (``order="F"``):
vec(A rho B) = (B^T kron A) vec(rho).
"""
from dataclasses import dataclass, field, replace
from enum import Enum
import math

import numpy as np

from .errors import DimensionGuard, DimensionMismatch
from .linalg import dagger, kron_all
from .operators import (
    BasisKind,
    BasisSpec,
    battery_lowering,
    battery_number,
    pairwise_exchange,
    qubit_op,
)

# Sign of the feedback commutator term.  With +1 the generator reproduces the
# closed-form steady states and delta = 1, GammaB = 0 charges the battery fully.
FEEDBACK_SIGN = 1.0

FULL_PRODUCT_MAX_N = 6


class ReservoirKind(str, Enum):
    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"


def occupation(kind, T):
    """Mean thermal occupation: 1/(e^{1/T} - 1) bosonic, 1/(e^{1/T} + 1) fermionic."""
    kind = ReservoirKind(kind)
    if T < 0:
        raise ValueError("temperature must be >= 0")
    if T == 0:
        return 0.0
    x = 1.0 / T
    if x > 700:
        # exp(-x) underflows for both statistics
        return 0.0
    if kind is ReservoirKind.BOSONIC:
        return 1.0 / math.expm1(x)
    return 1.0 / (math.exp(x) + 1.0)


@dataclass(frozen=True)
class SystemParams:
    """Model parameters.  All rates and couplings are in units of ``omega0``.

    ``delta`` is the feedback ratio f / gammaC.  Temperature is given either
    as ``T`` (dimensionless) or directly as the occupation ``n``; ``n`` wins
    when both are set.  ``g_sites`` optionally gives per-qubit charger
    couplings (full product basis only).
    """

    omega0: float = 1.0
    g: float = 0.01
    J: float = 0.0
    gammaC: float = 0.02
    gammaB: float = 0.001
    delta: float = 1.0
    eta: float = 1.0
    reservoir: ReservoirKind = ReservoirKind.BOSONIC
    T: float = 0.0
    n: float | None = None
    N: int = 1
    g_sites: tuple | None = field(default=None, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "reservoir", ReservoirKind(self.reservoir))
        for name in ("g", "gammaC", "gammaB", "omega0"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.T is not None and self.T < 0:
            raise ValueError("T must be >= 0")
        if self.n is not None:
            if self.n < 0:
                raise ValueError("n must be >= 0")
            if self.reservoir is ReservoirKind.FERMIONIC and self.n >= 0.5:
                raise ValueError("fermionic occupation must be < 1/2 (positive temperature)")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.g_sites is not None:
            object.__setattr__(self, "g_sites", tuple(float(x) for x in self.g_sites))
            if len(self.g_sites) != self.N:
                raise ValueError("g_sites needs one coupling per battery qubit")

    @property
    def f(self):
        return self.delta * self.gammaC

    @property
    def occupation(self):
        if self.n is not None:
            return float(self.n)
        return occupation(self.reservoir, self.T or 0.0)

    @property
    def gamma_down(self):
        nb = self.occupation
        if self.reservoir is ReservoirKind.BOSONIC:
            return self.gammaB * (1.0 + nb)
        return self.gammaB * (1.0 - nb)

    @property
    def gamma_up(self):
        return self.gammaB * self.occupation

    def replace(self, **changes):
        return replace(self, **changes)


def default_basis(params):
    if params.N == 1:
        return BasisSpec.two_qubit()
    return BasisSpec.dicke(params.N)


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, d=None):
    v = np.asarray(v)
    if d is None:
        d = math.isqrt(v.size)
    return v.reshape((d, d), order="F")


def _check_basis(params, basis):
    if basis.n != params.N:
        raise DimensionMismatch(f"basis describes {basis.n} battery qubits, params.N = {params.N}")
    if basis.kind is BasisKind.FULL and basis.n > FULL_PRODUCT_MAX_N:
        raise DimensionGuard(f"full product basis limited to N <= {FULL_PRODUCT_MAX_N}")


def model_operators(params, basis=None):
    """Operators of the composite space: Hamiltonian, charger ladder/sy, battery jumps."""
    basis = basis or default_basis(params)
    _check_basis(params, basis)
    db = basis.battery_dimension
    ib = np.eye(db, dtype=complex)
    i2 = np.eye(2, dtype=complex)
    sp, sm, sy = qubit_op("sp"), qubit_op("sm"), qubit_op("sy")

    lb = battery_lowering(basis)
    if params.g_sites is not None:
        if basis.kind is BasisKind.DICKE:
            raise ValueError("per-site couplings require the full product basis")
        weighted = np.zeros_like(lb)
        for i, gi in enumerate(params.g_sites):
            weighted += gi * kron_all(*[sm if k == i else i2 for k in range(basis.n)])
        coupling = np.kron(sp, weighted)
        h = coupling + dagger(coupling)
    else:
        coupling = np.kron(sp, lb)
        h = params.g * (coupling + dagger(coupling))
    if params.J != 0 and basis.n > 1:
        h = h + params.J * np.kron(i2, pairwise_exchange(basis.n, basis))

    return {
        "H": h,
        "sm_C": np.kron(sm, ib),
        "sp_C": np.kron(sp, ib),
        "sy_C": np.kron(sy, ib),
        "L_B": np.kron(i2, lb),
        "N_B": np.kron(i2, battery_number(basis)),
        "basis": basis,
    }


def _dissipator(c, rho):
    cd = dagger(c)
    cdc = cd @ c
    return c @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc)


def _noise_rate(params):
    if params.f == 0:
        return 0.0
    return params.f ** 2 / (params.eta * params.gammaC)


def lindblad_rhs(params, rho, basis=None):
    """drho/dt evaluated term by term (no superoperator)."""
    basis = basis or default_basis(params)
    ops = model_operators(params, basis)
    rho = np.asarray(rho, dtype=complex)
    d = basis.dimension
    if rho.shape != (d, d):
        raise DimensionMismatch(f"rho has shape {rho.shape}, basis needs {(d, d)}")

    h, sm, sp, sy = ops["H"], ops["sm_C"], ops["sp_C"], ops["sy_C"]
    out = -1j * (h @ rho - rho @ h)
    x = sm @ rho + rho @ sp
    out += FEEDBACK_SIGN * 1j * params.f * (sy @ x - x @ sy)
    out += _noise_rate(params) * _dissipator(sy, rho)
    out += params.gammaC * _dissipator(sm, rho)
    out += params.gamma_down * _dissipator(ops["L_B"], rho)
    out += params.gamma_up * _dissipator(dagger(ops["L_B"]), rho)
    return out


@dataclass(frozen=True)
class Liouvillian:
    """Superoperator acting on column-major vec(rho)."""

    matrix: np.ndarray
    basis: BasisSpec
    params: SystemParams

    @property
    def d(self):
        return self.basis.dimension

    def apply(self, rho):
        return unvec(self.matrix @ vec(rho), self.d)


def _spre(a):
    return np.kron(np.eye(a.shape[0]), a)


def _spost(b):
    return np.kron(b.T, np.eye(b.shape[0]))


def _sprepost(a, b):
    return np.kron(b.T, a)


def _dissipator_super(c):
    cd = dagger(c)
    cdc = cd @ c
    return _sprepost(c, cd) - 0.5 * (_spre(cdc) + _spost(cdc))


def build_liouvillian(params, basis=None):
    """Liouvillian matrix (d^2 x d^2) of the feedback master equation."""
    basis = basis or default_basis(params)
    ops = model_operators(params, basis)
    h, sm, sp, sy = ops["H"], ops["sm_C"], ops["sp_C"], ops["sy_C"]

    L = -1j * (_spre(h) - _spost(h))
    # [sy, sm rho + rho sp] = sy sm rho + sy rho sp - sm rho sy - rho sp sy
    fb = _spre(sy @ sm) + _sprepost(sy, sp) - _sprepost(sm, sy) - _spost(sp @ sy)
    L = L + FEEDBACK_SIGN * 1j * params.f * fb
    L = L + _noise_rate(params) * _dissipator_super(sy)
    L = L + params.gammaC * _dissipator_super(sm)
    if params.gammaB:
        lb = ops["L_B"]
        L = L + params.gamma_down * _dissipator_super(lb)
        L = L + params.gamma_up * _dissipator_super(dagger(lb))
    L.setflags(write=False)
    return Liouvillian(matrix=L, basis=basis, params=params)
