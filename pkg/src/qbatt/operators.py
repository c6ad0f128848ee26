"""Qubit, site-embedded and collective (Dicke) spin operators.

Conventions: a single qubit is ordered (|e>, |g>), so sigma_plus = |e><g| is
``[[0, 1], [0, 0]]``.  Composite spaces put the charger first.  The Dicke
multiplet of ``n`` battery qubits is ordered by ascending ``m``, so index 0
is the all-ground state.
"""
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import comb, sqrt

import numpy as np

from .errors import SiteOutOfRange
from .linalg import kron_all


class BasisKind(str, Enum):
    TWO_QUBIT = "two_qubit"
    FULL = "full"
    DICKE = "dicke"


@dataclass(frozen=True)
class BasisSpec:
    """Hilbert-space layout for charger plus ``n`` battery qubits.

    * ``TWO_QUBIT``: |ee>, |eg>, |ge>, |gg> (n must be 1)
    * ``FULL``: charger tensor n battery qubits, dimension 2**(n+1)
    * ``DICKE``: charger tensor the symmetric spin-n/2 multiplet, dimension 2(n+1)
    """

    kind: BasisKind
    n: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", BasisKind(self.kind))
        if self.n < 1:
            raise ValueError("basis needs at least one battery qubit")
        if self.kind is BasisKind.TWO_QUBIT and self.n != 1:
            raise ValueError("the two-qubit global basis only describes n = 1")

    @property
    def dimension(self):
        if self.kind is BasisKind.DICKE:
            return 2 * (self.n + 1)
        return 2 ** (self.n + 1)

    @property
    def battery_dimension(self):
        return self.dimension // 2

    @classmethod
    def two_qubit(cls):
        return cls(BasisKind.TWO_QUBIT, 1)

    @classmethod
    def full(cls, n):
        return cls(BasisKind.FULL, n)

    @classmethod
    def dicke(cls, n):
        return cls(BasisKind.DICKE, n)


_QUBIT_OPS = {
    "sx": [[0, 1], [1, 0]],
    "sy": [[0, -1j], [1j, 0]],
    "sz": [[1, 0], [0, -1]],
    "sp": [[0, 1], [0, 0]],
    "sm": [[0, 0], [1, 0]],
    "id": [[1, 0], [0, 1]],
}


def qubit_op(name):
    """2x2 Pauli or ladder operator: one of sx, sy, sz, sp, sm, id."""
    try:
        return np.array(_QUBIT_OPS[name], dtype=complex)
    except KeyError:
        raise ValueError(f"unknown qubit operator {name!r}") from None


def embed(op, site, n):
    """Place a 2x2 ``op`` on ``site`` of the charger + ``n`` battery qubit space.

    Site 0 is the charger, sites 1..n the battery qubits.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError(f"embed expects a 2x2 operator, got {op.shape}")
    if not 0 <= site <= n:
        raise SiteOutOfRange(f"site {site} outside 0..{n}")
    eye = np.eye(2, dtype=complex)
    return kron_all(*[op if k == site else eye for k in range(n + 1)])


def collective_ops(n):
    """Collective spin operators on the (n+1)-dim Dicke multiplet j = n/2.

    Returns a dict with keys ``Sp``, ``Sm``, ``Sz``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    j = n / 2
    m = np.arange(n + 1) - j
    sp = np.zeros((n + 1, n + 1), dtype=complex)
    for k in range(n):
        sp[k + 1, k] = sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    return {"Sp": sp, "Sm": sp.conj().T.copy(), "Sz": np.diag(m).astype(complex)}


def battery_number(basis):
    """Excitation-number operator of the battery alone (battery-space sized)."""
    n = basis.n
    if basis.kind is BasisKind.DICKE:
        return np.diag(np.arange(n + 1)).astype(complex)
    proj = qubit_op("sp") @ qubit_op("sm")
    eye = np.eye(2, dtype=complex)
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for i in range(n):
        out += kron_all(*[proj if k == i else eye for k in range(n)])
    return out


def battery_lowering(basis):
    """Collective lowering operator sum_i sigma_i^- on the battery space."""
    n = basis.n
    if basis.kind is BasisKind.DICKE:
        return collective_ops(n)["Sm"]
    sm = qubit_op("sm")
    eye = np.eye(2, dtype=complex)
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for i in range(n):
        out += kron_all(*[sm if k == i else eye for k in range(n)])
    return out


def pairwise_exchange(n, basis):
    """sum_{i<j} (s_i^+ s_j^- + s_i^- s_j^+) on the battery space.

    On a Dicke basis this is S+S- - (Sz + n/2).
    """
    if basis.kind is BasisKind.DICKE:
        ops = collective_ops(n)
        return ops["Sp"] @ ops["Sm"] - ops["Sz"] - (n / 2) * np.eye(n + 1)
    sp, sm = qubit_op("sp"), qubit_op("sm")
    eye = np.eye(2, dtype=complex)
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    for i, j in combinations(range(n), 2):
        a = [eye] * n
        a[i], a[j] = sp, sm
        b = [eye] * n
        b[i], b[j] = sm, sp
        out += kron_all(*a) + kron_all(*b)
    return out


def symmetric_isometry(n):
    """Columns are the Dicke states |n/2, m>, m ascending, in the 2**n product basis.

    Each column is the normalized sum of computational states with
    k = m + n/2 excitations.  Used only for cross-checks.
    """
    dim = 2 ** n
    out = np.zeros((dim, n + 1), dtype=complex)
    for index in range(dim):
        # bit value 0 is |e>, so the excitation count is the number of zero bits
        k = n - bin(index).count("1")
        out[index, k] = 1.0
    for k in range(n + 1):
        out[:, k] /= sqrt(comb(n, k))
    return out
