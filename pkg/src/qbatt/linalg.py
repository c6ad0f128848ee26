"""Dense complex linear algebra.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
Hermitian eigensolver is a cyclic Jacobi iteration; the kernel (null space)
routine is SVD based.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotHermitian

MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-13
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def kron(a, b):
    """Kronecker product; ``result[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors):
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_error(m):
    m = as_matrix(m)
    return float(np.max(np.abs(m - dagger(m)), initial=0.0))


def is_hermitian(m, rtol=HERMITIAN_TOL):
    m = as_matrix(m)
    scale = float(np.max(np.abs(m), initial=0.0))
    return hermiticity_error(m) <= rtol * max(scale, 1e-300)


def _offdiag_norm(a):
    off = a - np.diag(np.diag(a))
    return np.linalg.norm(off)


def hermitian_eigen(m, max_sweeps=MAX_SWEEPS, tol=OFFDIAG_TOL):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation annihilates one off-diagonal pair ``(p, q)``; sweeps run
    over all pairs in row order until the off-diagonal Frobenius norm falls
    below ``tol * ||m||_F``.  Raises :class:`NotHermitian` if the input is
    not Hermitian to ``1e-10 * max|m|`` and :class:`NoConvergence` after
    ``max_sweeps`` sweeps.
    """
    m = as_matrix(m)
    n, c = m.shape
    if n != c:
        raise NotHermitian(f"matrix is not square: {m.shape}")
    if not is_hermitian(m):
        raise NotHermitian(f"hermiticity error {hermiticity_error(m):.3e} exceeds tolerance")

    a = 0.5 * (m + dagger(m))
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    threshold = tol * norm

    for _ in range(max_sweeps + 1):
        if _offdiag_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = a[p, q]
                ab = abs(b)
                if ab <= 1e-300 or ab <= 1e-18 * threshold:
                    continue
                phase = b / ab
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * ab)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                cs = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * cs
                # G = [[c, s e^{i phi}], [-s e^{-i phi}, c]]; a <- G^H a G
                g = np.array([[cs, sn * phase], [-sn * np.conj(phase), cs]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return EigenResult(eigenvalues=w[order], eigenvectors=v[:, order])


def kernel(m, tol=1e-9):
    """Orthonormal basis of the numerical null space of a square matrix.

    Returns right singular vectors whose singular values are at most
    ``tol * sigma_max``, as a list of column vectors of shape ``(n, 1)``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"kernel requires a square matrix, got {m.shape}")
    n = m.shape[0]
    if not np.any(m):
        return [np.eye(n, dtype=complex)[:, [k]] for k in range(n)]
    _, s, vh = np.linalg.svd(m)
    cut = tol * s[0]
    return [vh[k].conj().reshape(n, 1) for k in range(n) if s[k] <= cut]
