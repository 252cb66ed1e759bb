"""Hermitian matrix helpers shared by the state and bound machinery.

All matrices are dense complex numpy arrays. Inputs that are supposed to be
Hermitian are rejected when max|A - A^dag| exceeds HERMITIAN_TOL, with the
deviation reported in the error message.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
SQRT_RESIDUAL_TOL = 1e-8


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a square complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermiticity_defect(a: np.ndarray) -> float:
    """Max-entry distance from A to its adjoint."""
    return float(np.abs(a - a.conj().T).max())


def require_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_complex_matrix(a)
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: max|A - A^dag| = {defect:.3e}")
    return (m + m.conj().T) / 2


@dataclass(frozen=True, eq=False)
class HermitianEigen:
    """Eigenvalues in ascending order and matching orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(a, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    """Full eigendecomposition of a Hermitian matrix.

    Raises ValueError when the input is not Hermitian within `tol`.
    """
    m = require_hermitian(a, tol)
    w, v = np.linalg.eigh(m)
    return HermitianEigen(eigenvalues=w, eigenvectors=v)


def trace_norm(a) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    m = require_hermitian(a)
    return float(np.abs(np.linalg.eigvalsh(m)).sum())


def psd_sqrt(a, tol: float = PSD_TOL) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in [-tol, 0) are clamped to zero; anything below -tol is
    rejected. The result B satisfies max|B @ B - A| <= SQRT_RESIDUAL_TOL.
    """
    dec = eig_hermitian(a)
    lo = float(dec.eigenvalues.min())
    if lo < -tol:
        raise ValueError(f"matrix is not PSD: min eigenvalue = {lo:.3e}")
    w = np.sqrt(np.clip(dec.eigenvalues, 0.0, None))
    v = dec.eigenvectors
    root = (v * w) @ v.conj().T
    return (root + root.conj().T) / 2


def tensor(a, b) -> np.ndarray:
    """Kronecker product."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def partial_trace(m, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Trace out one tensor factor of a (dim_a*dim_b)-dimensional operator.

    keep="A" returns Tr_B(m); keep="B" returns Tr_A(m).
    """
    mat = as_complex_matrix(m)
    if mat.shape[0] != dim_a * dim_b:
        raise ValueError(
            f"dimension mismatch: matrix is {mat.shape[0]}-dim, factors give {dim_a * dim_b}"
        )
    t = mat.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f'keep must be "A" or "B", got {keep!r}')


def max_commutator_entry(a: np.ndarray, b: np.ndarray) -> float:
    """Max-entry magnitude of [A, B]."""
    return float(np.abs(a @ b - b @ a).max())
