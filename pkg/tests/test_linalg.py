"""Hermitian matrix helpers: eigendecomposition, trace norm, PSD square root,
tensor products and partial traces."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonlocality.linalg import (
    as_complex_matrix,
    eig_hermitian,
    hermiticity_defect,
    max_commutator_entry,
    partial_trace,
    psd_sqrt,
    require_hermitian,
    tensor,
    trace_norm,
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def random_psd(dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return g @ g.conj().T


def test_as_complex_matrix_rejects_nonsquare():
    with pytest.raises(ValueError, match="square"):
        as_complex_matrix(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="square"):
        as_complex_matrix(np.zeros(4))


def test_hermiticity_defect_oracle():
    assert hermiticity_defect(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(1.0)
    assert hermiticity_defect(PAULI_X) == 0.0


def test_require_hermitian_symmetrizes_small_noise():
    a = PAULI_Z + 1e-12 * np.array([[0, 1j], [0, 0]])
    out = require_hermitian(a)
    assert hermiticity_defect(out) == 0.0
    assert np.abs(out - PAULI_Z).max() < 1e-11


def test_require_hermitian_rejects():
    with pytest.raises(ValueError, match="not Hermitian"):
        require_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_hermitian_ascending_and_reconstructs():
    a = random_hermitian(5, 11)
    dec = eig_hermitian(a)
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    assert np.abs(dec.reconstruct() - a).max() < 1e-10
    # eigenvectors orthonormal
    v = dec.eigenvectors
    assert np.abs(v.conj().T @ v - np.eye(5)).max() < 1e-10


@given(st.integers(0, 10_000), st.integers(1, 6))
def test_eig_hermitian_property(seed, dim):
    a = random_hermitian(dim, seed)
    dec = eig_hermitian(a)
    assert np.abs(dec.reconstruct() - a).max() < 1e-10


def test_trace_norm_oracles():
    assert trace_norm(np.diag([3.0, -4.0])) == pytest.approx(7.0)
    assert trace_norm(PAULI_X) == pytest.approx(2.0)
    assert trace_norm(np.zeros((3, 3))) == 0.0


@given(st.integers(0, 10_000), st.integers(1, 5))
def test_trace_norm_is_sum_of_abs_eigenvalues(seed, dim):
    a = random_hermitian(dim, seed)
    assert trace_norm(a) == pytest.approx(np.abs(np.linalg.eigvalsh(a)).sum(), abs=1e-10)


def test_psd_sqrt_diagonal_oracle():
    root = psd_sqrt(np.diag([4.0, 9.0]))
    assert np.abs(root - np.diag([2.0, 3.0])).max() < 1e-12


def test_psd_sqrt_clamps_but_rejects_negative():
    ok = psd_sqrt(np.diag([1.0, -1e-12]))
    assert np.abs(ok @ ok - np.diag([1.0, 0.0])).max() < 1e-10
    with pytest.raises(ValueError, match="not PSD"):
        psd_sqrt(np.diag([1.0, -1e-6]))


@given(st.integers(0, 10_000), st.integers(1, 5))
def test_psd_sqrt_squares_back(seed, dim):
    a = random_psd(dim, seed)
    root = psd_sqrt(a)
    assert np.abs(root @ root - a).max() < 1e-8
    assert hermiticity_defect(root) == 0.0


def test_tensor_oracle():
    out = tensor(PAULI_X, np.eye(2))
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 2] = expected[1, 3] = expected[2, 0] = expected[3, 1] = 1.0
    assert np.abs(out - expected).max() == 0.0


def test_partial_trace_product_states():
    a = random_hermitian(2, 3)
    b = random_hermitian(3, 4)
    ab = tensor(a, b)
    assert np.abs(partial_trace(ab, 2, 3, keep="A") - a * np.trace(b)).max() < 1e-12
    assert np.abs(partial_trace(ab, 2, 3, keep="B") - b * np.trace(a)).max() < 1e-12


def test_partial_trace_entangled_oracle():
    v = np.zeros(4, dtype=complex)
    v[1], v[2] = 1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)
    rho = np.outer(v, v.conj())
    for keep in ("A", "B"):
        assert np.abs(partial_trace(rho, 2, 2, keep=keep) - np.eye(2) / 2).max() < 1e-12


def test_partial_trace_validation():
    with pytest.raises(ValueError, match="dimension mismatch"):
        partial_trace(np.eye(4), 2, 3, keep="A")
    with pytest.raises(ValueError, match="keep"):
        partial_trace(np.eye(6), 2, 3, keep="C")


def test_max_commutator_entry_oracles():
    assert max_commutator_entry(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])) == 0.0
    assert max_commutator_entry(PAULI_X, PAULI_Z) == pytest.approx(2.0)
