"""Density matrices, POVMs, ensembles, and the distance measures on them.

Trace distance here is the unnormalized trace norm |rho - sigma|_1, so it
ranges over [0, 2] for unit-trace states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    PSD_TOL,
    as_complex_matrix,
    partial_trace,
    psd_sqrt,
    require_hermitian,
    tensor,
    trace_norm,
)

TRACE_TOL = 1e-10
POVM_SUM_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-10
STEER_DROP_TOL = 1e-12


def _check_state_matrix(mat: np.ndarray, lo: float, hi: float, what: str) -> np.ndarray:
    m = require_hermitian(mat)
    mn = float(np.linalg.eigvalsh(m).min())
    if mn < -PSD_TOL:
        raise ValueError(f"{what} is not PSD: min eigenvalue = {mn:.3e}")
    tr = float(np.real(np.trace(m)))
    if not (lo - TRACE_TOL <= tr <= hi + TRACE_TOL):
        raise ValueError(f"{what} has trace {tr!r}, expected within [{lo}, {hi}]")
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive semidefinite matrix."""

    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _check_state_matrix(self.mat, 1.0, 1.0, "state"))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.mat)))


@dataclass(frozen=True, eq=False)
class SubnormalizedState:
    """PSD matrix with trace in [0, 1]."""

    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _check_state_matrix(self.mat, 0.0, 1.0, "state"))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.mat)))


@dataclass(frozen=True, eq=False)
class Povm:
    """Tuple of PSD elements summing to the identity within POVM_SUM_TOL."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(as_complex_matrix(e) for e in self.elements)
        if not elems:
            raise ValueError("POVM needs at least one element")
        dim = elems[0].shape[0]
        checked = []
        for i, e in enumerate(elems):
            if e.shape[0] != dim:
                raise ValueError("POVM elements have mixed dimensions")
            h = require_hermitian(e)
            mn = float(np.linalg.eigvalsh(h).min())
            if mn < -PSD_TOL:
                raise ValueError(f"POVM element {i} is not PSD: min eigenvalue = {mn:.3e}")
            h.setflags(write=False)
            checked.append(h)
        total = sum(checked)
        defect = float(np.abs(total - np.eye(dim)).max())
        if defect > POVM_SUM_TOL:
            raise ValueError(f"POVM does not sum to identity: max deviation = {defect:.3e}")
        object.__setattr__(self, "elements", tuple(checked))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted list of states; weights form a probability vector.

    `labels` optionally names each member by the measurement outcome that
    produced it, so members stay identifiable after sorting or truncation.
    """

    weights: np.ndarray
    states: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.states):
            raise ValueError("weights and states disagree in length")
        if len(self.states) == 0:
            raise ValueError("ensemble needs at least one member")
        if float(w.min()) < -WEIGHT_SUM_TOL:
            raise ValueError(f"negative weight {float(w.min())!r}")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {float(w.sum())!r}, expected 1")
        dim = self.states[0].dim
        if any(s.dim != dim for s in self.states):
            raise ValueError("ensemble states have mixed dimensions")
        labels = tuple(self.labels) if self.labels else tuple(range(len(self.states)))
        if len(labels) != len(self.states):
            raise ValueError("labels and states disagree in length")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim


def pure_state(vec) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    n = float(np.linalg.norm(v))
    if n < 1e-12:
        raise ValueError("zero vector")
    v = v / n
    return DensityMatrix(np.outer(v, v.conj()))


def basis_state(i: int, dim: int) -> DensityMatrix:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return pure_state(v)


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def singlet() -> DensityMatrix:
    """Two-qubit singlet (|01> - |10>)/sqrt(2)."""
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0
    v[2] = -1.0
    return pure_state(v)


def xz_spin_povm(theta: float) -> Povm:
    """Projective qubit measurement along (sin theta, 0, cos theta).

    Outcome 0 is the + projector, outcome 1 the - projector; theta = 0 is the
    computational basis, theta = pi/2 the Hadamard basis.
    """
    n_sigma = np.array(
        [[np.cos(theta), np.sin(theta)], [np.sin(theta), -np.cos(theta)]], dtype=complex
    )
    eye = np.eye(2, dtype=complex)
    return Povm(((eye + n_sigma) / 2, (eye - n_sigma) / 2))


def trace_distance(rho: DensityMatrix | SubnormalizedState, sigma) -> float:
    """Trace norm of the difference, in [0, 2] for unit-trace inputs."""
    return trace_norm(rho.mat - sigma.mat)


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr sqrt(sqrt(rho) sigma sqrt(rho)) = |sqrt(rho) sqrt(sigma)|_1, in [0, 1].

    Computed as the sum of singular values of sqrt(rho) sqrt(sigma); one matrix
    square root per argument keeps the noise near 1e-14 where the nested form
    loses seven digits at tight instances.
    """
    product = psd_sqrt(rho.mat) @ psd_sqrt(sigma.mat)
    val = float(np.linalg.svd(product, compute_uv=False).sum())
    return min(max(val, 0.0), 1.0)


def helstrom_error(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Optimal error probability for equiprobable discrimination: 1/2 - |rho-sigma|/4."""
    return 0.5 - trace_distance(rho, sigma) / 4


def ensemble_average(ensemble: Ensemble) -> DensityMatrix:
    acc = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    for w, s in zip(ensemble.weights, ensemble.states):
        acc += w * s.mat
    return DensityMatrix(acc)


def steer(rho_ab: DensityMatrix, povm_b: Povm) -> Ensemble:
    """Ensemble steered on side A by measuring povm_b on side B.

    Member b has weight Tr((I (x) N_b) rho) and state Tr_B((I (x) N_b) rho)
    normalized. Outcomes with weight below STEER_DROP_TOL are dropped; the
    surviving outcome indices are recorded in `labels`.
    """
    dim_b = povm_b.dim
    dim_a, rem = divmod(rho_ab.dim, dim_b)
    if rem != 0 or dim_a < 1:
        raise ValueError(
            f"dimension mismatch: state is {rho_ab.dim}-dim, POVM side is {dim_b}-dim"
        )
    eye_a = np.eye(dim_a, dtype=complex)
    weights, states, labels = [], [], []
    for b, element in enumerate(povm_b.elements):
        reduced = partial_trace(tensor(eye_a, element) @ rho_ab.mat, dim_a, dim_b, keep="A")
        w = float(np.real(np.trace(reduced)))
        if w < STEER_DROP_TOL:
            continue
        weights.append(w)
        states.append(DensityMatrix(reduced / w))
        labels.append(b)
    if not states:
        raise ValueError("all steering outcomes fell below the drop tolerance")
    w = np.array(weights)
    return Ensemble(weights=w / w.sum(), states=tuple(states), labels=tuple(labels))


def truncate_ensemble(ensemble: Ensemble, min_weight: float) -> tuple[Ensemble, float]:
    """Drop members with weight <= min_weight, renormalize, report lost mass.

    Members are returned sorted by nonincreasing weight. Raises ValueError
    when nothing survives (min_weight at or above the largest weight).
    """
    if min_weight < 0:
        raise ValueError("min_weight must be nonnegative")
    order = np.argsort(-ensemble.weights, kind="stable")
    kept = [i for i in order if ensemble.weights[i] > min_weight]
    if not kept:
        raise ValueError(
            f"no weight exceeds {min_weight!r} (max is {float(ensemble.weights.max())!r})"
        )
    delta = float(sum(ensemble.weights[i] for i in order if ensemble.weights[i] <= min_weight))
    w = np.array([ensemble.weights[i] for i in kept]) / (1.0 - delta)
    truncated = Ensemble(
        weights=w / w.sum(),
        states=tuple(ensemble.states[i] for i in kept),
        labels=tuple(ensemble.labels[i] for i in kept),
    )
    return truncated, delta


def sample_density(dim: int, rank: int, seed) -> DensityMatrix:
    """Ginibre-induced random state: G G^dag normalized, G of shape (dim, rank)."""
    if not (1 <= rank <= dim):
        raise ValueError(f"rank must be in [1, {dim}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.real(np.trace(m)))


def sample_povm(dim: int, outcomes: int, seed) -> Povm:
    """Random POVM: Ginibre PSD pile S^(-1/2) A_r S^(-1/2) with S the sum."""
    if outcomes < 1:
        raise ValueError("need at least one outcome")
    rng = np.random.default_rng(seed)
    piles = []
    for _ in range(outcomes):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        piles.append(g @ g.conj().T)
    total = sum(piles)
    w, v = np.linalg.eigh(total)
    if float(w.min()) <= 0:
        raise ValueError("degenerate sample, POVM normalizer is singular")
    inv_root = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    return Povm(tuple(inv_root @ a @ inv_root for a in piles))
