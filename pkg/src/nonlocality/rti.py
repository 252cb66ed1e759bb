"""Reverse triangle inequality for trace distance on state ensembles.

If every member of an ensemble sits at trace distance at least 2 - eps from a
reference state sigma, the ensemble average obeys

    |sum_i p_i rho_i - sigma|  >=  2 - 2 sqrt(l * eps)        (general)
    |sum_i p_i rho_i - sigma|  >=  2 - l * eps                (commuting)

with l the number of members. The commuting form is sharp for classical
(diagonal) families, and the sqrt dependence is unavoidable in general: a
two-state qubit family below brings the mixture gap down to ~sqrt(2 eps).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import max_commutator_entry, psd_sqrt, trace_norm
from .states import (
    DensityMatrix,
    SubnormalizedState,
    fidelity,
    sample_density,
    trace_distance,
)

CERTIFICATE_TOL = 1e-9
COMMUTE_TOL = 1e-9
PASS_SLACK = 1e-8


def rti_general_bound(l: int, eps: float) -> float:
    """Lower bound 2 - 2 sqrt(l * eps) on the mixture-to-reference distance."""
    if l < 1:
        raise ValueError("need at least one ensemble member")
    if not (0.0 <= eps <= 2.0):
        raise ValueError(f"eps must lie in [0, 2], got {eps!r}")
    return 2.0 - 2.0 * np.sqrt(l * eps)


def rti_commuting_bound(l: int, eps: float) -> float:
    """Lower bound 2 - l * eps valid when all states commute pairwise."""
    if l < 1:
        raise ValueError("need at least one ensemble member")
    if not (0.0 <= eps <= 2.0):
        raise ValueError(f"eps must lie in [0, 2], got {eps!r}")
    return 2.0 - l * eps


@dataclass(frozen=True, eq=False)
class RtiInstance:
    """Reference state, ensemble, and a certificate eps.

    The certificate asserts |rho_i - sigma| >= 2 - epsilon for every member;
    construction rejects certificates violated by more than CERTIFICATE_TOL.
    """

    sigma: DensityMatrix
    rhos: tuple
    weights: np.ndarray
    epsilon: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        rhos = tuple(self.rhos)
        if len(rhos) < 1 or len(w) != len(rhos):
            raise ValueError("weights and states disagree in length")
        if float(w.min()) < -1e-12 or abs(float(w.sum()) - 1.0) > 1e-10:
            raise ValueError("weights must form a probability vector")
        if any(r.dim != self.sigma.dim for r in rhos):
            raise ValueError("dimension mismatch between ensemble and reference")
        if not (0.0 <= self.epsilon <= 2.0 + 1e-12):
            raise ValueError(f"epsilon must lie in [0, 2], got {self.epsilon!r}")
        tight = self.tight_epsilon_of(rhos, self.sigma)
        if self.epsilon < tight - CERTIFICATE_TOL:
            raise ValueError(
                f"invalid certificate: epsilon {self.epsilon!r} below tight value {tight!r}"
            )
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rhos", rhos)

    @staticmethod
    def tight_epsilon_of(rhos, sigma) -> float:
        return 2.0 - min(trace_distance(r, sigma) for r in rhos)

    @property
    def l(self) -> int:
        return len(self.rhos)

    def mixture(self) -> np.ndarray:
        acc = np.zeros((self.sigma.dim, self.sigma.dim), dtype=complex)
        for w, r in zip(self.weights, self.rhos):
            acc += w * r.mat
        return acc


@dataclass(frozen=True)
class RtiReport:
    lhs: float
    bound: float
    epsilon: float
    epsilon_stored: float
    l: int
    commuting: bool
    passed: bool
    slack: float

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "bound": self.bound,
            "epsilon": self.epsilon,
            "epsilon_stored": self.epsilon_stored,
            "l": self.l,
            "commuting": self.commuting,
            "pass": self.passed,
            "slack": self.slack,
        }


def verify_rti(instance: RtiInstance, commuting: bool = False) -> RtiReport:
    """Check the mixture distance against the applicable lower bound.

    Uses the tight certificate (2 minus the smallest member distance) when the
    stored one disagrees by more than CERTIFICATE_TOL; both are reported. With
    `commuting` set, all pairwise commutators must vanish within COMMUTE_TOL.
    """
    if commuting:
        mats = [r.mat for r in instance.rhos] + [instance.sigma.mat]
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                dev = max_commutator_entry(mats[i], mats[j])
                if dev > COMMUTE_TOL:
                    raise ValueError(f"states do not commute: max commutator entry {dev:.3e}")
    tight = RtiInstance.tight_epsilon_of(instance.rhos, instance.sigma)
    eps = instance.epsilon if abs(tight - instance.epsilon) <= CERTIFICATE_TOL else tight
    eps = min(max(eps, 0.0), 2.0)
    lhs = trace_norm(instance.mixture() - instance.sigma.mat)
    bound = rti_commuting_bound(instance.l, eps) if commuting else rti_general_bound(instance.l, eps)
    slack = lhs - bound
    return RtiReport(
        lhs=lhs,
        bound=bound,
        epsilon=eps,
        epsilon_stored=instance.epsilon,
        l=instance.l,
        commuting=commuting,
        passed=bool(slack >= -PASS_SLACK),
        slack=slack,
    )


def subnormalized_gap(a: SubnormalizedState, b: SubnormalizedState) -> float:
    """Tr a + Tr b - |a - b|, the subnormalized analogue of 2 - distance."""
    return a.trace() + b.trace() - trace_norm(a.mat - b.mat)


def extremal_family(r: float):
    """Qubit family showing the sqrt in the general bound cannot be improved.

    Returns (rho_1, rho_2, sigma) with sigma = diag(0, r) and rho_{1,2} the
    rank-one states [[1-r, +/-s], [+/-s, r]], s = sqrt(r(1-r)). Each member
    has gap 1 + r - sqrt(1 + 2r - 3r^2) =: eps to sigma while the uniform
    mixture has gap exactly 2r, and (2r)^2 >= 2 eps on all of [0, 1].
    """
    if not (0.0 <= r <= 1.0):
        raise ValueError(f"r must lie in [0, 1], got {r!r}")
    s = np.sqrt(r * (1.0 - r))
    rho1 = SubnormalizedState(np.array([[1.0 - r, s], [s, r]], dtype=complex))
    rho2 = SubnormalizedState(np.array([[1.0 - r, -s], [-s, r]], dtype=complex))
    sigma = SubnormalizedState(np.array([[0.0, 0.0], [0.0, r]], dtype=complex))
    return rho1, rho2, sigma


def extremal_gaps(r: float) -> tuple[float, float]:
    """Closed forms (member gap, mixture gap) for the extremal family."""
    if not (0.0 <= r <= 1.0):
        raise ValueError(f"r must lie in [0, 1], got {r!r}")
    member = 1.0 + r - np.sqrt(1.0 + 2.0 * r - 3.0 * r * r)
    return float(member), 2.0 * r


def embed_subnormalized(rho: SubnormalizedState, sigma: SubnormalizedState):
    """Lift two subnormalized d-dim states to unit-trace (d+2)-dim states.

    The trace deficits go to disjoint diagonal slots, which preserves the gap:
    2 - |rho~ - sigma~| = Tr rho + Tr sigma - |rho - sigma|.
    """
    if rho.dim != sigma.dim:
        raise ValueError("states must share a dimension")
    d = rho.dim
    for name, state in (("rho", rho), ("sigma", sigma)):
        if state.trace() > 1.0 + 1e-10:
            raise ValueError(f"{name} has trace {state.trace()!r} > 1")
    big_rho = np.zeros((d + 2, d + 2), dtype=complex)
    big_sigma = np.zeros((d + 2, d + 2), dtype=complex)
    big_rho[:d, :d] = rho.mat
    big_rho[d, d] = 1.0 - rho.trace()
    big_sigma[:d, :d] = sigma.mat
    big_sigma[d + 1, d + 1] = 1.0 - sigma.trace()
    return DensityMatrix(big_rho), DensityMatrix(big_sigma)


def l1_distance(p, q) -> float:
    """L1 distance between two probability vectors."""
    return float(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)).sum())


@dataclass(frozen=True, eq=False)
class ClassicalSharpExample:
    """Distributions where the commuting bound 2 - l*eps holds with equality.

    On l+1 points: h = (eps/2, ..., eps/2, 1 - l*eps/2), component i the point
    mass at i, mixture weights uniform. Then |g_i - h|_1 = 2 - eps for every i
    and |mean - h|_1 = 2 - l*eps exactly.
    """

    h: np.ndarray
    components: np.ndarray
    weights: np.ndarray

    @property
    def l(self) -> int:
        return len(self.components)

    def mixture(self) -> np.ndarray:
        return self.weights @ self.components


def classical_sharp_example(l: int, eps: float) -> ClassicalSharpExample:
    if l < 1:
        raise ValueError("need at least one component")
    if not (0.0 <= eps <= 2.0 / l):
        raise ValueError(f"eps must lie in [0, 2/l] = [0, {2.0 / l}], got {eps!r}")
    h = np.full(l + 1, eps / 2.0)
    h[l] = 1.0 - l * eps / 2.0
    components = np.eye(l, l + 1)
    weights = np.full(l, 1.0 / l)
    return ClassicalSharpExample(h=h, components=components, weights=weights)


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float
    slack: float
    passed: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "pass": self.passed}


def rotfeld_check(psd_mats) -> InequalityReport:
    """Subadditivity of Tr sqrt on PSD matrices: Tr sqrt(sum) <= sum Tr sqrt."""
    mats = list(psd_mats)
    if not mats:
        raise ValueError("need at least one matrix")
    lhs = float(np.real(np.trace(psd_sqrt(sum(mats)))))
    rhs = float(sum(np.real(np.trace(psd_sqrt(m))) for m in mats))
    slack = rhs - lhs
    return InequalityReport(lhs=lhs, rhs=rhs, slack=slack, passed=bool(slack >= -PASS_SLACK))


def fvdg_check(rho: DensityMatrix, sigma: DensityMatrix) -> tuple[InequalityReport, InequalityReport]:
    """Fidelity-distance sandwich: 1 - F <= |rho-sigma|/2 <= sqrt(1 - F^2)."""
    f = fidelity(rho, sigma)
    half = trace_distance(rho, sigma) / 2.0
    upper = float(np.sqrt(max(0.0, 1.0 - f * f)))
    low = InequalityReport(
        lhs=1.0 - f, rhs=half, slack=half - (1.0 - f), passed=bool(half - (1.0 - f) >= -PASS_SLACK)
    )
    high = InequalityReport(
        lhs=half, rhs=upper, slack=upper - half, passed=bool(upper - half >= -PASS_SLACK)
    )
    return low, high


def _block_density(dim: int, lo: int, hi: int, rng, diagonal: bool) -> DensityMatrix:
    """Random state supported on coordinates [lo, hi) of a dim-dim space."""
    width = hi - lo
    mat = np.zeros((dim, dim), dtype=complex)
    if diagonal:
        probs = rng.random(width) + 1e-3
        mat[range(lo, hi), range(lo, hi)] = probs / probs.sum()
    else:
        inner = sample_density(width, width, rng).mat
        mat[lo:hi, lo:hi] = inner
    return DensityMatrix(mat)


def sample_rti_instance(dim: int, l: int, seed, commuting: bool = False) -> RtiInstance:
    """Random instance with small tight eps: sigma and the ensemble live on
    complementary blocks, plus a little full-support leakage per member."""
    if dim < 2:
        raise ValueError("need dim >= 2 to separate the reference from the ensemble")
    rng = np.random.default_rng(seed)
    split = int(rng.integers(1, dim))
    sigma = _block_density(dim, 0, split, rng, commuting)
    rhos = []
    for _ in range(l):
        base = _block_density(dim, split, dim, rng, commuting)
        leak = float(rng.uniform(0.0, 0.05))
        noise = _block_density(dim, 0, dim, rng, True) if commuting else sample_density(dim, dim, rng)
        rhos.append(DensityMatrix((1.0 - leak) * base.mat + leak * noise.mat))
    weights = rng.random(l) + 0.1
    weights /= weights.sum()
    eps = RtiInstance.tight_epsilon_of(rhos, sigma)
    return RtiInstance(sigma=sigma, rhos=tuple(rhos), weights=weights, epsilon=eps)


@dataclass(frozen=True)
class CampaignRow:
    dim: int
    l: int
    trials: int
    commuting: bool
    violations: int
    min_slack: float

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "l": self.l,
            "trials": self.trials,
            "commuting": self.commuting,
            "violations": self.violations,
            "min_slack": self.min_slack,
        }


def rti_campaign(dims, ls, trials: int, seed: int, commuting: bool = False) -> list[CampaignRow]:
    """Verify `trials` random instances per (dim, l); per-trial seeds derive
    from (seed, dim, l, trial) so runs are order-independent."""
    rows = []
    for dim in dims:
        for l in ls:
            violations = 0
            min_slack = np.inf
            for t in range(trials):
                inst = sample_rti_instance(dim, l, (seed, dim, l, t), commuting)
                report = verify_rti(inst, commuting=commuting)
                min_slack = min(min_slack, report.slack)
                violations += 0 if report.passed else 1
            rows.append(
                CampaignRow(
                    dim=dim,
                    l=l,
                    trials=trials,
                    commuting=commuting,
                    violations=violations,
                    min_slack=float(min_slack),
                )
            )
    return rows
