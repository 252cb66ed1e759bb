"""Universal lower bounds on the fraction of determinism of quantum boxes.

Every two-input box realized by measuring a shared quantum state carries a
guaranteed deterministic fraction. The argument chains four steps: steering by
either of Bob's measurements yields two ensembles with a common average; after
truncating light members, some cross pair of steered states is close; a close
pair shares a confusing outcome under every Alice measurement; that outcome,
weighted by the surviving Bob probabilities, floors one deterministic box's
coefficient. Optimizing the truncation threshold gives the universal constant.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, field
from decimal import Decimal

import numpy as np

from .boxes import quantum_box
from .states import (
    DensityMatrix,
    Ensemble,
    Povm,
    ensemble_average,
    steer,
    trace_distance,
    truncate_ensemble,
)

PIPELINE_TOL = 1e-8
MU_SEARCH_HI = 50.0
MU_AGREE_TOL = 1e-8


def mu_objective(mu: float) -> float:
    """Per-member floor factor ((mu - 2) / (mu - 1))^2 / mu of the truncation
    threshold 1 / (l mu); positive only for mu > 2."""
    if mu <= 1.0:
        raise ValueError(f"objective needs mu > 1, got {mu!r}")
    return ((mu - 2.0) / (mu - 1.0)) ** 2 / mu


def golden_section_max(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Argmax of a unimodal function on [lo, hi] by golden-section search."""
    if not lo < hi:
        raise ValueError("empty search interval")
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class MuOptimum:
    mu: float
    value: float

    def to_dict(self) -> dict:
        return {"mu": self.mu, "value": self.value}


def _golden_section_max_decimal() -> float:
    """Argmax of the truncation objective over (2, 50] in 40-digit decimal
    arithmetic; float64 is too flat near the maximum to localize the argmax
    beyond ~1e-7."""
    with decimal.localcontext() as ctx:
        ctx.prec = 40
        inv_phi = (Decimal(5).sqrt() - 1) / 2
        a, b = Decimal("2.000000001"), Decimal(MU_SEARCH_HI)
        tol = Decimal("1e-12")

        def fn(mu):
            return ((mu - 2) / (mu - 1)) ** 2 / mu

        c = b - inv_phi * (b - a)
        d = a + inv_phi * (b - a)
        fc, fd = fn(c), fn(d)
        while b - a > tol:
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - inv_phi * (b - a)
                fc = fn(c)
            else:
                a, c, fc = c, d, fd
                d = a + inv_phi * (b - a)
                fd = fn(d)
        return float((a + b) / 2)


def optimize_mu() -> MuOptimum:
    """Maximizer of mu_objective: mu = (5 + sqrt(17)) / 2, cross-checked
    against a golden-section search; raises RuntimeError on disagreement."""
    mu = (5.0 + math.sqrt(17.0)) / 2.0
    searched = _golden_section_max_decimal()
    if abs(searched - mu) > MU_AGREE_TOL:
        raise RuntimeError(
            f"closed-form maximizer {mu!r} disagrees with search {searched!r}"
        )
    return MuOptimum(mu=mu, value=mu_objective(mu))


def epsilon_from_average_distance(x: float, l1: int, l2: int) -> float:
    """Closeness floor for some cross pair of two ensembles whose averages are
    at trace distance x: epsilon = ((2 - x) / 2)^2 / (l1 l2), and the closest
    pair then satisfies distance <= 2 - epsilon."""
    if not 0.0 <= x < 2.0:
        raise ValueError(f"average distance must lie in [0, 2), got {x!r}")
    if l1 < 1 or l2 < 1:
        raise ValueError("ensemble sizes must be at least 1")
    return ((2.0 - x) / 2.0) ** 2 / (l1 * l2)


def pair_gap_from_mu(mu: float, l: int) -> float:
    """Worst-case cross-pair closeness after truncation at 1 / (l mu): the
    truncated averages differ by at most 2 / (mu - 1), so epsilon =
    ((mu - 2) / (l (mu - 1)))^2."""
    if mu <= 2.0:
        raise ValueError(f"truncation scale must exceed 2, got {mu!r}")
    if l < 1:
        raise ValueError("ensemble size must be at least 1")
    return ((mu - 2.0) / (l * (mu - 1.0))) ** 2


@dataclass(frozen=True)
class UniversalBound:
    """Fraction-of-determinism floor f(mu0) / (2k l l1 l2), with the looser
    all-l form f(mu0) / (2k l^3) kept alongside."""

    k: int
    l1: int
    l2: int
    theorem_form: float
    proof_form: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "l1": self.l1,
            "l2": self.l2,
            "theorem_form": self.theorem_form,
            "proof_form": self.proof_form,
        }


def universal_fod_bound(k: int, l1: int, l2: int) -> UniversalBound:
    """Universal deterministic-fraction floor for boxes from k-outcome Alice
    measurements and Bob measurements steering into l1- and l2-member
    ensembles. proof_form replaces l1 l2 by l^2 and is never larger."""
    if k < 1 or l1 < 1 or l2 < 1:
        raise ValueError("outcome counts must be at least 1")
    fmax = optimize_mu().value
    l = max(l1, l2)
    theorem = fmax / (2.0 * k * l * l1 * l2)
    proof = fmax / (2.0 * k * l**3)
    return UniversalBound(k=k, l1=l1, l2=l2, theorem_form=theorem, proof_form=proof)


@dataclass(frozen=True)
class ConfusingOutcome:
    """Outcome of a k-outcome measurement carrying probability >= epsilon on
    both states of a close pair, epsilon = (2 - distance) / (2k)."""

    index: int
    epsilon: float
    prob_rho: float
    prob_sigma: float

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "epsilon": self.epsilon,
            "prob_rho": self.prob_rho,
            "prob_sigma": self.prob_sigma,
        }


def confusing_outcome(rho: DensityMatrix, sigma: DensityMatrix, povm: Povm) -> ConfusingOutcome:
    """Smallest-index outcome with min(Tr(X_r rho), Tr(X_r sigma)) >= epsilon.

    Exists for every POVM because the outcome distributions have total
    variation at most the trace distance, leaving overlap 2 - distance spread
    over k outcomes.
    """
    if povm.dim != rho.dim or povm.dim != sigma.dim:
        raise ValueError("measurement and states must share a dimension")
    k = len(povm)
    eps = (2.0 - trace_distance(rho, sigma)) / (2.0 * k)
    for r, element in enumerate(povm.elements):
        p = float(np.real(np.trace(element @ rho.mat)))
        q = float(np.real(np.trace(element @ sigma.mat)))
        if min(p, q) >= eps - 1e-10:
            return ConfusingOutcome(index=r, epsilon=eps, prob_rho=p, prob_sigma=q)
    raise RuntimeError("no outcome reached the guaranteed overlap floor")


@dataclass(frozen=True)
class ClosePair:
    """Closest cross pair of two ensembles, with the guaranteed closeness
    floor epsilon derived from the distance of the ensemble averages."""

    i: int
    j: int
    distance: float
    epsilon: float
    average_distance: float

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "distance": self.distance,
            "epsilon": self.epsilon,
            "average_distance": self.average_distance,
        }


def close_pair(e1: Ensemble, e2: Ensemble) -> ClosePair:
    """Minimum-distance pair (first in i-major scan order on ties)."""
    if e1.dim != e2.dim:
        raise ValueError("ensembles must share a dimension")
    x = trace_distance(ensemble_average(e1), ensemble_average(e2))
    if x >= 2.0:
        raise ValueError("ensemble averages are perfectly distinguishable")
    eps = epsilon_from_average_distance(x, len(e1), len(e2))
    best = (0, 0)
    best_d = math.inf
    for i, rho in enumerate(e1.states):
        for j, sigma in enumerate(e2.states):
            d = trace_distance(rho, sigma)
            if d < best_d:
                best_d = d
                best = (i, j)
    if best_d > 2.0 - eps + PIPELINE_TOL:
        raise RuntimeError("closest pair misses its guaranteed closeness floor")
    return ClosePair(
        i=best[0], j=best[1], distance=best_d, epsilon=eps, average_distance=x
    )


def fod_witness(e1: Ensemble, e2: Ensemble, povm: Povm):
    """Best realized joint floor max_{r,i,j} min(w_i p(r|rho_i), v_j p(r|sigma_j)).

    Returns (value, (r, i, j)); first maximizer in r-major scan order.
    """
    best = -1.0
    arg = (0, 0, 0)
    for r, element in enumerate(povm.elements):
        p1 = [
            w * float(np.real(np.trace(element @ s.mat)))
            for w, s in zip(e1.weights, e1.states)
        ]
        p2 = [
            v * float(np.real(np.trace(element @ s.mat)))
            for v, s in zip(e2.weights, e2.states)
        ]
        for i, a in enumerate(p1):
            for j, b in enumerate(p2):
                value = min(a, b)
                if value > best:
                    best = value
                    arg = (r, i, j)
    return best, arg


@dataclass(frozen=True)
class InequalityRecord:
    """One certified step lhs <= rhs with its numerical slack."""

    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.slack >= -PIPELINE_TOL

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
        }


@dataclass(frozen=True, eq=False)
class PipelineTrace:
    """Every intermediate quantity of the determinism-floor argument for one
    quantum realization, with each inequality recorded alongside its slack."""

    mu: float
    k: int
    l1: int
    l2: int
    l: int
    threshold: float
    delta1: float
    delta2: float
    truncated_sizes: tuple
    average_distance: float
    truncated_average_distance: float
    x_bound: float
    epsilon: float
    epsilon_measured: float
    pair_labels: tuple
    pair_distance: float
    confusing: tuple
    box_entries: tuple
    c: float
    theorem_form: float
    proof_form: float
    vacuous: bool
    inequalities: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.inequalities)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "k": self.k,
            "l1": self.l1,
            "l2": self.l2,
            "l": self.l,
            "threshold": self.threshold,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "truncated_sizes": list(self.truncated_sizes),
            "average_distance": self.average_distance,
            "truncated_average_distance": self.truncated_average_distance,
            "x_bound": self.x_bound,
            "epsilon": self.epsilon,
            "epsilon_measured": self.epsilon_measured,
            "pair_labels": list(self.pair_labels),
            "pair_distance": self.pair_distance,
            "confusing": [c.to_dict() for c in self.confusing],
            "box_entries": [list(e) for e in self.box_entries],
            "c": self.c,
            "theorem_form": self.theorem_form,
            "proof_form": self.proof_form,
            "vacuous": self.vacuous,
            "passed": self.passed,
            "inequalities": [r.to_dict() for r in self.inequalities],
        }


def fod_floor_pipeline(
    rho_ab: DensityMatrix,
    bob_povm_1: Povm,
    bob_povm_2: Povm,
    alice_povms,
    mu: float | None = None,
) -> PipelineTrace:
    """Run the full determinism-floor argument on one quantum realization.

    Steers by both Bob measurements, truncates at 1 / (l mu), locates a close
    cross pair, finds Alice's confusing outcome for every input, and certifies
    that two cells of the realized box (one per Bob input, sharing Bob's
    outputs with the close pair) sit above c = epsilon / (2 k l mu), which in
    turn dominates the universal theorem floor. If truncation leaves nothing
    (unreachable for honest ensembles, guarded anyway), the trace is marked
    vacuous and c falls back to the theorem floor.
    """
    alice = list(alice_povms)
    if not alice:
        raise ValueError("need at least one Alice measurement")
    if bob_povm_1.dim != bob_povm_2.dim:
        raise ValueError("Bob's measurements must share a dimension")
    if mu is None:
        mu = optimize_mu().mu
    elif mu <= 2.0:
        raise ValueError(f"truncation scale must exceed 2, got {mu!r}")

    box = quantum_box(rho_ab, alice, [bob_povm_1, bob_povm_2])
    k = max(len(p) for p in alice)
    ens1 = steer(rho_ab, bob_povm_1)
    ens2 = steer(rho_ab, bob_povm_2)
    l1, l2 = len(ens1), len(ens2)
    l = max(l1, l2)
    threshold = 1.0 / (l * mu)
    bound = universal_fod_bound(k, l1, l2)
    average_distance = trace_distance(ensemble_average(ens1), ensemble_average(ens2))

    try:
        t1, delta1 = truncate_ensemble(ens1, threshold)
        t2, delta2 = truncate_ensemble(ens2, threshold)
    except ValueError:
        return PipelineTrace(
            mu=mu, k=k, l1=l1, l2=l2, l=l, threshold=threshold,
            delta1=math.nan, delta2=math.nan, truncated_sizes=(0, 0),
            average_distance=average_distance,
            truncated_average_distance=math.nan, x_bound=2.0 / (mu - 1.0),
            epsilon=math.nan, epsilon_measured=math.nan, pair_labels=(),
            pair_distance=math.nan, confusing=(), box_entries=(),
            c=bound.theorem_form, theorem_form=bound.theorem_form,
            proof_form=bound.proof_form, vacuous=True, inequalities=(),
        )

    x_bound = 2.0 / (mu - 1.0)
    truncated_average_distance = trace_distance(
        ensemble_average(t1), ensemble_average(t2)
    )
    epsilon = epsilon_from_average_distance(x_bound, len(t1), len(t2))
    pair = close_pair(t1, t2)
    rho_pair = t1.states[pair.i]
    sigma_pair = t2.states[pair.j]
    b1 = t1.labels[pair.i]
    b2 = t2.labels[pair.j]
    c = epsilon / (2.0 * k * l * mu)

    records = [
        InequalityRecord("dropped mass of first ensemble <= 1/mu", delta1, 1.0 / mu),
        InequalityRecord("dropped mass of second ensemble <= 1/mu", delta2, 1.0 / mu),
        InequalityRecord(
            "truncated average distance <= renormalization bound",
            truncated_average_distance,
            (2.0 * max(delta1, delta2) + average_distance) / (1.0 - max(delta1, delta2)),
        ),
        InequalityRecord(
            "truncated average distance <= worst case 2/(mu-1)",
            truncated_average_distance,
            x_bound,
        ),
        InequalityRecord("worst-case epsilon <= measured epsilon", epsilon, pair.epsilon),
        InequalityRecord("pair distance <= 2 - epsilon", pair.distance, 2.0 - epsilon),
        InequalityRecord(
            "threshold < surviving weight (first ensemble)",
            threshold,
            float(min(t1.weights) * (1.0 - delta1)),
        ),
        InequalityRecord(
            "threshold < surviving weight (second ensemble)",
            threshold,
            float(min(t2.weights) * (1.0 - delta2)),
        ),
        InequalityRecord("theorem floor <= realized c", bound.theorem_form, c),
    ]

    confusing = []
    box_entries = []
    for x, povm in enumerate(alice):
        co = confusing_outcome(rho_pair, sigma_pair, povm)
        confusing.append(co)
        records.append(
            InequalityRecord(
                f"input {x}: epsilon/(2k) <= confusing floor",
                epsilon / (2.0 * k),
                co.epsilon,
            )
        )
        for y, b in ((0, b1), (1, b2)):
            value = float(box.p[x, y, co.index, b])
            box_entries.append((x, y, co.index, b, value))
            records.append(
                InequalityRecord(f"box entry (x={x}, y={y}) >= c", c, value)
            )

    return PipelineTrace(
        mu=mu, k=k, l1=l1, l2=l2, l=l, threshold=threshold,
        delta1=delta1, delta2=delta2, truncated_sizes=(len(t1), len(t2)),
        average_distance=average_distance,
        truncated_average_distance=truncated_average_distance,
        x_bound=x_bound, epsilon=epsilon, epsilon_measured=pair.epsilon,
        pair_labels=(b1, b2), pair_distance=pair.distance,
        confusing=tuple(confusing), box_entries=tuple(box_entries),
        c=c, theorem_form=bound.theorem_form, proof_form=bound.proof_form,
        vacuous=False, inequalities=tuple(records),
    )


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    n = max(1, int(round((hi - lo) / step))) + 1
    return np.linspace(lo, hi, n)


def _minimize_q(fn, step: float, refine: float):
    """Minimize fn(q0) over q0 in [0, 1/2] by grid search plus zooming."""
    lo, hi = 0.0, 0.5
    q = _grid(lo, hi, step)
    vals = fn(q)
    i = int(np.argmin(vals))
    best_q, best_v = float(q[i]), float(vals[i])
    while step > refine:
        lo = max(0.0, best_q - 2.0 * step)
        hi = min(0.5, best_q + 2.0 * step)
        step /= 10.0
        q = _grid(lo, hi, step)
        vals = fn(q)
        i = int(np.argmin(vals))
        best_q, best_v = float(q[i]), float(vals[i])
    return best_v, best_q


def _minimize_pq(fn, step: float, refine: float):
    """Minimize fn(p0, q0) over 0 <= p0 <= q0 <= 1/2 by grid plus zooming."""

    def scan(plo, phi, qlo, qhi, h):
        p = _grid(plo, phi, h)
        q = _grid(qlo, qhi, h)
        pp, qq = np.meshgrid(p, q, indexing="ij")
        vals = np.where(pp <= qq + 1e-15, fn(pp, qq), np.inf)
        i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
        return float(vals[i, j]), float(pp[i, j]), float(qq[i, j])

    best_v, best_p, best_q = scan(0.0, 0.5, 0.0, 0.5, step)
    while step > refine:
        plo, phi = max(0.0, best_p - 2.0 * step), min(0.5, best_p + 2.0 * step)
        qlo, qhi = max(0.0, best_q - 2.0 * step), min(0.5, best_q + 2.0 * step)
        step /= 10.0
        best_v, best_p, best_q = scan(plo, phi, qlo, qhi, step)
    return best_v, (best_p, best_q)


def _second_terms(p0, q0):
    """Cross-pair floors 2 q1 (1 - q0/p1) and 2 q0 (1 - q1/p1); both
    nonnegative on p0 <= q0 <= 1/2 where p1 = 1 - p0 >= 1/2."""
    p1 = 1.0 - p0
    q1 = 1.0 - q0
    return 2.0 * q1 * (1.0 - q0 / p1), 2.0 * q0 * (1.0 - q1 / p1)


@dataclass(frozen=True, eq=False)
class BinaryBobBounds:
    """Determinism and classical-fraction constants when Bob's two
    measurements are binary, minimized over his outcome distributions.

    The close pair carries gap >= 1/2 in one of four weight-ordering cases;
    the reported constants take the worst case. In the two cross-pair cases
    the second ensemble's floor uses the weight-decoupled relaxation
    q0/p1 <= 2 q0 (valid since p1 >= 1/2), which unlinks the two
    distributions; cf_constant_coupled keeps the coupling in those cases and
    is the sharper diagnostic value.
    """

    k: int
    fod_constant: float
    cf_constant: float
    cf_constant_coupled: float
    fod_bound: float
    cf_bound: float
    fod_witness: tuple
    cf_witness: tuple
    case_minima: dict

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "fod_constant": self.fod_constant,
            "cf_constant": self.cf_constant,
            "cf_constant_coupled": self.cf_constant_coupled,
            "fod_bound": self.fod_bound,
            "cf_bound": self.cf_bound,
            "fod_witness": list(self.fod_witness),
            "cf_witness": list(self.cf_witness),
            "case_minima": dict(self.case_minima),
        }


def binary_bob_bounds(
    k: int = 2, grid_step: float = 1e-3, refine_step: float = 1e-6
) -> BinaryBobBounds:
    """Worst-case determinism constants for binary-outcome Bob measurements.

    Weights are parameterized by p0 <= q0 <= 1/2 (heavier outcomes carry
    1 - p0, 1 - q0). Each of the four close-pair cases yields a floor; the
    deterministic fraction takes one floor per case, the classical fraction
    may stack the two floors that feed distinct deterministic boxes. Grid
    search at grid_step with local zooming down to refine_step. The realized
    box floors are the constants divided by 2k.
    """
    if k < 1:
        raise ValueError("Alice outcome count must be at least 1")

    def fod_same_pair(p0, q0):
        t2, _ = _second_terms(p0, q0)
        return np.maximum(p0 / 4.0, t2)

    def cf_case00(p0, q0):
        t2, t3 = _second_terms(p0, q0)
        return np.maximum(p0 / 4.0 + t2, t3)

    def cf_case01(p0, q0):
        t2, t3 = _second_terms(p0, q0)
        return np.maximum(t2, p0 / 4.0 + t3)

    def cross10_decoupled(q0):
        q1 = 1.0 - q0
        return np.maximum(2.0 * q1 * (1.0 - 2.0 * q0), q0 / 4.0)

    def cross11_decoupled(q0):
        q1 = 1.0 - q0
        return np.maximum(q1 / 4.0, 2.0 * q0 * np.maximum(0.0, 1.0 - 2.0 * q1))

    def cross10_coupled(p0, q0):
        t2, _ = _second_terms(p0, q0)
        return np.maximum(t2, q0 / 4.0)

    def cross11_coupled(p0, q0):
        _, t3 = _second_terms(p0, q0)
        return np.maximum((1.0 - q0) / 4.0, t3)

    v00, w00 = _minimize_pq(fod_same_pair, grid_step, refine_step)
    v10, q10 = _minimize_q(cross10_decoupled, grid_step, refine_step)
    v11, q11 = _minimize_q(cross11_decoupled, grid_step, refine_step)
    c00, wc00 = _minimize_pq(cf_case00, grid_step, refine_step)
    c01, wc01 = _minimize_pq(cf_case01, grid_step, refine_step)
    c10, _ = _minimize_pq(cross10_coupled, grid_step, refine_step)
    c11, _ = _minimize_pq(cross11_coupled, grid_step, refine_step)

    case_minima = {
        "fod_case00": v00,
        "fod_case01": v00,
        "fod_case10": v10,
        "fod_case11": v11,
        "cf_case00": c00,
        "cf_case01": c01,
        "cf_case10": v10,
        "cf_case11": v11,
        "cf_case10_coupled": c10,
        "cf_case11_coupled": c11,
    }
    fod_cases = [(v00, w00), (v10, (q10, q10)), (v11, (q11, q11))]
    fod_constant, fod_arg = min(fod_cases, key=lambda t: t[0])
    cf_cases = [(c00, wc00), (c01, wc01), (v10, (q10, q10)), (v11, (q11, q11))]
    cf_constant, cf_arg = min(cf_cases, key=lambda t: t[0])
    return BinaryBobBounds(
        k=k,
        fod_constant=fod_constant,
        cf_constant=cf_constant,
        cf_constant_coupled=min(c00, c01, c10, c11),
        fod_bound=fod_constant / (2.0 * k),
        cf_bound=cf_constant / (2.0 * k),
        fod_witness=fod_arg,
        cf_witness=cf_arg,
        case_minima=case_minima,
    )
