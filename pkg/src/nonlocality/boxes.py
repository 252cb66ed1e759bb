"""Bipartite boxes: conditional distributions p(a, b | x, y) and Bell functionals.

Boxes are stored densely as arrays of shape (nA, nB, max_a, max_b) in
(x, y, a, b) order; cells outside an input's outcome count are structural
zeros. Outcome counts may differ per input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import tensor
from .states import DensityMatrix, Povm, xz_spin_povm, singlet

ENTRY_TOL = 1e-12
NORMALIZATION_TOL = 1e-9
NS_TOL = 1e-9
DEFAULT_ENUMERATION_BUDGET = 10**6


@dataclass(frozen=True)
class Scenario:
    """Outcome counts per input for each party."""

    outcomes_a: tuple
    outcomes_b: tuple

    def __post_init__(self):
        a = tuple(int(k) for k in self.outcomes_a)
        b = tuple(int(k) for k in self.outcomes_b)
        if not a or not b:
            raise ValueError("each party needs at least one input")
        if min(a) < 1 or min(b) < 1:
            raise ValueError("each input needs at least one outcome")
        object.__setattr__(self, "outcomes_a", a)
        object.__setattr__(self, "outcomes_b", b)

    @property
    def inputs_a(self) -> int:
        return len(self.outcomes_a)

    @property
    def inputs_b(self) -> int:
        return len(self.outcomes_b)

    @property
    def shape(self) -> tuple:
        return (self.inputs_a, self.inputs_b, max(self.outcomes_a), max(self.outcomes_b))

    def strategy_count(self) -> int:
        n = 1
        for k in self.outcomes_a:
            n *= k
        for k in self.outcomes_b:
            n *= k
        return n

    def to_dict(self) -> dict:
        return {
            "nA": self.inputs_a,
            "nB": self.inputs_b,
            "outcomesA": list(self.outcomes_a),
            "outcomesB": list(self.outcomes_b),
        }

    @staticmethod
    def from_dict(d: dict) -> "Scenario":
        try:
            sc = Scenario(tuple(d["outcomesA"]), tuple(d["outcomesB"]))
        except (TypeError, KeyError) as exc:
            raise ValueError(f"scenario dict needs outcome-count lists: {exc}") from None
        if sc.inputs_a != d.get("nA", sc.inputs_a) or sc.inputs_b != d.get("nB", sc.inputs_b):
            raise ValueError("input counts disagree with outcome lists")
        return sc


def _parsed_blocks(d: dict, key: str, kind: str) -> tuple:
    """Extract the scenario and the per-input-pair block list from a dict."""
    try:
        return Scenario.from_dict(d["scenario"]), d[key]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"{kind} dict needs 'scenario' and '{key}' entries: {exc}") from None


def _block_at(rows, x: int, y: int, kind: str) -> np.ndarray:
    try:
        return np.asarray(rows[x][y], dtype=float)
    except (TypeError, KeyError, IndexError):
        raise ValueError(f"{kind} dict has no block at input pair ({x}, {y})") from None


def _check_table(scenario: Scenario, arr, normalized: bool) -> np.ndarray:
    t = np.asarray(arr, dtype=float)
    if t.shape != scenario.shape:
        raise ValueError(f"table shape {t.shape} does not match scenario {scenario.shape}")
    for x, ka in enumerate(scenario.outcomes_a):
        for y, kb in enumerate(scenario.outcomes_b):
            pad = np.abs(t[x, y, ka:, :]).max(initial=0.0) + np.abs(t[x, y, :, kb:]).max(initial=0.0)
            if pad > 0.0:
                raise ValueError(f"structural-zero cells are nonzero at input pair ({x}, {y})")
            if normalized:
                block = t[x, y, :ka, :kb]
                if float(block.min()) < -ENTRY_TOL or float(block.max()) > 1.0 + ENTRY_TOL:
                    raise ValueError(f"probabilities out of range at input pair ({x}, {y})")
                total = float(block.sum())
                if abs(total - 1.0) > NORMALIZATION_TOL:
                    raise ValueError(f"block ({x}, {y}) sums to {total!r}, expected 1")
    t.setflags(write=False)
    return t


@dataclass(frozen=True, eq=False)
class Box:
    """Normalized conditional distribution table."""

    scenario: Scenario
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _check_table(self.scenario, self.p, normalized=True))

    def block(self, x: int, y: int) -> np.ndarray:
        return self.p[x, y, : self.scenario.outcomes_a[x], : self.scenario.outcomes_b[y]]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "p": [
                [self.block(x, y).tolist() for y in range(self.scenario.inputs_b)]
                for x in range(self.scenario.inputs_a)
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "Box":
        sc, rows = _parsed_blocks(d, "p", "box")
        t = np.zeros(sc.shape)
        for x in range(sc.inputs_a):
            for y in range(sc.inputs_b):
                t[x, y, : sc.outcomes_a[x], : sc.outcomes_b[y]] = _block_at(rows, x, y, "box")
        return Box(sc, t)


@dataclass(frozen=True)
class NsReport:
    passed: bool
    max_violation: float
    location: str

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "max_violation": self.max_violation,
            "location": self.location,
        }


def validate_ns(box: Box, tol: float = NS_TOL) -> NsReport:
    """Check that each party's marginal ignores the other party's input."""
    sc = box.scenario
    worst = 0.0
    where = "none"
    for x in range(sc.inputs_a):
        marg = [box.block(x, y).sum(axis=1) for y in range(sc.inputs_b)]
        for y1, y2 in itertools.combinations(range(sc.inputs_b), 2):
            dev = float(np.abs(marg[y1] - marg[y2]).max())
            if dev > worst:
                worst, where = dev, f"alice marginal at x={x} between y={y1} and y={y2}"
    for y in range(sc.inputs_b):
        marg = [box.block(x, y).sum(axis=0) for x in range(sc.inputs_a)]
        for x1, x2 in itertools.combinations(range(sc.inputs_a), 2):
            dev = float(np.abs(marg[x1] - marg[x2]).max())
            if dev > worst:
                worst, where = dev, f"bob marginal at y={y} between x={x1} and x={x2}"
    return NsReport(passed=bool(worst <= tol), max_violation=worst, location=where)


@dataclass(frozen=True)
class DeterministicStrategy:
    """Fixed outputs per input for each party."""

    alice: tuple
    bob: tuple

    def __post_init__(self):
        object.__setattr__(self, "alice", tuple(int(a) for a in self.alice))
        object.__setattr__(self, "bob", tuple(int(b) for b in self.bob))


def enumerate_deterministic(scenario: Scenario, budget: int = DEFAULT_ENUMERATION_BUDGET):
    """All deterministic strategies, lexicographic with Alice assignments outer."""
    count = scenario.strategy_count()
    if count > budget:
        raise ValueError(f"enumeration needs {count} strategies, budget is {budget}")
    alice_all = itertools.product(*(range(k) for k in scenario.outcomes_a))
    out = []
    for alice in alice_all:
        for bob in itertools.product(*(range(k) for k in scenario.outcomes_b)):
            out.append(DeterministicStrategy(alice=alice, bob=bob))
    return out


def deterministic_box(strategy: DeterministicStrategy, scenario: Scenario) -> Box:
    if len(strategy.alice) != scenario.inputs_a or len(strategy.bob) != scenario.inputs_b:
        raise ValueError("strategy length does not match the scenario")
    t = np.zeros(scenario.shape)
    for x, a in enumerate(strategy.alice):
        if not (0 <= a < scenario.outcomes_a[x]):
            raise ValueError(f"alice output {a} out of range for input {x}")
        for y, b in enumerate(strategy.bob):
            if not (0 <= b < scenario.outcomes_b[y]):
                raise ValueError(f"bob output {b} out of range for input {y}")
            t[x, y, a, b] = 1.0
    return Box(scenario, t)


def local_box(scenario: Scenario, weights, strategies=None) -> Box:
    """Convex mixture of deterministic boxes.

    `strategies` defaults to the full enumeration order; `weights` must be a
    probability vector over them.
    """
    if strategies is None:
        strategies = enumerate_deterministic(scenario)
    w = np.asarray(weights, dtype=float)
    if len(w) != len(strategies):
        raise ValueError("weights and strategies disagree in length")
    if float(w.min()) < -ENTRY_TOL:
        raise ValueError(f"negative weight {float(w.min())!r}")
    if abs(float(w.sum()) - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"weights sum to {float(w.sum())!r}, expected 1")
    t = np.zeros(scenario.shape)
    for wi, s in zip(w, strategies):
        if wi > 0.0:
            t += wi * deterministic_box(s, scenario).p
    return Box(scenario, t)


def _require_binary_two_input(scenario: Scenario, what: str):
    if scenario.outcomes_a != (2, 2) or scenario.outcomes_b != (2, 2):
        raise ValueError(f"{what} needs two binary inputs per side, got {scenario}")


def pr_box(scenario: Scenario | None = None) -> Box:
    """Nonlocal extremal box: p = 1/2 when a xor b = x and y, else 0."""
    sc = scenario if scenario is not None else chsh_scenario()
    _require_binary_two_input(sc, "the PR box")
    t = np.zeros(sc.shape)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        if (a ^ b) == x * y:
            t[x, y, a, b] = 0.5
    return Box(sc, t)


def maximally_mixed_box(scenario: Scenario) -> Box:
    t = np.zeros(scenario.shape)
    for x, ka in enumerate(scenario.outcomes_a):
        for y, kb in enumerate(scenario.outcomes_b):
            t[x, y, :ka, :kb] = 1.0 / (ka * kb)
    return Box(scenario, t)


def quantum_box(rho: DensityMatrix, alice_povms, bob_povms) -> Box:
    """Born-rule box p(a,b|x,y) = Tr((M^x_a (x) N^y_b) rho)."""
    alice = list(alice_povms)
    bob = list(bob_povms)
    if not alice or not bob:
        raise ValueError("each party needs at least one measurement")
    da = alice[0].dim
    db = bob[0].dim
    if any(p.dim != da for p in alice) or any(p.dim != db for p in bob):
        raise ValueError("measurements of one party must share a dimension")
    if da * db != rho.dim:
        raise ValueError(f"state is {rho.dim}-dim, measurements give {da * db}")
    sc = Scenario(tuple(len(p) for p in alice), tuple(len(p) for p in bob))
    t = np.zeros(sc.shape)
    for x, ma in enumerate(alice):
        for y, nb in enumerate(bob):
            for a, ea in enumerate(ma.elements):
                for b, eb in enumerate(nb.elements):
                    t[x, y, a, b] = max(0.0, float(np.real(np.trace(tensor(ea, eb) @ rho.mat))))
    return Box(sc, t)


@dataclass(frozen=True, eq=False)
class BellFunctional:
    """Linear functional sum s(a,b|x,y) p(a,b|x,y) on boxes."""

    scenario: Scenario
    s: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "s", _check_table(self.scenario, self.s, normalized=False))

    def block(self, x: int, y: int) -> np.ndarray:
        return self.s[x, y, : self.scenario.outcomes_a[x], : self.scenario.outcomes_b[y]]

    @cached_property
    def algebraic_max(self) -> float:
        return bell_algebraic_max(self)

    @cached_property
    def deterministic_max(self) -> float:
        return bell_det_max(self)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "s": [
                [self.block(x, y).tolist() for y in range(self.scenario.inputs_b)]
                for x in range(self.scenario.inputs_a)
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "BellFunctional":
        sc, rows = _parsed_blocks(d, "s", "functional")
        t = np.zeros(sc.shape)
        for x in range(sc.inputs_a):
            for y in range(sc.inputs_b):
                t[x, y, : sc.outcomes_a[x], : sc.outcomes_b[y]] = _block_at(
                    rows, x, y, "functional"
                )
        return BellFunctional(sc, t)


def bell_value(functional: BellFunctional, box: Box) -> float:
    if functional.scenario != box.scenario:
        raise ValueError("functional and box live on different scenarios")
    return float(np.sum(functional.s * box.p))


def bell_algebraic_max(functional: BellFunctional) -> float:
    """No-signalling-free ceiling: sum over inputs of the best coefficient."""
    sc = functional.scenario
    total = 0.0
    for x in range(sc.inputs_a):
        for y in range(sc.inputs_b):
            total += float(functional.block(x, y).max())
    return total


def bell_det_max(functional: BellFunctional, budget: int = DEFAULT_ENUMERATION_BUDGET) -> float:
    """Best value over deterministic strategies (the local/classical maximum)."""
    sc = functional.scenario
    best = -np.inf
    for strat in enumerate_deterministic(sc, budget):
        val = 0.0
        for x, a in enumerate(strat.alice):
            for y, b in enumerate(strat.bob):
                val += float(functional.s[x, y, a, b])
        best = max(best, val)
    return float(best)


def chsh_scenario() -> Scenario:
    return Scenario((2, 2), (2, 2))


def chsh_functional() -> BellFunctional:
    """Correlator form E00 + E01 + E10 - E11 written on probabilities."""
    sc = chsh_scenario()
    t = np.zeros(sc.shape)
    for x, y, a, b in itertools.product(range(2), repeat=4):
        sign = 1.0 if (x, y) != (1, 1) else -1.0
        t[x, y, a, b] = sign * (1.0 if a == b else -1.0)
    return BellFunctional(sc, t)


def tsirelson_realization():
    """Singlet plus measurement angles reaching CHSH value 2 sqrt(2).

    Returns (rho, alice_povms, bob_povms): Alice measures along angles
    (0, pi/2) in the x-z plane, Bob along (5 pi/4, 3 pi/4).
    """
    rho = singlet()
    alice = (xz_spin_povm(0.0), xz_spin_povm(np.pi / 2))
    bob = (xz_spin_povm(5 * np.pi / 4), xz_spin_povm(3 * np.pi / 4))
    return rho, alice, bob
