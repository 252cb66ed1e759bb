"""Quantitative machinery for two-input Bell scenarios.

Three strands, each importable from the top level:

- a reverse triangle inequality for trace distance: states individually far
  from a target keep their mixture far from it (`rti`),
- fraction-of-determinism and classical-fraction decompositions of
  no-signalling boxes (`boxes`, `decomp`),
- universal lower bounds on the deterministic fraction of quantum boxes and
  the Bell-value ceilings they imply (`bounds`).
"""

from .linalg import (
    eig_hermitian,
    hermiticity_defect,
    max_commutator_entry,
    partial_trace,
    psd_sqrt,
    tensor,
    trace_norm,
)
from .states import (
    DensityMatrix,
    Ensemble,
    Povm,
    SubnormalizedState,
    basis_state,
    ensemble_average,
    fidelity,
    helstrom_error,
    maximally_mixed,
    pure_state,
    sample_density,
    sample_povm,
    singlet,
    steer,
    trace_distance,
    truncate_ensemble,
    xz_spin_povm,
)
from .rti import (
    ClassicalSharpExample,
    RtiInstance,
    RtiReport,
    classical_sharp_example,
    embed_subnormalized,
    extremal_family,
    extremal_gaps,
    fvdg_check,
    rotfeld_check,
    rti_campaign,
    rti_commuting_bound,
    rti_general_bound,
    sample_rti_instance,
    subnormalized_gap,
    verify_rti,
)
from .boxes import (
    BellFunctional,
    Box,
    DeterministicStrategy,
    Scenario,
    bell_algebraic_max,
    bell_det_max,
    bell_value,
    chsh_functional,
    chsh_scenario,
    deterministic_box,
    enumerate_deterministic,
    local_box,
    maximally_mixed_box,
    pr_box,
    quantum_box,
    tsirelson_realization,
    validate_ns,
)
from .decomp import (
    Decomposition,
    InfeasibleError,
    LinearProgram,
    UnboundedError,
    bell_bound_from_fod,
    cf_exact,
    fod_exact,
    simplex_solve,
)
from .bounds import (
    BinaryBobBounds,
    PipelineTrace,
    UniversalBound,
    binary_bob_bounds,
    close_pair,
    confusing_outcome,
    epsilon_from_average_distance,
    fod_floor_pipeline,
    fod_witness,
    mu_objective,
    optimize_mu,
    pair_gap_from_mu,
    universal_fod_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BellFunctional",
    "BinaryBobBounds",
    "Box",
    "ClassicalSharpExample",
    "Decomposition",
    "DensityMatrix",
    "DeterministicStrategy",
    "Ensemble",
    "InfeasibleError",
    "LinearProgram",
    "PipelineTrace",
    "Povm",
    "RtiInstance",
    "RtiReport",
    "Scenario",
    "SubnormalizedState",
    "UnboundedError",
    "UniversalBound",
    "basis_state",
    "bell_algebraic_max",
    "bell_bound_from_fod",
    "bell_det_max",
    "bell_value",
    "binary_bob_bounds",
    "cf_exact",
    "chsh_functional",
    "chsh_scenario",
    "classical_sharp_example",
    "close_pair",
    "confusing_outcome",
    "deterministic_box",
    "eig_hermitian",
    "embed_subnormalized",
    "ensemble_average",
    "enumerate_deterministic",
    "epsilon_from_average_distance",
    "extremal_family",
    "extremal_gaps",
    "fidelity",
    "fod_exact",
    "fod_floor_pipeline",
    "fod_witness",
    "fvdg_check",
    "helstrom_error",
    "hermiticity_defect",
    "local_box",
    "max_commutator_entry",
    "maximally_mixed",
    "maximally_mixed_box",
    "mu_objective",
    "optimize_mu",
    "pair_gap_from_mu",
    "partial_trace",
    "pr_box",
    "psd_sqrt",
    "pure_state",
    "quantum_box",
    "rotfeld_check",
    "rti_campaign",
    "rti_commuting_bound",
    "rti_general_bound",
    "sample_density",
    "sample_povm",
    "sample_rti_instance",
    "simplex_solve",
    "singlet",
    "steer",
    "subnormalized_gap",
    "tensor",
    "trace_distance",
    "trace_norm",
    "truncate_ensemble",
    "tsirelson_realization",
    "universal_fod_bound",
    "validate_ns",
    "verify_rti",
    "xz_spin_povm",
]
