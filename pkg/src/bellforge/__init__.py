"""Seed-based multipartite Bell inequalities: construction, bound certification, quantum violations."""
from .analytic import (
    CertificationError,
    ConstructionError,
    ghz_angles,
    ghz_value_closed,
    ghz_violation,
    hardy_measurements,
    symmetric_hardy_construction,
)
from .behavior import (
    Behavior,
    BehaviorError,
    DeterministicStrategy,
    all_ones_strategy,
    bipartite_ns_vertices,
    check_behavior,
    enumerate_deterministic,
    ns_box,
    pr_box,
    product_behavior,
    uniform_behavior,
)
from .bounds import BoundCertificate, biseparable_bound_tripartite, grouped_bound_sampled, local_bound
from .functional import (
    BellFunctional,
    Seed,
    SeedError,
    TrivialInequalityWarning,
    build_centered,
    build_m_separable,
    build_mu_family,
    build_recursive_symmetric,
    build_symmetric,
    chsh_variant,
    evaluate,
    lift,
    tilted_chsh,
    tripartite_seed,
    validate_seed,
)
from .optimize import OptimizationResult, ScanSummary, optimize, scan_random_states
from .quantum import (
    MeasurementAssignment,
    PureState,
    QubitMeasurement,
    StateError,
    canonical_three_qubit_state,
    behavior_from_state,
    ghz_state,
    haar_random_state,
)

__all__ = [
    "Behavior",
    "BehaviorError",
    "BellFunctional",
    "BoundCertificate",
    "CertificationError",
    "ConstructionError",
    "DeterministicStrategy",
    "MeasurementAssignment",
    "OptimizationResult",
    "PureState",
    "QubitMeasurement",
    "ScanSummary",
    "Seed",
    "SeedError",
    "StateError",
    "TrivialInequalityWarning",
    "canonical_three_qubit_state",
    "all_ones_strategy",
    "behavior_from_state",
    "bipartite_ns_vertices",
    "biseparable_bound_tripartite",
    "build_centered",
    "build_m_separable",
    "build_mu_family",
    "build_recursive_symmetric",
    "build_symmetric",
    "check_behavior",
    "chsh_variant",
    "enumerate_deterministic",
    "evaluate",
    "ghz_angles",
    "ghz_state",
    "ghz_value_closed",
    "ghz_violation",
    "grouped_bound_sampled",
    "haar_random_state",
    "hardy_measurements",
    "lift",
    "local_bound",
    "ns_box",
    "optimize",
    "pr_box",
    "product_behavior",
    "scan_random_states",
    "symmetric_hardy_construction",
    "tilted_chsh",
    "tripartite_seed",
    "uniform_behavior",
    "validate_seed",
]

__version__ = "0.1.0"
