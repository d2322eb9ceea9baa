"""Locally interacting birth-and-death chains on finite graphs.

Simulation (exact event-driven), regime classification with theorem-backed
justifications, exact small-instance oracles, and statistical verification
suites, all at desk scale.
"""

from .classify import ExcludedCaseError, RegimeReport, classify, predicted_rates
from .exact import (
    TruncatedDistribution,
    drift_GQ,
    drift_log_quarterplane,
    drift_S,
    drift_star_f,
    drift_two_step_S,
    enumerate_dtmc,
    truncated_stationary,
)
from .graphs import (
    Graph,
    GraphError,
    StructureReport,
    analyze,
    build_complete,
    build_cycle,
    build_lattice_torus,
    build_path,
    build_star,
)
from .model import (
    ModelParams,
    build_AQ,
    interaction_sum,
    jump_probabilities,
    linear_S,
    log_total_rate,
    log_weight,
    positive_definite,
    pd_verdict,
    potential,
    potentials,
    quadratic_Q,
    spectral_summary,
    star_potential_identity_residual,
)
from .simulate import (
    ProxySettings,
    RunSummary,
    StopRule,
    Trajectory,
    ctmc_step,
    detect_event_B,
    detect_pair_event,
    dtmc_step,
    explosion_proxy,
    replicate,
    run,
)

__version__ = "0.1.0"
