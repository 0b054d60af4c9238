"""Conservative two-component Camassa-Holm solver in Lagrangian coordinates."""

from ._chsys import (
    ConfigError,
    ConstraintViolation,
    DiagnosticsRow,
    DomainError,
    Error,
    EulerianState,
    Grid,
    IntegrationError,
    IntegratorConfig,
    J_upper,
    LagrangianState,
    Relabeling,
    StructuralError,
    Trajectory,
    check_in_G,
    compute_kernels,
    d_DM,
    diagnose,
    dM_estimate,
    evolve,
    lagcoord3_residual,
    norm_E,
    norm_E_diff,
    norm_Linf_diff,
    oracles,
    project_F0,
    r_separation,
    relabel,
    rhs,
    run_convergence,
    run_metric_study,
    run_scenario,
    semigroup_T,
    to_eulerian,
    to_lagrangian,
)

__all__ = [name for name in dir() if not name.startswith("_")]
