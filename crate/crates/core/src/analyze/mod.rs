//! Verification and reporting: grid classification, closed-form oracles,
//! pressure identities, cross-route comparisons and the built-in suites.

mod audit;
mod classify;
mod compare;
mod oracles;
pub mod report;
mod suites;

pub use audit::{audit_field, jet_deviation, sample_points, AuditReport, JetDeviation, GRAD_TOL, HESS_TOL};
pub use classify::{classify_grid, classify_grid_with_workers, ClassificationReport, GridSpec};
pub use compare::{compare_paths, compare_point, trajectory_config, trajectory_criterion, PathComparison, PATH_TOL};
pub use oracles::{
    corollary_oracle, corollary_rational, expm, helix_oracle, pressure_identity_check, remark12_check,
    section3_oracle, section3_point, HelixValues, OracleComparison, PressureResiduals, Remark12Report,
    Section3Values, REMARK12_TOL,
};
pub use suites::{run_suite, well_conditioned, SuiteReport, PRESSURE_TOL, SUITE_NAMES};
