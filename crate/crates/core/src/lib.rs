//! Stretching diagnostics for steady three-dimensional velocity fields.
//!
//! Given a prescribed stationary flow `u`, the crate computes the Frenet–Serret
//! geometry of its streamlines pointwise from exact field jets, evaluates the
//! stretching criterion `S = ∂_z(κ |u|²)` (arc-length derivative of the
//! normal acceleration), and runs Lagrangian probes on the flow map: the
//! material-disk perpendicularity defect and Cauchy vorticity transport.
//!
//! * [`fieldkit`]: catalog fields, the expression DSL, jets.
//! * [`diffgeo`]: Frenet samples, criterion, point classification.
//! * [`flowsim`]: streamlines, arc-length maps, flow-map Jacobians, probes.
//! * [`analyze`]: grid classification, closed-form oracles, reports.

pub mod analyze;
pub mod diffgeo;
mod error;
pub mod fieldkit;
pub mod flowsim;
pub mod linalg;

pub use error::{Error, ParseError, Result};
pub use linalg::{Mat3, Tens3, Vec3};
