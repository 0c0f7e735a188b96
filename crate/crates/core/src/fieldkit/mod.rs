//! Steady velocity fields: the built-in catalog, the expression DSL, and
//! second-order jets (value, Jacobian, Hessian) by forward differentiation
//! with a central-difference cross-check.

mod catalog;
pub mod expr;
mod field;
mod jet;

pub use catalog::{CatalogEntry, CATALOG_NAMES};
pub use expr::{parse_components, parse_expr, BinOp, Expr, Func};
pub use field::{
    default_fd_step, eval_jet, eval_jet_fd, parse_field, FieldJet, FieldSource, PressureSource,
    VelocityField,
};
pub use jet::{Jet2, Scalar};

/// Built-in field by name; see [`CATALOG_NAMES`].
pub fn catalog(name: &str, params: &[f64]) -> crate::Result<VelocityField> {
    VelocityField::catalog(name, params)
}
