use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fieldkit::{default_fd_step, FieldJet, VelocityField};
use crate::linalg::Vec3;

pub const GRAD_TOL: f64 = 1e-6;
pub const HESS_TOL: f64 = 1e-4;

/// Reproducible uniform samples in the box `[lo, hi]`.
pub fn sample_points(seed: u64, n: usize, lo: [f64; 3], hi: [f64; 3]) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Vec3([0, 1, 2].map(|k| if lo[k] < hi[k] { rng.gen_range(lo[k]..hi[k]) } else { lo[k] })))
        .collect()
}

/// Derivative deviations between exact and finite-difference jets at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JetDeviation {
    pub x: Vec3,
    /// `max|∇u_fd − ∇u| / max(1, max|∇u|)`
    pub grad_rel: f64,
    /// `max|∇²u_fd − ∇²u| / max(1, max|∇²u|)`
    pub hess_rel: f64,
    /// Largest `|H_ijk − H_ikj|` of the exact Hessian.
    pub hess_asymmetry: f64,
    pub divergence: f64,
}

pub fn jet_deviation(exact: &FieldJet, fd: &FieldJet, x: &Vec3) -> JetDeviation {
    JetDeviation {
        x: *x,
        grad_rel: exact.grad_u.max_abs_diff(&fd.grad_u) / exact.grad_u.max_abs().max(1.0),
        hess_rel: exact.hess_u.max_abs_diff(&fd.hess_u) / exact.hess_u.max_abs().max(1.0),
        hess_asymmetry: exact.hess_u.asymmetry(),
        divergence: exact.divergence(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub field: String,
    pub rows: Vec<JetDeviation>,
    /// Points where the field could not be evaluated.
    pub skipped: usize,
    pub max_grad_rel: f64,
    pub max_hess_rel: f64,
    pub pass: bool,
}

/// Exact-vs-FD jet audit. `step` overrides the default FD step.
pub fn audit_field(field: &VelocityField, points: &[Vec3], step: Option<f64>) -> Result<AuditReport> {
    let mut rows = Vec::with_capacity(points.len());
    let mut skipped = 0;
    for x in points {
        let h = step.unwrap_or_else(|| default_fd_step(x));
        match (field.jet(x), field.jet_fd(x, h)) {
            (Ok(exact), Ok(fd)) => rows.push(jet_deviation(&exact, &fd, x)),
            (Err(Error::Domain { .. }), _) | (_, Err(Error::Domain { .. })) => skipped += 1,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let max_grad_rel = rows.iter().map(|r| r.grad_rel).fold(0.0, f64::max);
    let max_hess_rel = rows.iter().map(|r| r.hess_rel).fold(0.0, f64::max);
    Ok(AuditReport {
        field: field.label(),
        pass: !rows.is_empty() && max_grad_rel <= GRAD_TOL && max_hess_rel <= HESS_TOL,
        rows,
        skipped,
        max_grad_rel,
        max_hess_rel,
    })
}
