use serde::Serialize;

use super::oracles::OracleComparison;
use crate::diffgeo::{criterion_fd_default, frenet_sample, normal_accel, TolerancePolicy};
use crate::error::{Error, Result};
use crate::fieldkit::VelocityField;
use crate::flowsim::{trajectory_points, IntegratorConfig};
use crate::linalg::Vec3;

/// Agreement required between any two of the three routes to `S`.
pub const PATH_TOL: f64 = 1e-5;

/// `S` at one point along the three computation routes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathComparison {
    pub x: Vec3,
    pub analytic: f64,
    pub finite_difference: f64,
    pub trajectory: f64,
    /// analytic vs FD, analytic vs trajectory, FD vs trajectory
    pub pairs: [OracleComparison; 3],
}

impl PathComparison {
    pub fn pass(&self) -> bool {
        self.pairs.iter().all(|p| p.pass)
    }

    pub fn max_dev(&self) -> f64 {
        self.pairs.iter().map(|p| p.abs_dev).fold(0.0, f64::max)
    }
}

/// Tight integration settings used for the trajectory route.
pub fn trajectory_config() -> IntegratorConfig {
    IntegratorConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        ..Default::default()
    }
}

/// Weights of the derivative at `x0` of the Lagrange interpolant through `nodes`.
fn lagrange_derivative_weights(nodes: &[f64], x0: f64) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|k| {
            let denom: f64 = (0..n).filter(|&m| m != k).map(|m| nodes[k] - nodes[m]).product();
            let mut num = 0.0;
            for skip in (0..n).filter(|&m| m != k) {
                num += (0..n)
                    .filter(|&m| m != k && m != skip)
                    .map(|m| x0 - nodes[m])
                    .product::<f64>();
            }
            num / denom
        })
        .collect()
}

/// `dF/dz` at `x` from `F = κ|u|²` sampled at five points of the integrated
/// trajectory, differentiated against the integrated arc length.
pub fn trajectory_criterion(field: &VelocityField, x: &Vec3, cfg: &IntegratorConfig) -> Result<f64> {
    let jet = field.jet(x)?;
    let g = jet.grad_u.max_abs();
    let dt = if g > 0.0 { 0.02 / g } else { 0.02 };
    let back = trajectory_points(field, x, &[-dt, -2.0 * dt], cfg)?;
    let fwd = trajectory_points(field, x, &[dt, 2.0 * dt], cfg)?;
    let pts = [back[1], back[0], (*x, 0.0), fwd[0], fwd[1]];
    let z: Vec<f64> = pts.iter().map(|p| p.1).collect();
    if !z.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::Internal("arc length not increasing along the stencil".into()));
    }
    let w = lagrange_derivative_weights(&z, 0.0);
    let mut d = 0.0;
    for (p, wk) in pts.iter().zip(&w) {
        d += wk * normal_accel(field, &p.0)?;
    }
    Ok(d)
}

pub fn compare_point(field: &VelocityField, x: &Vec3, tol: &TolerancePolicy, cfg: &IntegratorConfig) -> Result<PathComparison> {
    let sample = frenet_sample(field, x, tol)?;
    if sample.curvature_degenerate {
        return Err(Error::InvalidArgument(format!(
            "point {x} has degenerate curvature; the three routes need a defined normal"
        )));
    }
    let analytic = sample.s;
    let fd = criterion_fd_default(field, x, tol)?;
    let traj = trajectory_criterion(field, x, cfg)?;
    let point = x.0.to_vec();
    let pair = |label: &str, a: f64, b: f64| OracleComparison::new(label, point.clone(), a, b, PATH_TOL, PATH_TOL);
    Ok(PathComparison {
        x: *x,
        analytic,
        finite_difference: fd,
        trajectory: traj,
        pairs: [
            pair("analytic_vs_fd", fd, analytic),
            pair("analytic_vs_trajectory", traj, analytic),
            pair("fd_vs_trajectory", traj, fd),
        ],
    })
}

/// Three-route comparison of `S` at each point.
pub fn compare_paths(
    field: &VelocityField,
    points: &[Vec3],
    tol: &TolerancePolicy,
    cfg: &IntegratorConfig,
) -> Result<Vec<PathComparison>> {
    points.iter().map(|x| compare_point(field, x, tol, cfg)).collect()
}
