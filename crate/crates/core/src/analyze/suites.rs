//! Built-in verification suites with fixed inputs.

use serde::Serialize;

use super::audit::sample_points;
use super::oracles::{
    corollary_oracle, corollary_rational, expm, helix_oracle, pressure_identity_check, remark12_check,
    section3_oracle, section3_point, OracleComparison,
};
use crate::diffgeo::{frenet_sample, TolerancePolicy};
use crate::error::{Error, Result};
use crate::fieldkit::VelocityField;
use crate::flowsim::{cauchy_vorticity, flow_map_jacobian, IntegratorConfig};
use crate::linalg::{Mat3, Vec3};

pub const SUITE_NAMES: [&str; 6] = ["corollary", "section3", "helix", "pressure", "remark12", "flowmap"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    /// Asserted comparisons.
    pub rows: Vec<OracleComparison>,
    /// Reported only; never affects `pass`.
    pub notes: Vec<OracleComparison>,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    pub pass: bool,
}

impl SuiteReport {
    fn new(name: &str, rows: Vec<OracleComparison>, notes: Vec<OracleComparison>) -> Self {
        SuiteReport {
            name: name.to_string(),
            max_abs_dev: rows.iter().map(|r| r.abs_dev).fold(0.0, f64::max),
            max_rel_dev: rows.iter().map(|r| r.rel_dev).fold(0.0, f64::max),
            pass: !rows.is_empty() && rows.iter().all(|r| r.pass),
            rows,
            notes,
        }
    }
}

pub fn run_suite(name: &str) -> Result<SuiteReport> {
    match name {
        "corollary" => corollary_suite(),
        "section3" => hyperbola_suite(),
        "helix" => helix_suite(),
        "pressure" => pressure_suite(),
        "remark12" => transport_suite(),
        "flowmap" => flowmap_suite(),
        _ => Err(Error::InvalidArgument(format!(
            "unknown suite '{name}' (expected one of {})",
            SUITE_NAMES.join(", ")
        ))),
    }
}

const REL: f64 = 1e-10;
const FLOOR: f64 = 1e-14;

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

fn quadrant(x1: f64, x2: f64) -> &'static str {
    match (x1 > 0.0, x2 > 0.0) {
        (true, true) => "q1",
        (false, true) => "q2",
        (false, false) => "q3",
        (true, false) => "q4",
    }
}

fn corollary_suite() -> Result<SuiteReport> {
    let paper = VelocityField::catalog("planar_strain_paper", &[])?;
    let stated = VelocityField::catalog("planar_strain_stated", &[])?;
    let tol = TolerancePolicy::default();
    let mut rows = Vec::new();
    for x1 in linspace(0.1, 3.0, 12) {
        for x2 in linspace(0.1, 3.0, 12) {
            let x = Vec3::new(x1, x2, 0.0);
            let oracle = corollary_oracle(x1, x2)?;
            let s = frenet_sample(&paper, &x, &tol)?.s;
            rows.push(OracleComparison::new("planar_strain_paper", vec![x1, x2], s, oracle, FLOOR, REL));
            let s = frenet_sample(&stated, &x, &tol)?.s;
            rows.push(OracleComparison::new("planar_strain_stated", vec![x1, x2], s, -oracle, FLOOR, REL));
        }
    }
    // The field is symmetric under x1 -> -x1 and x2 -> -x2, so S is even in
    // each coordinate while the rational form is odd: they differ by the
    // quadrant parity sign(x1 x2).
    let mut notes = Vec::new();
    for (x1, x2) in [(-2.0, 1.0), (-0.5, -1.5), (1.2, -0.3), (-1.0, 1.0)] {
        let x = Vec3::new(x1, x2, 0.0);
        let s = frenet_sample(&paper, &x, &tol)?.s;
        let label = format!("planar_strain_paper_{}", quadrant(x1, x2));
        let reflected = corollary_rational(x1.abs(), x2.abs());
        rows.push(OracleComparison::new(label.clone(), vec![x1, x2], s, reflected, FLOOR, REL));
        notes.push(OracleComparison::new(
            format!("{label}_rational"),
            vec![x1, x2],
            s,
            corollary_rational(x1, x2),
            FLOOR,
            REL,
        ));
    }
    Ok(SuiteReport::new("corollary", rows, notes))
}

fn hyperbola_suite() -> Result<SuiteReport> {
    let field = VelocityField::catalog("planar_strain_paper", &[])?;
    let tol = TolerancePolicy::default();
    let mut rows = Vec::new();
    for r in linspace(0.5, 2.0, 20) {
        for t in linspace(0.0, 1.0, 20) {
            let o = section3_oracle(r, t)?;
            let s = frenet_sample(&field, &section3_point(r, t), &tol)?;
            let p = vec![r, t];
            let mut row = |label: &str, computed: f64, oracle: f64| {
                rows.push(OracleComparison::new(label, p.clone(), computed, oracle, FLOOR, REL));
            };
            row("kappa", s.kappa, o.kappa);
            row("dz_kappa", s.dz_kappa, o.dz_kappa);
            row("speed_sq", s.speed * s.speed, o.speed_sq);
            row("alpha", s.alpha, o.alpha);
            let identity = o.dz_kappa * o.speed_sq + 2.0 * o.kappa * o.alpha;
            rows.push(OracleComparison::new("identity", p.clone(), identity, o.criterion, 1e-12, 0.0));
        }
    }
    Ok(SuiteReport::new("section3", rows, Vec::new()))
}

fn helix_suite() -> Result<SuiteReport> {
    let tol = TolerancePolicy::default();
    let mut rows = Vec::new();
    for radius in [0.5, 1.0, 2.0, 3.0, 4.0] {
        for pitch in [-1.0, 0.0, 0.5, 2.0] {
            let field = VelocityField::catalog("helical", &[pitch])?;
            let s = frenet_sample(&field, &Vec3::new(radius, 0.0, 0.0), &tol)?;
            let o = helix_oracle(radius, pitch)?;
            let p = vec![radius, pitch];
            rows.push(OracleComparison::new("kappa", p.clone(), s.kappa, o.kappa, FLOOR, REL));
            let torsion = s.torsion.unwrap_or(f64::NAN);
            rows.push(OracleComparison::new("torsion", p, torsion, o.torsion, FLOOR, REL));
        }
    }
    Ok(SuiteReport::new("helix", rows, Vec::new()))
}

/// Points where the Frenet frame is well conditioned enough for the
/// derivative identity: speed and normal acceleration not small.
pub fn well_conditioned(field: &VelocityField, x: &Vec3, tol: &TolerancePolicy) -> bool {
    match frenet_sample(field, x, tol) {
        Ok(s) => !s.curvature_degenerate && s.speed >= 1e-3 && s.f >= 1e-3 * s.accel.norm().max(1.0),
        Err(_) => false,
    }
}

pub const PRESSURE_TOL: f64 = 1e-9;

fn pressure_suite() -> Result<SuiteReport> {
    let tol = TolerancePolicy::default();
    let fields = [
        VelocityField::catalog("planar_strain_paper", &[])?,
        VelocityField::catalog("planar_strain_stated", &[])?,
        VelocityField::catalog("axisym_strain", &[])?,
        VelocityField::catalog("abc", &[1.0, 1.0, 1.0])?,
    ];
    let mut rows = Vec::new();
    for (i, field) in fields.iter().enumerate() {
        let pts = sample_points(100 + i as u64, 400, [-2.0; 3], [2.0; 3]);
        let label = field.label();
        for x in pts.iter().filter(|x| well_conditioned(field, x, &tol)).take(50) {
            let r = pressure_identity_check(field, x, &tol)?;
            let p = x.0.to_vec();
            for (name, v) in [("r_tau", r.r_tau), ("r_n", r.r_n), ("r_b", r.r_b), ("r_dz", r.r_dz)] {
                rows.push(OracleComparison::new(format!("{label}:{name}"), p.clone(), v, 0.0, PRESSURE_TOL, 0.0));
            }
        }
    }
    Ok(SuiteReport::new("pressure", rows, Vec::new()))
}

type Profile = fn(f64) -> f64;

fn transport_suite() -> Result<SuiteReport> {
    let cfg = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..Default::default()
    };
    let profiles: [(&str, Profile); 3] = [
        ("r^2", |r| r * r),
        ("r", |r| r),
        ("r*exp(-r^2)", |r| r * (-r * r).exp()),
    ];
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (name, profile) in profiles {
        for r0 in [0.5, 1.0, 2.0] {
            for t in [0.0, 0.25, 0.5, 1.0] {
                let rep = remark12_check(r0, &profile, t, &cfg)?;
                let mut transport = rep.transport;
                transport.label = format!("azimuthal {name}");
                rows.push(transport);
                let mut claim = rep.claim_vs_transport;
                claim.label = format!("claim {name}");
                notes.push(claim);
            }
        }
    }
    let field = VelocityField::catalog("axisym_strain", &[])?;
    for (r0, z0) in [(0.5, 0.0), (1.0, 1.0), (2.0, -0.5)] {
        for t in [0.25, 0.5, 1.0] {
            let w0 = 1.0 + r0;
            let w = cauchy_vorticity(&field, &Vec3::new(r0, 0.0, z0), &Vec3::new(0.0, 0.0, w0), t, &cfg)?;
            let oracle = (2.0 * t).exp() * w0;
            rows.push(OracleComparison::new("axial", vec![r0, z0, t], w[2], oracle, 1e-7, 0.0));
        }
    }
    Ok(SuiteReport::new("remark12", rows, notes))
}

fn flowmap_suite() -> Result<SuiteReport> {
    let cfg = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..Default::default()
    };
    let mut rows = Vec::new();
    let seed = Vec3::new(0.7, -0.4, 0.3);
    for name in ["planar_strain_paper", "planar_strain_stated", "axisym_strain", "rigid_rotation"] {
        let field = VelocityField::catalog(name, &[])?;
        let a = Mat3(field.catalog_entry().and_then(|e| e.linear_gradient()).expect("linear entry"));
        for t in [0.5, 1.0, 2.0] {
            let j = flow_map_jacobian(&field, &seed, t, &cfg)?;
            let dev = j.max_abs_diff(&expm(&a.scale(t)));
            rows.push(OracleComparison::new(name, vec![t], dev, 0.0, 1e-7, 0.0));
        }
    }
    let abc = VelocityField::catalog("abc", &[1.0, 1.0, 1.0])?;
    for x in sample_points(5, 5, [-3.0; 3], [3.0; 3]) {
        let j = flow_map_jacobian(&abc, &x, 2.0, &cfg)?;
        rows.push(OracleComparison::new("abc(1,1,1):det", x.0.to_vec(), j.det(), 1.0, 1e-6, 0.0));
    }
    Ok(SuiteReport::new("flowmap", rows, Vec::new()))
}
