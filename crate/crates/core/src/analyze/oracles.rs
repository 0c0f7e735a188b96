//! Closed-form reference values and identity checks.

use serde::Serialize;

use crate::diffgeo::{frenet_from_jet, TolerancePolicy};
use crate::error::{Error, Result};
use crate::fieldkit::VelocityField;
use crate::flowsim::{flow_map_state, IntegratorConfig};
use crate::linalg::{Mat3, Vec3};

/// A computed value checked against a reference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    pub label: String,
    pub point: Vec<f64>,
    pub computed: f64,
    pub oracle: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub pass: bool,
}

impl OracleComparison {
    /// Passes iff `|computed − oracle| ≤ tol_abs + tol_rel·|oracle|`.
    pub fn new(label: impl Into<String>, point: Vec<f64>, computed: f64, oracle: f64, tol_abs: f64, tol_rel: f64) -> Self {
        let abs_dev = (computed - oracle).abs();
        let rel_dev = if oracle != 0.0 { abs_dev / oracle.abs() } else { abs_dev };
        OracleComparison {
            label: label.into(),
            point,
            computed,
            oracle,
            abs_dev,
            rel_dev,
            tol_abs,
            tol_rel,
            pass: abs_dev <= tol_abs + tol_rel * oracle.abs(),
        }
    }
}

/// `−tanh(2t)/cosh(2t)` with `t = ½ log(x1/x2)`; requires positive inputs.
pub fn corollary_oracle(x1: f64, x2: f64) -> Result<f64> {
    if !(x1 > 0.0 && x2 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "corollary oracle needs x1, x2 > 0, got ({x1}, {x2})"
        )));
    }
    let t = 0.5 * (x1 / x2).ln();
    Ok(-(2.0 * t).tanh() / (2.0 * t).cosh())
}

/// Rational form `−2 x1 x2 (x1² − x2²) / (x1² + x2²)²`, valid off the origin.
pub fn corollary_rational(x1: f64, x2: f64) -> f64 {
    let r2 = x1 * x1 + x2 * x2;
    -2.0 * x1 * x2 * (x1 * x1 - x2 * x2) / (r2 * r2)
}

/// Closed-form geometry along the hyperbola `(r eᵗ, r e⁻ᵗ, 0)` of the flow `(x, −y, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Section3Values {
    pub kappa: f64,
    pub dz_kappa: f64,
    pub speed_sq: f64,
    /// Signed stretch rate `√2 r sinh 2t / √(cosh 2t)`.
    pub alpha: f64,
    /// `−tanh 2t / cosh 2t`
    pub criterion: f64,
}

pub fn section3_oracle(r: f64, t: f64) -> Result<Section3Values> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("r must be positive, got {r}")));
    }
    let (sh, ch) = ((2.0 * t).sinh(), (2.0 * t).cosh());
    let th = (2.0 * t).tanh();
    let sqrt2 = std::f64::consts::SQRT_2;
    Ok(Section3Values {
        kappa: 1.0 / (sqrt2 * r * ch.powf(1.5)),
        dz_kappa: -3.0 * th / (2.0 * r * r * ch * ch),
        speed_sq: 2.0 * r * r * ch,
        alpha: sqrt2 * r * sh / ch.sqrt(),
        criterion: -th / ch,
    })
}

/// The point of the section-3 hyperbola at parameters `(r, t)`.
pub fn section3_point(r: f64, t: f64) -> Vec3 {
    Vec3::new(r * t.exp(), r * (-t).exp(), 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HelixValues {
    pub kappa: f64,
    pub torsion: f64,
}

/// Curvature and torsion of `(R cos s, R sin s, c s)`.
pub fn helix_oracle(radius: f64, pitch: f64) -> Result<HelixValues> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("helix radius must be positive, got {radius}")));
    }
    let d = radius * radius + pitch * pitch;
    Ok(HelixValues {
        kappa: radius / d,
        torsion: pitch / d,
    })
}

/// Residuals of the steady-Euler pressure identities along a streamline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PressureResiduals {
    pub x: Vec3,
    /// `|−∇p·τ − α|`
    pub r_tau: f64,
    /// `|−∇p·n − κ|u|²|`
    pub r_n: f64,
    /// `|∇p·b|`
    pub r_b: f64,
    /// `|−∂_z(∇p·n) − (∂_zκ |u|² + 2κα)|`
    pub r_dz: f64,
    pub degenerate: bool,
}

impl PressureResiduals {
    pub fn max(&self) -> f64 {
        self.r_tau.max(self.r_n).max(self.r_b).max(self.r_dz)
    }
}

pub fn pressure_identity_check(field: &VelocityField, x: &Vec3, tol: &TolerancePolicy) -> Result<PressureResiduals> {
    let jet = field.jet(x)?;
    let p = field.pressure_jet(x)?;
    let s = frenet_from_jet(*x, &jet, tol)?;
    let grad_p = Vec3(p.g);
    let r_tau = (-grad_p.dot(&s.tau) - s.alpha).abs();
    let (Some(n), Some(b)) = (s.normal, s.binormal) else {
        return Ok(PressureResiduals {
            x: *x,
            r_tau,
            r_n: 0.0,
            r_b: 0.0,
            r_dz: 0.0,
            degenerate: true,
        });
    };
    let r_n = (-grad_p.dot(&n) - s.f).abs();
    let r_b = grad_p.dot(&b).abs();

    // d/dt of a_⊥ and n along the streamline
    let u = jet.u;
    let a = s.accel;
    let j = s.jerk;
    let u2 = u.norm_sq();
    let au = a.dot(&u);
    let a_perp_dot = j - u * ((j.dot(&u) + a.norm_sq()) / u2) - a * (au / u2) + u * (2.0 * au * au / (u2 * u2));
    let f_dot = s.s * s.speed;
    let n_dot = (a_perp_dot - n * f_dot) * (1.0 / s.f);
    let hess_p = Mat3(p.h);
    let d_dt = hess_p.mul_vec(&u).dot(&n) + grad_p.dot(&n_dot);
    let lhs = -d_dt / s.speed;
    let rhs = s.dz_kappa * u2 + 2.0 * s.kappa * s.alpha;
    Ok(PressureResiduals {
        x: *x,
        r_tau,
        r_n,
        r_b,
        r_dz: (lhs - rhs).abs(),
        degenerate: false,
    })
}

/// Azimuthal vorticity under the axisymmetric strain `(−x, −y, 2z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Remark12Report {
    pub r0: f64,
    pub t: f64,
    pub advected_radius: f64,
    /// `eᵗ ω₀(e⁻ᵗ r₀)`
    pub claimed: f64,
    /// `e⁻ᵗ ω₀(r₀)`, from material conservation of `ω_θ / r`
    pub characteristics: f64,
    /// `J(t) ω₀(r₀) e_θ` projected on `e_θ` at the advected point
    pub numerical: f64,
    /// Characteristics vs numerical (asserted).
    pub transport: OracleComparison,
    /// Claimed vs characteristics (reported only).
    pub claim_vs_transport: OracleComparison,
}

pub const REMARK12_TOL: f64 = 1e-7;

pub fn remark12_check(
    r0: f64,
    profile: &dyn Fn(f64) -> f64,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<Remark12Report> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidArgument(format!("r0 must be positive, got {r0}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t must be finite and non-negative, got {t}")));
    }
    let field = VelocityField::catalog("axisym_strain", &[])?;
    let seed = Vec3::new(r0, 0.0, 0.0);
    let w0 = profile(r0);
    let omega0 = Vec3::new(0.0, w0, 0.0);
    let advected_radius = (-t).exp() * r0;
    let claimed = t.exp() * profile(advected_radius);
    let characteristics = (-t).exp() * w0;
    let numerical = if t == 0.0 {
        w0
    } else {
        let st = flow_map_state(&field, &seed, t, cfg)?;
        let w = st.jacobian.mul_vec(&omega0);
        let rho = st.x[0].hypot(st.x[1]);
        let e_theta = Vec3::new(-st.x[1] / rho, st.x[0] / rho, 0.0);
        w.dot(&e_theta)
    };
    let point = vec![r0, t];
    Ok(Remark12Report {
        r0,
        t,
        advected_radius,
        claimed,
        characteristics,
        numerical,
        transport: OracleComparison::new("transport", point.clone(), numerical, characteristics, REMARK12_TOL, 0.0),
        claim_vs_transport: OracleComparison::new("claim", point, claimed, characteristics, REMARK12_TOL, 0.0),
    })
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(a: &Mat3) -> Mat3 {
    let norm = a.0.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let m = a.scale(scale);
    let mut term = Mat3::IDENTITY;
    let mut sum = Mat3::IDENTITY;
    for k in 1..=20 {
        term = term.mul_mat(&m).scale(1.0 / k as f64);
        sum = sum + term;
    }
    for _ in 0..squarings {
        sum = sum.mul_mat(&sum);
    }
    sum
}
