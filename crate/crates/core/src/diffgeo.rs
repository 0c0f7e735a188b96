//! Pointwise Frenet–Serret geometry of streamlines.
//!
//! For a steady field the streamline through `x` has velocity `u`,
//! acceleration `a = (u·∇)u` and jerk `j = (∇u) a + ∇²u[u, u]`, all available
//! from a single [`FieldJet`]. Everything here is a function of position:
//! no trajectory is integrated.
//!
//! The stretching criterion is `S = ∂_z(κ |u|²)`. Writing `F = κ|u|² = |a_⊥|`
//! with `a_⊥ = a − (a·τ)τ`, its derivative along the flow is
//! `Ḟ = n·j − α F / |u|`, so `S = Ḟ / |u|` needs nothing beyond `u`, `∇u`
//! and `∇²u`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fieldkit::{default_fd_step, FieldJet, VelocityField};
use crate::linalg::Vec3;

/// Thresholds shared by the pointwise computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TolerancePolicy {
    /// Speeds at or below this are stagnation points (field velocity units).
    pub eps_stagnation: f64,
    /// Curvature below this (per unit length) is treated as a straight streamline.
    pub eps_kappa: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// `α` must exceed `eps_alpha · |a|` to count as stretching.
    pub eps_alpha: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            eps_stagnation: 1e-10,
            eps_kappa: 1e-12,
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            eps_alpha: 1e-12,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.eps_stagnation,
            self.eps_kappa,
            self.abs_tol,
            self.rel_tol,
            self.eps_alpha,
        ];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "tolerances must be positive and finite".into(),
            ))
        }
    }

    /// Cancellation-aware bound for `|S|`: the two terms of
    /// `S = ∂_zκ |u|² + 2κα` are compared against their own magnitudes.
    pub fn criterion_bound(&self, dz_kappa: f64, speed: f64, kappa: f64, alpha: f64) -> f64 {
        self.abs_tol + self.rel_tol * (dz_kappa.abs() * speed * speed + 2.0 * kappa * alpha.abs())
    }
}

/// All pointwise streamline geometry at one location.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrenetSample {
    pub x: Vec3,
    /// `|u|`
    pub speed: f64,
    pub tau: Vec3,
    /// `(u·∇)u`
    pub accel: Vec3,
    /// Stretch rate `d|u|/dt = a·τ`.
    pub alpha: f64,
    /// `κ n = a_⊥ / |u|²`
    pub kappa_vec: Vec3,
    pub kappa: f64,
    pub normal: Option<Vec3>,
    pub binormal: Option<Vec3>,
    /// Signed torsion with `b = τ × n`.
    pub torsion: Option<f64>,
    /// `κ |u|²`
    #[serde(rename = "F")]
    pub f: f64,
    /// `∂_z(κ |u|²)`
    #[serde(rename = "S")]
    pub s: f64,
    pub dz_kappa: f64,
    /// Third derivative of the streamline in time.
    pub jerk: Vec3,
    pub curvature_degenerate: bool,
    /// False when the streamline is momentarily straight but `F` has a kink,
    /// so `S` (reported as the symmetric derivative, 0) is not meaningful.
    pub criterion_resolved: bool,
}

/// Builds the sample from an already evaluated jet.
pub fn frenet_from_jet(x: Vec3, jet: &FieldJet, tol: &TolerancePolicy) -> Result<FrenetSample> {
    let u = jet.u;
    let speed = u.norm();
    if !(speed > tol.eps_stagnation) {
        return Err(Error::StagnationPoint { speed });
    }
    let speed2 = speed * speed;
    let tau = u * (1.0 / speed);
    let a = jet.accel();
    let a_dot_u = a.dot(&u);
    let alpha = a_dot_u / speed;
    let a_perp = a - u * (a_dot_u / speed2);
    let f = a_perp.norm();
    let kappa = f / speed2;
    let kappa_vec = a_perp * (1.0 / speed2);
    let jerk = jet.grad_u.mul_vec(&a) + jet.hess_u.contract_twice(&u);
    let curvature_degenerate = !(f > tol.eps_kappa * speed2);

    let (normal, binormal, torsion, s, resolved) = if curvature_degenerate {
        // a_⊥ ≈ 0: F ≈ |t|·|j_⊥| near this point, smooth only if j_⊥ vanishes too
        let j_perp = jerk - u * (jerk.dot(&u) / speed2);
        let resolved = j_perp.norm() / speed <= tol.abs_tol + tol.rel_tol * jerk.norm() / speed;
        (None, None, None, 0.0, resolved)
    } else {
        let n = a_perp * (1.0 / f);
        let b = tau.cross(&n);
        let ua = u.cross(&a);
        let torsion = ua.dot(&jerk) / ua.norm_sq();
        let s = n.dot(&jerk) / speed - alpha * f / speed2;
        (Some(n), Some(b), Some(torsion), s, true)
    };
    let dz_kappa = (s - 2.0 * kappa * alpha) / speed2;

    Ok(FrenetSample {
        x,
        speed,
        tau,
        accel: a,
        alpha,
        kappa_vec,
        kappa,
        normal,
        binormal,
        torsion,
        f,
        s,
        dz_kappa,
        jerk,
        curvature_degenerate,
        criterion_resolved: resolved,
    })
}

pub fn frenet_sample(field: &VelocityField, x: &Vec3, tol: &TolerancePolicy) -> Result<FrenetSample> {
    let jet = field.jet(x)?;
    frenet_from_jet(*x, &jet, tol)
}

/// `(S, ∂_zκ)` at `x`.
pub fn criterion(field: &VelocityField, x: &Vec3, tol: &TolerancePolicy) -> Result<(f64, f64)> {
    let s = frenet_sample(field, x, tol)?;
    Ok((s.s, s.dz_kappa))
}

/// Normal acceleration magnitude `F = κ|u|²` as a plain field.
pub fn normal_accel(field: &VelocityField, x: &Vec3) -> Result<f64> {
    let jet = field.jet(x)?;
    let u = jet.u;
    let speed2 = u.norm_sq();
    if !(speed2 > 0.0) {
        return Err(Error::StagnationPoint { speed: 0.0 });
    }
    let a = jet.accel();
    Ok((a - u * (a.dot(&u) / speed2)).norm())
}

/// Central difference of `F` along the unit tangent: `[F(x+hτ) − F(x−hτ)] / 2h`.
pub fn criterion_fd(field: &VelocityField, x: &Vec3, h: f64, tol: &TolerancePolicy) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let u = field.velocity(x)?;
    let speed = u.norm();
    if !(speed > tol.eps_stagnation) {
        return Err(Error::StagnationPoint { speed });
    }
    let tau = u * (1.0 / speed);
    let fp = normal_accel(field, &(*x + tau * h))?;
    let fm = normal_accel(field, &(*x - tau * h))?;
    Ok((fp - fm) / (2.0 * h))
}

/// [`criterion_fd`] with the default step `cbrt(eps)(1 + |x|)`.
pub fn criterion_fd_default(field: &VelocityField, x: &Vec3, tol: &TolerancePolicy) -> Result<f64> {
    criterion_fd(field, x, default_fd_step(x), tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CandidateStable,
    ViolatesNecessaryCondition,
    NotStretching,
    Degenerate,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [
        Verdict::CandidateStable,
        Verdict::ViolatesNecessaryCondition,
        Verdict::NotStretching,
        Verdict::Degenerate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CandidateStable => "candidate_stable",
            Verdict::ViolatesNecessaryCondition => "violates_necessary_condition",
            Verdict::NotStretching => "not_stretching",
            Verdict::Degenerate => "degenerate",
        }
    }
}

/// Verdict on the necessary condition at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointClass {
    pub x: Vec3,
    pub alpha: f64,
    #[serde(rename = "S")]
    pub criterion_residual: f64,
    pub dz_kappa: f64,
    pub kappa: f64,
    pub is_stretching: bool,
    pub criterion_zero: bool,
    pub dz_kappa_sign_ok: bool,
    pub stagnation: bool,
    pub curvature_degenerate: bool,
    pub verdict: Verdict,
}

pub fn classify_sample(sample: &FrenetSample, tol: &TolerancePolicy) -> PointClass {
    let bound = tol.criterion_bound(sample.dz_kappa, sample.speed, sample.kappa, sample.alpha);
    let criterion_zero = sample.s.abs() <= bound;
    let dz_kappa_sign_ok = sample.dz_kappa <= bound / (sample.speed * sample.speed);
    let is_stretching = sample.alpha > tol.eps_alpha * sample.accel.norm();
    let verdict = if !sample.criterion_resolved {
        Verdict::Degenerate
    } else if !is_stretching {
        Verdict::NotStretching
    } else if criterion_zero {
        Verdict::CandidateStable
    } else {
        Verdict::ViolatesNecessaryCondition
    };
    PointClass {
        x: sample.x,
        alpha: sample.alpha,
        criterion_residual: sample.s,
        dz_kappa: sample.dz_kappa,
        kappa: sample.kappa,
        is_stretching,
        criterion_zero,
        dz_kappa_sign_ok,
        stagnation: false,
        curvature_degenerate: sample.curvature_degenerate,
        verdict,
    }
}

/// Classifies `x`; stagnation points become [`Verdict::Degenerate`] rather than errors.
pub fn classify_point(field: &VelocityField, x: &Vec3, tol: &TolerancePolicy) -> Result<PointClass> {
    match frenet_sample(field, x, tol) {
        Ok(sample) => Ok(classify_sample(&sample, tol)),
        Err(Error::StagnationPoint { .. }) => Ok(PointClass {
            x: *x,
            alpha: f64::NAN,
            criterion_residual: f64::NAN,
            dz_kappa: f64::NAN,
            kappa: f64::NAN,
            is_stretching: false,
            criterion_zero: false,
            dz_kappa_sign_ok: false,
            stagnation: true,
            curvature_degenerate: false,
            verdict: Verdict::Degenerate,
        }),
        Err(e) => Err(e),
    }
}
