use serde::Serialize;

use super::catalog::CatalogEntry;
use super::expr::{parse_components, parse_expr, Expr};
use super::jet::{Jet2, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Tens3, Vec3};

/// Velocity with its first and second spatial derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldJet {
    pub u: Vec3,
    /// `grad_u[i][j] = d u_i / d x_j`
    pub grad_u: Mat3,
    /// `hess_u[i][j][k] = d^2 u_i / (d x_j d x_k)`
    pub hess_u: Tens3,
}

impl FieldJet {
    /// Convective acceleration `(u·∇)u`.
    pub fn accel(&self) -> Vec3 {
        self.grad_u.mul_vec(&self.u)
    }

    pub fn divergence(&self) -> f64 {
        self.grad_u.trace()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldSource {
    Catalog(CatalogEntry),
    Parsed(Box<[Expr; 3]>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PressureSource {
    Catalog(CatalogEntry),
    Parsed(Expr),
}

/// An immutable steady velocity field.
///
/// The field evaluates to `scale · u_source(x)`; the scale lets callers
/// reverse time (`-1`) or test scaling laws without rewriting expressions.
/// An attached pressure is scaled by `scale²` so that `(u·∇)u = -∇p` is kept.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    source: FieldSource,
    scale: f64,
    divergence_free: bool,
    pressure: Option<PressureSource>,
}

impl VelocityField {
    /// Looks up a built-in field by name.
    pub fn catalog(name: &str, params: &[f64]) -> Result<Self> {
        Ok(Self::from_entry(CatalogEntry::from_name(name, params)?))
    }

    pub fn from_entry(entry: CatalogEntry) -> Self {
        VelocityField {
            source: FieldSource::Catalog(entry),
            scale: 1.0,
            divergence_free: true,
            pressure: Some(PressureSource::Catalog(entry)),
        }
    }

    /// Parses `"ux, uy, uz"` in the field DSL.
    pub fn parse(source: &str) -> Result<Self> {
        let comps = parse_components(source)?;
        Ok(VelocityField {
            source: FieldSource::Parsed(Box::new(comps)),
            scale: 1.0,
            divergence_free: false,
            pressure: None,
        })
    }

    /// Attaches a pressure expression in the field DSL.
    pub fn with_pressure(mut self, source: &str) -> Result<Self> {
        self.pressure = Some(PressureSource::Parsed(parse_expr(source)?));
        Ok(self)
    }

    /// Flags the field divergence-free after checking `|tr ∇u| ≤ 1e-10 ‖∇u‖`
    /// at each sample point.
    pub fn declare_divergence_free(mut self, samples: &[Vec3]) -> Result<Self> {
        for x in samples {
            let jet = self.jet(x)?;
            let div = jet.divergence().abs();
            if div > 1e-10 * jet.grad_u.max_abs().max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidArgument(format!(
                    "field is not divergence-free at {x}: div u = {div:e}"
                )));
            }
        }
        self.divergence_free = true;
        Ok(self)
    }

    /// The same field multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.scale *= lambda;
        out
    }

    pub fn reversed(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn source(&self) -> &FieldSource {
        &self.source
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub fn has_pressure(&self) -> bool {
        self.pressure.is_some()
    }

    pub fn catalog_entry(&self) -> Option<CatalogEntry> {
        match &self.source {
            FieldSource::Catalog(e) => Some(*e),
            FieldSource::Parsed(_) => None,
        }
    }

    /// Human-readable descriptor used in reports.
    pub fn label(&self) -> String {
        let base = match &self.source {
            FieldSource::Catalog(e) => e.label(),
            FieldSource::Parsed(c) => format!("{}, {}, {}", c[0], c[1], c[2]),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{:?} * [{base}]", self.scale)
        }
    }

    fn components<S: Scalar>(&self, vars: &[S; 3]) -> Result<[S; 3]> {
        let raw = match &self.source {
            FieldSource::Catalog(e) => {
                let u = e.velocity(vars);
                if let Some(i) = (0..3).find(|&i| !u[i].is_finite()) {
                    return Err(Error::Domain {
                        expr: format!("{} component {i}", e.name()),
                    });
                }
                u
            }
            FieldSource::Parsed(c) => [c[0].eval(vars)?, c[1].eval(vars)?, c[2].eval(vars)?],
        };
        if self.scale == 1.0 {
            Ok(raw)
        } else {
            let s = S::constant(self.scale);
            Ok([s * raw[0], s * raw[1], s * raw[2]])
        }
    }

    /// Velocity only.
    pub fn velocity(&self, x: &Vec3) -> Result<Vec3> {
        Ok(Vec3(self.components::<f64>(&x.0)?))
    }

    /// Exact velocity jet by second-order forward differentiation.
    pub fn jet(&self, x: &Vec3) -> Result<FieldJet> {
        let vars = [
            Jet2::variable(0, x[0]),
            Jet2::variable(1, x[1]),
            Jet2::variable(2, x[2]),
        ];
        let comps = self.components(&vars)?;
        let mut out = FieldJet {
            u: Vec3::ZERO,
            grad_u: Mat3::ZERO,
            hess_u: Tens3::ZERO,
        };
        for (i, c) in comps.iter().enumerate() {
            out.u[i] = c.v;
            out.grad_u.0[i] = c.g;
            out.hess_u.0[i] = c.h;
        }
        Ok(out)
    }

    /// Central-difference jet. `h` must be positive.
    pub fn jet_fd(&self, x: &Vec3, h: f64) -> Result<FieldJet> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "finite-difference step must be positive, got {h}"
            )));
        }
        let at = |dx: [f64; 3]| -> Result<Vec3> {
            self.velocity(&Vec3([x[0] + dx[0], x[1] + dx[1], x[2] + dx[2]]))
        };
        let shift = |j: usize, s: f64| {
            let mut d = [0.0; 3];
            d[j] = s;
            d
        };
        let u0 = at([0.0; 3])?;
        let mut grad_u = Mat3::ZERO;
        let mut hess_u = Tens3::ZERO;
        let mut plus = [Vec3::ZERO; 3];
        let mut minus = [Vec3::ZERO; 3];
        for j in 0..3 {
            plus[j] = at(shift(j, h))?;
            minus[j] = at(shift(j, -h))?;
            for i in 0..3 {
                grad_u.0[i][j] = (plus[j][i] - minus[j][i]) / (2.0 * h);
                hess_u.0[i][j][j] = (plus[j][i] - 2.0 * u0[i] + minus[j][i]) / (h * h);
            }
        }
        for j in 0..3 {
            for k in (j + 1)..3 {
                let mut d = [0.0; 3];
                let mut corner = |sj: f64, sk: f64| {
                    d[j] = sj * h;
                    d[k] = sk * h;
                    at(d)
                };
                let pp = corner(1.0, 1.0)?;
                let pm = corner(1.0, -1.0)?;
                let mp = corner(-1.0, 1.0)?;
                let mm = corner(-1.0, -1.0)?;
                for i in 0..3 {
                    let v = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
                    hess_u.0[i][j][k] = v;
                    hess_u.0[i][k][j] = v;
                }
            }
        }
        Ok(FieldJet {
            u: u0,
            grad_u,
            hess_u,
        })
    }

    /// Pressure value, gradient and Hessian, if a pressure is attached.
    pub fn pressure_jet(&self, x: &Vec3) -> Result<Jet2> {
        let vars = [
            Jet2::variable(0, x[0]),
            Jet2::variable(1, x[1]),
            Jet2::variable(2, x[2]),
        ];
        let p = match &self.pressure {
            None => return Err(Error::NoPressure),
            Some(PressureSource::Catalog(e)) => e.pressure(&vars),
            Some(PressureSource::Parsed(expr)) => expr.eval(&vars)?,
        };
        if !Scalar::is_finite(&p) {
            return Err(Error::Domain {
                expr: "pressure".into(),
            });
        }
        let s2 = self.scale * self.scale;
        let mut out = p;
        if s2 != 1.0 {
            out.v *= s2;
            out.g.iter_mut().for_each(|g| *g *= s2);
            out.h.iter_mut().flatten().for_each(|h| *h *= s2);
        }
        Ok(out)
    }
}

/// Default central-difference step `cbrt(eps) · (1 + |x|)`.
pub fn default_fd_step(x: &Vec3) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.norm())
}

/// Parses a field from DSL text.
pub fn parse_field(source: &str) -> Result<VelocityField> {
    VelocityField::parse(source)
}

pub fn eval_jet(field: &VelocityField, x: &Vec3) -> Result<FieldJet> {
    field.jet(x)
}

pub fn eval_jet_fd(field: &VelocityField, x: &Vec3, h: f64) -> Result<FieldJet> {
    field.jet_fd(x, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsed_planar_strain() {
        let f = parse_field("-x, y, 0").unwrap();
        assert_eq!(f.velocity(&Vec3::new(1.0, 2.0, 3.0)).unwrap(), Vec3::new(-1.0, 2.0, 0.0));
        let f = parse_field("-x, -y, 2*z").unwrap();
        assert_eq!(f.velocity(&Vec3::new(0.0, 0.0, 1.0)).unwrap(), Vec3::new(0.0, 0.0, 2.0));
    }

    #[test]
    fn linear_jet_is_exact() {
        let f = VelocityField::catalog("planar_strain_stated", &[]).unwrap();
        let jet = f.jet(&Vec3::new(1.0, 2.0, 0.0)).unwrap();
        assert_eq!(jet.u, Vec3::new(-1.0, 2.0, 0.0));
        assert_eq!(jet.grad_u, Mat3::diag([-1.0, 1.0, 0.0]));
        assert_eq!(jet.hess_u, Tens3::ZERO);
        assert_eq!(jet.divergence(), 0.0);
    }

    #[test]
    fn sine_jet_at_origin() {
        let f = parse_field("sin(x), 0, 0").unwrap();
        let jet = f.jet(&Vec3::ZERO).unwrap();
        assert_eq!(jet.u, Vec3::ZERO);
        assert_eq!(jet.grad_u.0[0][0], 1.0);
        assert_eq!(jet.hess_u.0[0][0][0], 0.0);
    }

    #[test]
    fn helical_expression_gradient() {
        let f = parse_field("(-y, x, 1)").unwrap();
        let jet = f.jet(&Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(jet.u, Vec3::new(0.0, 1.0, 1.0));
        assert_eq!(
            jet.grad_u,
            Mat3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        );
    }

    #[test]
    fn fd_exact_on_linear_field() {
        let f = VelocityField::catalog("planar_strain_stated", &[]).unwrap();
        let jet = f.jet_fd(&Vec3::new(1.0, 2.0, 0.0), 1e-5).unwrap();
        assert!(jet.grad_u.max_abs_diff(&Mat3::diag([-1.0, 1.0, 0.0])) < 1e-10);
    }

    #[test]
    fn fd_exp_derivative() {
        let f = parse_field("exp(x), 0, 0").unwrap();
        let fd = f.jet_fd(&Vec3::ZERO, 1e-5).unwrap();
        let ad = f.jet(&Vec3::ZERO).unwrap();
        assert_eq!(ad.grad_u.0[0][0], 1.0);
        assert!((fd.grad_u.0[0][0] - ad.grad_u.0[0][0]).abs() < 1e-9);
    }

    #[test]
    fn fd_rejects_nonpositive_step() {
        let f = parse_field("x, y, z").unwrap();
        assert!(matches!(f.jet_fd(&Vec3::ZERO, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(f.jet_fd(&Vec3::ZERO, -1e-3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn domain_violation_reports_subexpression() {
        let f = parse_field("log(x), 0, 0").unwrap();
        match f.jet(&Vec3::new(-1.0, 0.0, 0.0)) {
            Err(Error::Domain { expr }) => assert_eq!(expr, "log(x)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scaled_field_scales_pressure_quadratically() {
        let f = VelocityField::catalog("planar_strain_paper", &[]).unwrap();
        let x = Vec3::new(0.3, -0.8, 0.1);
        let p1 = f.pressure_jet(&x).unwrap();
        let p3 = f.scaled(3.0).pressure_jet(&x).unwrap();
        assert!((p3.v - 9.0 * p1.v).abs() < 1e-14);
        assert!(matches!(
            parse_field("x, y, z").unwrap().pressure_jet(&x),
            Err(Error::NoPressure)
        ));
    }

    #[test]
    fn divergence_declaration_is_checked() {
        let pts = [Vec3::new(0.1, 0.2, 0.3), Vec3::new(-1.0, 0.5, 2.0)];
        assert!(parse_field("-y, x, 0").unwrap().declare_divergence_free(&pts).is_ok());
        assert!(parse_field("x, y, z").unwrap().declare_divergence_free(&pts).is_err());
    }
}
