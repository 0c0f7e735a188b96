//! Built-in steady fields with closed-form velocity and pressure.
//!
//! Every entry solves the steady Euler equations `(u·∇)u = -∇p` with the
//! pressure listed here, and is divergence-free.

use super::jet::Scalar;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CatalogEntry {
    /// `(x, -y, 0)`: the flow whose Lagrangian map is `(r e^{t+t0}, r e^{-(t+t0)}, x3)`.
    PlanarStrainPaper,
    /// `(-x, y, 0)`: the strain as written in the stated field.
    PlanarStrainStated,
    /// `(-x, -y, 2z)`: axisymmetric strain stretching along the z-axis.
    AxisymStrain,
    /// `(-y, x, 0)`.
    RigidRotation,
    /// `(-y, x, c)`: helical streamlines of pitch `2πc`.
    Helical { c: f64 },
    /// Arnold–Beltrami–Childress flow
    /// `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`.
    Abc { a: f64, b: f64, c: f64 },
}

pub const CATALOG_NAMES: [&str; 6] = [
    "planar_strain_paper",
    "planar_strain_stated",
    "axisym_strain",
    "rigid_rotation",
    "helical",
    "abc",
];

impl CatalogEntry {
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self, Error> {
        let want = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::ParameterCount {
                    name: name.to_string(),
                    expected: n,
                    got: params.len(),
                })
            }
        };
        if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite parameter {bad} for '{name}'"
            )));
        }
        let entry = match name {
            "planar_strain_paper" => {
                want(0)?;
                CatalogEntry::PlanarStrainPaper
            }
            "planar_strain_stated" => {
                want(0)?;
                CatalogEntry::PlanarStrainStated
            }
            "axisym_strain" => {
                want(0)?;
                CatalogEntry::AxisymStrain
            }
            "rigid_rotation" => {
                want(0)?;
                CatalogEntry::RigidRotation
            }
            "helical" => {
                want(1)?;
                CatalogEntry::Helical { c: params[0] }
            }
            "abc" => {
                want(3)?;
                CatalogEntry::Abc {
                    a: params[0],
                    b: params[1],
                    c: params[2],
                }
            }
            other => return Err(Error::UnknownField(other.to_string())),
        };
        Ok(entry)
    }

    pub fn name(&self) -> &'static str {
        match self {
            CatalogEntry::PlanarStrainPaper => "planar_strain_paper",
            CatalogEntry::PlanarStrainStated => "planar_strain_stated",
            CatalogEntry::AxisymStrain => "axisym_strain",
            CatalogEntry::RigidRotation => "rigid_rotation",
            CatalogEntry::Helical { .. } => "helical",
            CatalogEntry::Abc { .. } => "abc",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            CatalogEntry::Helical { c } => vec![c],
            CatalogEntry::Abc { a, b, c } => vec![a, b, c],
            _ => Vec::new(),
        }
    }

    /// Constant velocity gradient for the linear entries.
    pub fn linear_gradient(&self) -> Option<[[f64; 3]; 3]> {
        match self {
            CatalogEntry::PlanarStrainPaper => {
                Some([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]])
            }
            CatalogEntry::PlanarStrainStated => {
                Some([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
            }
            CatalogEntry::AxisymStrain => {
                Some([[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]])
            }
            CatalogEntry::RigidRotation | CatalogEntry::Helical { .. } => {
                Some([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
            }
            CatalogEntry::Abc { .. } => None,
        }
    }

    pub fn velocity<S: Scalar>(&self, p: &[S; 3]) -> [S; 3] {
        let [x, y, z] = *p;
        let k = S::constant;
        match *self {
            CatalogEntry::PlanarStrainPaper => [x, -y, k(0.0)],
            CatalogEntry::PlanarStrainStated => [-x, y, k(0.0)],
            CatalogEntry::AxisymStrain => [-x, -y, k(2.0) * z],
            CatalogEntry::RigidRotation => [-y, x, k(0.0)],
            CatalogEntry::Helical { c } => [-y, x, k(c)],
            CatalogEntry::Abc { a, b, c } => [
                k(a) * z.sin() + k(c) * y.cos(),
                k(b) * x.sin() + k(a) * z.cos(),
                k(c) * y.sin() + k(b) * x.cos(),
            ],
        }
    }

    pub fn pressure<S: Scalar>(&self, p: &[S; 3]) -> S {
        let [x, y, z] = *p;
        let half = S::constant(0.5);
        match *self {
            CatalogEntry::PlanarStrainPaper
            | CatalogEntry::PlanarStrainStated => -(half * (x * x + y * y)),
            CatalogEntry::AxisymStrain => {
                -(half * (x * x + y * y + S::constant(4.0) * z * z))
            }
            CatalogEntry::RigidRotation | CatalogEntry::Helical { .. } => {
                half * (x * x + y * y)
            }
            CatalogEntry::Abc { .. } => {
                let [u, v, w] = self.velocity(p);
                -(half * (u * u + v * v + w * w))
            }
        }
    }

    pub fn label(&self) -> String {
        let params = self.params();
        if params.is_empty() {
            self.name().to_string()
        } else {
            let list: Vec<String> = params.iter().map(|v| format!("{v}")).collect();
            format!("{}({})", self.name(), list.join(","))
        }
    }
}
