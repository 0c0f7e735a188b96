use serde::Serialize;

use super::rk::{hermite, integrate, IntegratorStats, Node, StepControl};
use crate::error::{Error, Result};
use crate::fieldkit::VelocityField;
use crate::linalg::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step; non-positive means the whole span.
    pub max_step: f64,
    pub t_span: f64,
    /// Number of uniformly spaced output samples, endpoints included.
    pub samples: usize,
    /// Integration stops once the speed drops to this level.
    pub eps_stagnation: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: 0.0,
            t_span: 1.0,
            samples: 101,
            eps_stagnation: 1e-10,
        }
    }
}

impl IntegratorConfig {
    pub fn with_span(t_span: f64) -> Self {
        IntegratorConfig {
            t_span,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("integrator tolerances must be positive".into()));
        }
        if !self.t_span.is_finite() || self.t_span < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "t_span must be finite and non-negative, got {}",
                self.t_span
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidArgument("at least 2 samples are required".into()));
        }
        Ok(())
    }

    pub(crate) fn control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
        }
    }

    /// Uniform output times on `[0, t_span]`.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.samples.max(2);
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.t_span
                } else {
                    self.t_span * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StreamlineSample {
    pub t: f64,
    /// Arc length from the seed.
    pub z: f64,
    pub x: Vec3,
    pub speed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    StagnationApproach,
}

/// Arc-length parameterized trajectory through a seed point.
#[derive(Clone, Debug)]
pub struct Streamline {
    pub seed: Vec3,
    pub samples: Vec<StreamlineSample>,
    pub stats: IntegratorStats,
    pub termination: Termination,
    nodes: Vec<Node<4>>,
}

/// Integrates `dx/dt = u(x)` jointly with `dz/dt = |u(x)|` from the seed.
pub fn integrate_streamline(field: &VelocityField, seed: &Vec3, cfg: &IntegratorConfig) -> Result<Streamline> {
    cfg.validate()?;
    let u0 = field.velocity(seed)?;
    if !(u0.norm() > cfg.eps_stagnation) {
        return Err(Error::StagnationPoint { speed: u0.norm() });
    }
    let outputs = cfg.sample_times();
    let traj = integrate(
        |_, y: &[f64; 4]| {
            let u = field.velocity(&Vec3([y[0], y[1], y[2]]))?;
            Ok([u[0], u[1], u[2], u.norm()])
        },
        [seed[0], seed[1], seed[2], 0.0],
        cfg.t_span,
        &outputs,
        &cfg.control(),
        |_, y| {
            field
                .velocity(&Vec3([y[0], y[1], y[2]]))
                .map(|u| u.norm() <= cfg.eps_stagnation)
                .unwrap_or(true)
        },
    )?;
    let sample_of = |n: &Node<4>| StreamlineSample {
        t: n.t,
        z: n.y[3],
        x: Vec3([n.y[0], n.y[1], n.y[2]]),
        speed: n.dy[3],
    };
    let mut samples: Vec<StreamlineSample> =
        traj.output_idx.iter().map(|&i| sample_of(&traj.nodes[i])).collect();
    let termination = if traj.halted {
        let last = sample_of(traj.nodes.last().expect("at least the seed node"));
        if samples.last().is_none_or(|s| s.t < last.t) {
            samples.push(last);
        }
        Termination::StagnationApproach
    } else {
        Termination::Completed
    };
    Ok(Streamline {
        seed: *seed,
        samples,
        stats: traj.stats,
        termination,
        nodes: traj.nodes,
    })
}

impl Streamline {
    /// Time span actually covered.
    pub fn t_end(&self) -> f64 {
        self.nodes.last().map_or(0.0, |n| n.t)
    }

    fn segment(&self, t: f64) -> Result<usize> {
        let last = self.nodes.len() - 1;
        if self.nodes.len() < 2 || !(t >= self.nodes[0].t && t <= self.nodes[last].t) {
            return Err(Error::InvalidArgument(format!(
                "t = {t} outside streamline span [0, {}]",
                self.t_end()
            )));
        }
        let i = self.nodes.partition_point(|n| n.t <= t);
        Ok(i.clamp(1, last) - 1)
    }

    /// Dense output: position and arc length at any covered time.
    pub fn state_at(&self, t: f64) -> Result<(Vec3, f64)> {
        let i = self.segment(t)?;
        let y = hermite(&self.nodes[i], &self.nodes[i + 1], t);
        Ok((Vec3([y[0], y[1], y[2]]), y[3]))
    }

    pub fn arc_length_map(&self) -> Result<ArcLengthMap> {
        ArcLengthMap::new(
            self.nodes.iter().map(|n| n.t).collect(),
            self.nodes.iter().map(|n| n.y[3]).collect(),
            self.nodes.iter().map(|n| n.dy[3]).collect(),
        )
    }
}

/// Monotone piecewise-cubic correspondence between time and arc length.
#[derive(Clone, Debug)]
pub struct ArcLengthMap {
    t: Vec<f64>,
    z: Vec<f64>,
    dz: Vec<f64>,
}

impl ArcLengthMap {
    pub fn new(t: Vec<f64>, z: Vec<f64>, dz: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != z.len() || t.len() != dz.len() {
            return Err(Error::InvalidArgument(
                "arc-length map needs at least two matching samples".into(),
            ));
        }
        let monotone = t.windows(2).all(|w| w[1] > w[0])
            && z.windows(2).all(|w| w[1] > w[0])
            && dz.iter().all(|d| *d > 0.0);
        if !monotone {
            return Err(Error::Internal("arc-length samples are not strictly increasing".into()));
        }
        Ok(ArcLengthMap { t, z, dz })
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    pub fn z_range(&self) -> (f64, f64) {
        (self.z[0], self.z[self.z.len() - 1])
    }

    fn eval_segment(&self, i: usize, t: f64) -> (f64, f64) {
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let (z0, z1, d0, d1) = (self.z[i], self.z[i + 1], self.dz[i] * h, self.dz[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let z = (2.0 * s3 - 3.0 * s2 + 1.0) * z0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * z1
            + (s3 - s2) * d1;
        let dzds = (6.0 * s2 - 6.0 * s) * z0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * z1
            + (3.0 * s2 - 2.0 * s) * d1;
        (z, dzds / h)
    }

    pub fn z_of_t(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.t_range();
        if !(t >= lo && t <= hi) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [{lo}, {hi}]")));
        }
        let i = self.t.partition_point(|v| *v <= t).clamp(1, self.t.len() - 1) - 1;
        Ok(self.eval_segment(i, t).0)
    }

    /// Inverse map by Newton iteration safeguarded with bisection on the bracketing segment.
    pub fn t_of_z(&self, z: f64) -> Result<f64> {
        let (lo, hi) = self.z_range();
        if !(z >= lo && z <= hi) {
            return Err(Error::InvalidArgument(format!("z = {z} outside [{lo}, {hi}]")));
        }
        let i = self.z.partition_point(|v| *v <= z).clamp(1, self.z.len() - 1) - 1;
        let (mut a, mut b) = (self.t[i], self.t[i + 1]);
        if z == self.z[i] {
            return Ok(a);
        }
        if z == self.z[i + 1] {
            return Ok(b);
        }
        // linear first guess
        let mut t = a + (b - a) * (z - self.z[i]) / (self.z[i + 1] - self.z[i]);
        for _ in 0..100 {
            let (zt, dzt) = self.eval_segment(i, t);
            let r = zt - z;
            if r > 0.0 {
                b = t;
            } else {
                a = t;
            }
            if r.abs() <= 4.0 * f64::EPSILON * z.abs().max(1.0) || b - a <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
                return Ok(t);
            }
            let newton = t - r / dzt;
            t = if dzt > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
        }
        Ok(t)
    }
}
